//! Minimal perfect hash over the distinct expansion sizes of a grammar.
//!
//! Construction is hash-and-displace with a per-bucket pilot: keys are
//! hashed into `ceil(d / KEYS_PER_BUCKET)` buckets, buckets are placed
//! largest first, and for each bucket the smallest pilot is chosen under
//! which all of its keys land on free, distinct slots of `[0, d)`. Only the
//! pilots are stored, packed at the width of the largest one.
//!
//! Queries on keys outside the build set still return some value in
//! `[0, d)`; callers must only query genuine keys.

use std::collections::BTreeMap;

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

use super::bits::{corrupt, FixedWidthArray};
use super::{TAG_MPHF_PILOT, TAG_MPHF_TABLE};

const KEYS_PER_BUCKET: u64 = 5;
const MAX_PILOT: u64 = 1 << 28;
const MAX_ATTEMPTS: u64 = 64;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn reduce(h: u64, n: u64) -> u64 {
    ((h as u128 * n as u128) >> 64) as u64
}

#[inline]
fn key_hash(key: u64, seed: u64) -> u64 {
    mix(key.wrapping_add(mix(seed ^ 0x9e37_79b9_7f4a_7c15)))
}

#[inline]
fn slot(hash: u64, pilot: u64, seed: u64, n: u64) -> u64 {
    reduce(mix(hash ^ mix(pilot.wrapping_add(seed))), n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Pilot {
        keys: u64,
        seed: u64,
        buckets: u64,
        pilots: FixedWidthArray,
    },
    /// Explicit key → value table, used when a caller fixes the order.
    Table { keys: Vec<u64>, values: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeMphf {
    repr: Repr,
}

impl SizeMphf {
    /// Builds a minimal perfect hash over `keys`, which must be distinct.
    ///
    /// The result depends only on the key set and `seed`. If the pilot search
    /// fails (a 64-bit hash collision, or a pathological bucket), it retries
    /// with seeds derived from `seed`.
    pub fn build(keys: &[u64], seed: u64) -> Result<Self> {
        let mut sorted = keys.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate MPHF keys".into()));
        }
        let mut attempt_seed = seed;
        for _ in 0..MAX_ATTEMPTS {
            if let Some(repr) = try_build(&sorted, attempt_seed) {
                return Ok(Self { repr });
            }
            attempt_seed = mix(attempt_seed.wrapping_add(1));
        }
        Err(Error::InvalidArgument(format!(
            "no perfect hash found after {MAX_ATTEMPTS} seeds"
        )))
    }

    /// Uses an explicit bijection from keys onto `[0, d)`.
    pub fn from_assignment(assignment: &BTreeMap<u64, u64>) -> Result<Self> {
        let d = assignment.len() as u64;
        let mut seen = vec![false; d as usize];
        for &v in assignment.values() {
            if v >= d || std::mem::replace(&mut seen[v as usize], true) {
                return Err(Error::InvalidArgument(format!(
                    "assignment is not a bijection onto [0, {d})"
                )));
            }
        }
        Ok(Self {
            repr: Repr::Table {
                keys: assignment.keys().copied().collect(),
                values: assignment.values().copied().collect(),
            },
        })
    }

    /// Number of keys `d`.
    pub fn len(&self) -> u64 {
        match &self.repr {
            Repr::Pilot { keys, .. } => *keys,
            Repr::Table { keys, .. } => keys.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn query(&self, key: u64) -> u64 {
        match &self.repr {
            Repr::Pilot {
                keys,
                seed,
                buckets,
                pilots,
            } => {
                if *keys == 0 {
                    return 0;
                }
                let h = key_hash(key, *seed);
                let b = reduce(h, *buckets);
                slot(h, pilots.get(b as usize), *seed, *keys)
            }
            Repr::Table { keys, values } => match keys.binary_search(&key) {
                Ok(i) => values[i],
                Err(i) if !keys.is_empty() => values[i % keys.len()],
                Err(_) => 0,
            },
        }
    }

    pub fn bits_per_key(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        (self.serialized_len() * 8) as f64 / self.len() as f64
    }

    pub fn serialized_len(&self) -> usize {
        match &self.repr {
            Repr::Pilot { pilots, .. } => 1 + 8 * 3 + pilots.serialized_len(),
            Repr::Table { keys, .. } => 1 + 8 + 16 * keys.len(),
        }
    }

    pub fn write(&self, w: &mut Writer) {
        match &self.repr {
            Repr::Pilot {
                keys,
                seed,
                buckets,
                pilots,
            } => {
                w.u8(TAG_MPHF_PILOT);
                w.u64(*keys);
                w.u64(*seed);
                w.u64(*buckets);
                pilots.write(w);
            }
            Repr::Table { keys, values } => {
                w.u8(TAG_MPHF_TABLE);
                w.u64(keys.len() as u64);
                for (&k, &v) in keys.iter().zip(values) {
                    w.u64(k);
                    w.u64(v);
                }
            }
        }
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        match r.u8()? {
            TAG_MPHF_PILOT => {
                let keys = r.u64()?;
                let seed = r.u64()?;
                let buckets = r.u64()?;
                let pilots = FixedWidthArray::read(r)?;
                if buckets != keys.div_ceil(KEYS_PER_BUCKET) || pilots.len() as u64 != buckets {
                    return Err(corrupt("inconsistent MPHF header"));
                }
                Ok(Self {
                    repr: Repr::Pilot {
                        keys,
                        seed,
                        buckets,
                        pilots,
                    },
                })
            }
            TAG_MPHF_TABLE => {
                let n = r.count(16)?;
                let mut map = BTreeMap::new();
                for _ in 0..n {
                    let k = r.u64()?;
                    let v = r.u64()?;
                    map.insert(k, v);
                }
                if map.len() != n {
                    return Err(corrupt("duplicate MPHF table key"));
                }
                Self::from_assignment(&map).map_err(|e| Error::Corrupt(e.to_string()))
            }
            t => Err(Error::Corrupt(format!("unknown MPHF tag {t:#04x}"))),
        }
    }
}

fn try_build(keys: &[u64], seed: u64) -> Option<Repr> {
    let n = keys.len() as u64;
    let nbuckets = n.div_ceil(KEYS_PER_BUCKET);
    let mut hashes: Vec<(u64, u64)> = keys
        .iter()
        .map(|&k| {
            let h = key_hash(k, seed);
            (reduce(h, nbuckets), h)
        })
        .collect();
    hashes.sort_unstable();
    if hashes.windows(2).any(|w| w[0].1 == w[1].1) {
        return None;
    }

    // (bucket, start, end) ranges into `hashes`, largest buckets first
    let mut buckets: Vec<(u64, usize, usize)> = Vec::with_capacity(nbuckets as usize);
    let mut i = 0;
    while i < hashes.len() {
        let b = hashes[i].0;
        let mut j = i;
        while j < hashes.len() && hashes[j].0 == b {
            j += 1;
        }
        buckets.push((b, i, j));
        i = j;
    }
    buckets.sort_by(|a, b| (b.2 - b.1).cmp(&(a.2 - a.1)).then(a.0.cmp(&b.0)));

    let mut taken = vec![false; n as usize];
    let mut pilots = vec![0u64; nbuckets as usize];
    let mut slots: Vec<u64> = Vec::new();
    for &(b, start, end) in &buckets {
        let members = &hashes[start..end];
        let mut pilot = 0u64;
        'search: loop {
            if pilot >= MAX_PILOT {
                return None;
            }
            slots.clear();
            for &(_, h) in members {
                let s = slot(h, pilot, seed, n);
                if taken[s as usize] || slots.contains(&s) {
                    pilot += 1;
                    continue 'search;
                }
                slots.push(s);
            }
            break;
        }
        for &s in &slots {
            taken[s as usize] = true;
        }
        pilots[b as usize] = pilot;
    }
    Some(Repr::Pilot {
        keys: n,
        seed,
        buckets: nbuckets,
        pilots: FixedWidthArray::from_values(&pilots),
    })
}
