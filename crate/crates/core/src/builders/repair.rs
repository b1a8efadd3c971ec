//! RePair: repeatedly replace the most frequent adjacent pair of symbols
//! with a fresh non-terminal until no pair occurs twice.
//!
//! Ties between equally frequent pairs go to the smallest `(left, right)`.
//! Runs of one symbol are counted and replaced greedily left to right, so
//! `aaa` holds one occurrence of `(a, a)`.
//!
//! The sequence is a doubly linked list over positions. Every pair keeps a
//! list of positions where it was created; entries go stale as neighbours
//! are rewritten and are checked on use. Pair counts are exact for pairs of
//! two different symbols. For `(a, a)` the raw adjacency count is an upper
//! bound on the non-overlapping count; the exact value is computed when the
//! pair reaches the top of the queue.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::grammar::{alphabet_of, Rule, Slp, SymbolId};

const NONE: u32 = u32::MAX;
const DEAD: u32 = u32::MAX;

#[inline]
fn pack(a: u32, b: u32) -> u64 {
    ((a as u64) << 32) | b as u64
}

#[inline]
fn unpack(p: u64) -> (u32, u32) {
    ((p >> 32) as u32, p as u32)
}

#[derive(Default)]
struct PairEntry {
    raw: u32,
    /// Non-overlapping count of an `(a, a)` pair, valid while `!dirty`.
    exact: u32,
    dirty: bool,
    queued: u32,
    positions: Vec<u32>,
}

impl PairEntry {
    fn key(&self, pair: u64) -> u32 {
        let (a, b) = unpack(pair);
        if a == b && !self.dirty {
            self.exact
        } else {
            self.raw
        }
    }
}

/// Pair-replacement engine over one or more independent segments.
pub(crate) struct RePair {
    seq: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    heads: Vec<u32>,
    pairs: HashMap<u64, PairEntry>,
    queue: BTreeSet<(Reverse<u32>, u32, u32)>,
    rules: Vec<(u32, u32)>,
    first_id: u32,
}

impl RePair {
    /// `segments` are symbol sequences; pairs never span two segments.
    /// Fresh non-terminals are numbered from `first_id`.
    pub(crate) fn new(segments: &[Vec<u32>], first_id: u32) -> Result<Self> {
        let total: usize = segments.iter().map(Vec::len).sum();
        if total as u64 >= NONE as u64 {
            return Err(Error::InvalidArgument(format!(
                "sequence of {total} symbols is too long"
            )));
        }
        let mut seq = Vec::with_capacity(total);
        let mut next = Vec::with_capacity(total);
        let mut prev = Vec::with_capacity(total);
        let mut heads = Vec::with_capacity(segments.len());
        for s in segments {
            let base = seq.len() as u32;
            heads.push(if s.is_empty() { NONE } else { base });
            for (i, &x) in s.iter().enumerate() {
                seq.push(x);
                prev.push(if i == 0 { NONE } else { base + i as u32 - 1 });
                next.push(if i + 1 == s.len() {
                    NONE
                } else {
                    base + i as u32 + 1
                });
            }
        }
        let mut engine = Self {
            seq,
            next,
            prev,
            heads,
            pairs: HashMap::new(),
            queue: BTreeSet::new(),
            rules: Vec::new(),
            first_id,
        };
        for i in 0..engine.seq.len() {
            let j = engine.next[i];
            if j != NONE {
                let pair = pack(engine.seq[i], engine.seq[j as usize]);
                let e = engine.pairs.entry(pair).or_default();
                e.raw += 1;
                e.positions.push(i as u32);
            }
        }
        let mut initial: Vec<u64> = engine.pairs.keys().copied().collect();
        initial.sort_unstable();
        for pair in initial {
            let (a, b) = unpack(pair);
            if a == b {
                engine.pairs.get_mut(&pair).unwrap().dirty = true;
            }
            engine.refresh(pair);
        }
        Ok(engine)
    }

    fn refresh(&mut self, pair: u64) {
        let Some(e) = self.pairs.get_mut(&pair) else {
            return;
        };
        let key = e.key(pair);
        if key == e.queued {
            return;
        }
        let (a, b) = unpack(pair);
        if e.queued >= 2 {
            self.queue.remove(&(Reverse(e.queued), a, b));
        }
        if key >= 2 {
            self.queue.insert((Reverse(key), a, b));
        }
        e.queued = key;
    }

    fn inc(&mut self, a: u32, b: u32, pos: u32) {
        let pair = pack(a, b);
        let e = self.pairs.entry(pair).or_default();
        e.raw += 1;
        e.positions.push(pos);
        if a == b {
            e.dirty = true;
        }
        self.refresh(pair);
    }

    fn dec(&mut self, a: u32, b: u32) {
        let pair = pack(a, b);
        // the pair being replaced has already been taken out of the map
        let Some(e) = self.pairs.get_mut(&pair) else {
            return;
        };
        e.raw -= 1;
        if a == b {
            e.dirty = true;
        }
        if e.raw == 0 {
            if e.queued >= 2 {
                self.queue.remove(&(Reverse(e.queued), a, b));
            }
            self.pairs.remove(&pair);
        } else {
            self.refresh(pair);
        }
    }

    #[inline]
    fn holds(&self, i: u32, a: u32, b: u32) -> bool {
        let i = i as usize;
        if self.seq[i] != a {
            return false;
        }
        let j = self.next[i];
        j != NONE && self.seq[j as usize] == b
    }

    /// Sorts and prunes an `(a, a)` position list, returning its greedy
    /// non-overlapping occurrence count.
    fn settle_run_pair(&mut self, pair: u64) -> u32 {
        let (a, _) = unpack(pair);
        let mut positions = std::mem::take(&mut self.pairs.get_mut(&pair).unwrap().positions);
        positions.retain(|&p| self.holds(p, a, a));
        positions.sort_unstable();
        let mut count = 0;
        let mut skip = NONE;
        for &p in &positions {
            if p == skip {
                continue;
            }
            count += 1;
            skip = self.next[p as usize];
        }
        self.pairs.get_mut(&pair).unwrap().positions = positions;
        count
    }

    pub(crate) fn run(&mut self) -> Result<()> {
        while let Some(&(Reverse(key), a, b)) = self.queue.first() {
            debug_assert!(key >= 2);
            let pair = pack(a, b);
            if a == b && self.pairs[&pair].dirty {
                let exact = self.settle_run_pair(pair);
                let e = self.pairs.get_mut(&pair).unwrap();
                e.exact = exact;
                e.dirty = false;
                self.refresh(pair);
                continue;
            }
            self.queue.remove(&(Reverse(key), a, b));
            let mut entry = self.pairs.remove(&pair).unwrap();
            let z = self
                .first_id
                .checked_add(self.rules.len() as u32)
                .filter(|&z| z != NONE)
                .ok_or_else(|| Error::InvalidArgument("too many rules".into()))?;
            self.rules.push((a, b));
            if a == b {
                entry.positions.sort_unstable();
            }
            for &i in &entry.positions {
                if !self.holds(i, a, b) {
                    continue;
                }
                let j = self.next[i as usize];
                let p = self.prev[i as usize];
                let q = self.next[j as usize];
                if p != NONE {
                    self.dec(self.seq[p as usize], a);
                }
                if q != NONE {
                    self.dec(b, self.seq[q as usize]);
                }
                self.seq[i as usize] = z;
                self.seq[j as usize] = DEAD;
                self.next[i as usize] = q;
                if q != NONE {
                    self.prev[q as usize] = i;
                }
                if p != NONE {
                    self.inc(self.seq[p as usize], z, p);
                }
                if q != NONE {
                    self.inc(z, self.seq[q as usize], i);
                }
            }
        }
        Ok(())
    }

    pub(crate) fn rules(&self) -> &[(u32, u32)] {
        &self.rules
    }

    /// Residual symbol sequence of segment `s`.
    pub(crate) fn segment(&self, s: usize) -> Vec<u32> {
        let mut out = Vec::new();
        let mut i = self.heads[s];
        while i != NONE {
            out.push(self.seq[i as usize]);
            i = self.next[i as usize];
        }
        out
    }
}

/// Compresses `text` with RePair into an SLP over its own alphabet.
pub fn repair_build(text: &[u8]) -> Result<Slp> {
    if text.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot compress an empty text".into(),
        ));
    }
    let alphabet = alphabet_of(text);
    let mut code = [0u32; 256];
    for (i, &b) in alphabet.iter().enumerate() {
        code[b as usize] = i as u32;
    }
    let seq: Vec<u32> = text.iter().map(|&b| code[b as usize]).collect();
    let mut engine = RePair::new(&[seq], alphabet.len() as u32)?;
    engine.run()?;
    let rules = engine
        .rules()
        .iter()
        .map(|&(l, r)| Rule::new(l as u64, r as u64))
        .collect();
    let start = engine
        .segment(0)
        .into_iter()
        .map(|x| SymbolId(x as u64))
        .collect();
    Slp::new(alphabet, rules, start)
}
