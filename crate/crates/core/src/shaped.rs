//! Shape-integrated SLP encoding.
//!
//! Non-terminals are grouped by expansion size, groups are ordered by a
//! minimal perfect hash of that size, and each non-terminal is addressed by
//! the pair (size, offset in its group). A rule is stored as a triple: its
//! left child's size, the left child's offset and the right child's offset
//! (a terminal's offset is its position in the alphabet). The right child's
//! size is the difference of the two sizes, so a descent never needs rule
//! identifiers: at each step it hashes the current size to find the group
//! and reads one triple.
//!
//! The start rule is a bitvector of length `n` holding the unary codes of
//! its symbols' sizes, plus each symbol's offset; rank and select on the
//! bitvector find the symbol covering a text position.
//!
//! # Triple layout
//!
//! All triples live in one bit buffer. Group `g` with expansion size `l`
//! stores its members (in ascending rule order) as consecutive records of
//! `wl + wlo + wro` bits: `left_size - 1` in `wl = ceil(log2(l - 1))` bits,
//! then the left offset in `wlo` bits and the right offset in `wro` bits.
//! `wl` follows from `l`; the record base and the two offset widths are
//! packed per group into `group_meta` as `base << 14 | wlo << 7 | wro`.
//! A bitvector over the `r` flat triple indices marks where each group
//! begins, giving the group cardinalities.

use std::collections::{BTreeMap, HashMap};

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::grammar::Slp;
use crate::succinct::{bits_for, BitBuffer, FixedWidthArray, RankSelectBitVector, SizeMphf};
use crate::{check_position, check_range, TextAccess};

pub const SHAPED_MAGIC: &[u8; 4] = b"SSLP";
pub const SHAPED_VERSION: u16 = 1;

const FLAG_SIZE_TABLE: u8 = 1;
const META_WIDTH_BITS: u32 = 7;
const META_WIDTH_MASK: u64 = (1 << META_WIDTH_BITS) - 1;

/// Bits for the stored `left_size - 1` of a group with expansion size `l`.
#[inline]
fn left_size_width(l: u64) -> u32 {
    bits_for(l - 2)
}

#[derive(Clone, Debug)]
pub struct EncodeOptions {
    /// Seed for the size hash.
    pub seed: u64,
    /// Explicit size → group rank assignment, replacing the hash. Must be a
    /// bijection from the grammar's distinct non-terminal sizes onto
    /// `[0, d)`.
    pub size_order: Option<BTreeMap<u64, u64>>,
    /// Keep the per-group expansion size table. It is redundant for queries
    /// but lets deserialization verify the hash and group layout.
    pub keep_size_table: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            size_order: None,
            keep_size_table: true,
        }
    }
}

/// One stored rule: `(left child size, left child offset, right child offset)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triple {
    pub left_size: u64,
    pub left_offset: u64,
    pub right_offset: u64,
}

impl From<(u64, u64, u64)> for Triple {
    fn from((left_size, left_offset, right_offset): (u64, u64, u64)) -> Self {
        Self {
            left_size,
            left_offset,
            right_offset,
        }
    }
}

/// A left size outside `[1, size)` can only come from a damaged file
/// loaded without the size table; rejecting it keeps descents finite.
#[inline]
fn check_triple(t: &Triple, size: u64, offset: u64) -> Result<()> {
    if t.left_size < size {
        Ok(())
    } else {
        Err(Error::Corrupt(format!(
            "triple at size {size}, offset {offset} has left size {}",
            t.left_size
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Left,
    Right,
}

/// One step of a descent: the node reached, identified by size and offset,
/// the 1-based character wanted inside its expansion, and which child the
/// descent took next (`None` at the terminal).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DescentFrame {
    pub size: u64,
    pub offset: u64,
    pub char_offset: u64,
    pub branch: Option<Branch>,
}

/// Hooks for instrumenting queries; all methods default to no-ops.
pub trait QueryObserver {
    /// Called with every argument passed to the size hash.
    fn on_size_hash(&mut self, _size: u64) {}
    /// Called once per loop iteration of a single-character descent.
    fn on_descent_step(&mut self) {}
    /// Called whenever extraction pushes a pending right subtree.
    fn on_frame_push(&mut self) {}
}

impl QueryObserver for () {}

/// Serialized size of each component, in bytes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SizeReport {
    pub header: u64,
    pub mphf: u64,
    pub groups: u64,
    pub size_table: u64,
    pub triples: u64,
    pub start: u64,
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapedSlpEncoding {
    n: u64,
    r: u64,
    alphabet: Vec<u8>,
    size_mphf: SizeMphf,
    group_starts: RankSelectBitVector,
    group_meta: FixedWidthArray,
    triples: BitBuffer,
    group_sizes_table: Option<FixedWidthArray>,
    start_bitvector: RankSelectBitVector,
    start_offsets: FixedWidthArray,
}

impl ShapedSlpEncoding {
    pub fn encode(slp: &Slp, options: &EncodeOptions) -> Result<Self> {
        let lengths = slp.expansion_lengths();
        let r = lengths.len();

        let mut sizes = lengths.clone();
        sizes.sort_unstable();
        sizes.dedup();
        let d = sizes.len();

        let size_mphf = match &options.size_order {
            Some(order) => {
                if !order.keys().copied().eq(sizes.iter().copied()) {
                    return Err(Error::InvalidArgument(
                        "size order must cover exactly the non-terminal sizes".into(),
                    ));
                }
                SizeMphf::from_assignment(order)?
            }
            None => SizeMphf::build(&sizes, options.seed)?,
        };
        let group_of: HashMap<u64, usize> = sizes
            .iter()
            .map(|&sz| (sz, size_mphf.query(sz) as usize))
            .collect();

        let mut members: Vec<Vec<usize>> = vec![Vec::new(); d];
        let mut offset_in_group = vec![0u64; r];
        for (k, &len) in lengths.iter().enumerate() {
            let g = group_of[&len];
            offset_in_group[k] = members[g].len() as u64;
            members[g].push(k);
        }
        let mut group_size = vec![0u64; d];
        for (&sz, &g) in &group_of {
            group_size[g] = sz;
        }

        let offset_of = |x: crate::SymbolId| match slp.rule_index(x) {
            None => x.0,
            Some(k) => offset_in_group[k],
        };

        let mut triples = BitBuffer::new();
        let mut meta = Vec::with_capacity(d);
        let mut starts = Vec::with_capacity(d);
        let mut flat = 0u64;
        for (g, group) in members.iter().enumerate() {
            let l = group_size[g];
            let recs: Vec<(u64, u64, u64)> = group
                .iter()
                .map(|&k| {
                    let rule = slp.rules()[k];
                    (
                        slp.symbol_length(&lengths, rule.left),
                        offset_of(rule.left),
                        offset_of(rule.right),
                    )
                })
                .collect();
            let wl = left_size_width(l);
            let wlo = bits_for(recs.iter().map(|t| t.1).max().unwrap_or(0));
            let wro = bits_for(recs.iter().map(|t| t.2).max().unwrap_or(0));
            meta.push(
                (triples.len() << (2 * META_WIDTH_BITS))
                    | ((wlo as u64) << META_WIDTH_BITS)
                    | wro as u64,
            );
            for (ls, lo, ro) in recs {
                triples.push_bits(ls - 1, wl);
                triples.push_bits(lo, wlo);
                triples.push_bits(ro, wro);
            }
            starts.push(flat);
            flat += group.len() as u64;
        }

        let mut start_ones = Vec::with_capacity(slp.start().len());
        let mut start_offsets = Vec::with_capacity(slp.start().len());
        let mut acc = 0u64;
        for &x in slp.start() {
            acc += slp.symbol_length(&lengths, x);
            start_ones.push(acc - 1);
            start_offsets.push(offset_of(x));
        }

        Ok(Self {
            n: slp.text_length(),
            r: r as u64,
            alphabet: slp.alphabet().to_vec(),
            size_mphf,
            group_starts: RankSelectBitVector::from_ones(r as u64, &starts),
            group_meta: FixedWidthArray::from_values(&meta),
            triples,
            group_sizes_table: options
                .keep_size_table
                .then(|| FixedWidthArray::from_values(&group_size)),
            start_bitvector: RankSelectBitVector::from_ones(slp.text_length(), &start_ones),
            start_offsets: FixedWidthArray::from_values(&start_offsets),
        })
    }

    pub fn text_len(&self) -> u64 {
        self.n
    }

    pub fn sigma(&self) -> u64 {
        self.alphabet.len() as u64
    }

    pub fn num_rules(&self) -> u64 {
        self.r
    }

    pub fn num_sizes(&self) -> u64 {
        self.size_mphf.len()
    }

    pub fn start_len(&self) -> u64 {
        self.start_bitvector.count_ones()
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn start_bitvector(&self) -> &RankSelectBitVector {
        &self.start_bitvector
    }

    pub fn start_offsets(&self) -> Vec<u64> {
        self.start_offsets.to_vec()
    }

    pub fn size_mphf(&self) -> &SizeMphf {
        &self.size_mphf
    }

    /// Number of non-terminals in group `g`.
    pub fn group_len(&self, g: u64) -> u64 {
        let d = self.num_sizes();
        let begin = self.group_starts.select1_unchecked(g + 1) - 1;
        let end = if g + 1 < d {
            self.group_starts.select1_unchecked(g + 2) - 1
        } else {
            self.r
        };
        end - begin
    }

    /// Expansion size of group `g`, if the size table was kept.
    pub fn group_expansion_size(&self, g: u64) -> Option<u64> {
        self.group_sizes_table.as_ref().map(|t| t.get(g as usize))
    }

    #[inline]
    fn record<O: QueryObserver>(&self, size: u64, offset: u64, obs: &mut O) -> Triple {
        debug_assert!(size >= 2);
        obs.on_size_hash(size);
        let g = self.size_mphf.query(size);
        let meta = self.group_meta.get(g as usize);
        let wlo = ((meta >> META_WIDTH_BITS) & META_WIDTH_MASK) as u32;
        let wro = (meta & META_WIDTH_MASK) as u32;
        let base = meta >> (2 * META_WIDTH_BITS);
        let wl = left_size_width(size);
        let pos = base + offset * (wl + wlo + wro) as u64;
        Triple {
            left_size: self.triples.get_bits(pos, wl) + 1,
            left_offset: self.triples.get_bits(pos + wl as u64, wlo),
            right_offset: self.triples.get_bits(pos + (wl + wlo) as u64, wro),
        }
    }

    /// Triple of the non-terminal at `offset` in the group of `size`.
    pub fn triple(&self, size: u64, offset: u64) -> Option<Triple> {
        if size < 2 || self.num_sizes() == 0 {
            return None;
        }
        let g = self.size_mphf.query(size);
        if self.group_expansion_size(g).is_some_and(|s| s != size) || offset >= self.group_len(g) {
            return None;
        }
        Some(self.record(size, offset, &mut ()))
    }

    /// All triples of group `g`, in stored order. Requires the size table.
    pub fn group_triples(&self, g: u64) -> Option<Vec<Triple>> {
        let size = self.group_expansion_size(g)?;
        Some(
            (0..self.group_len(g))
                .map(|k| self.record(size, k, &mut ()))
                .collect(),
        )
    }

    /// Start-rule symbol covering position `i`: its 1-based index, the
    /// 1-based character offset of `i` inside it, and its size.
    #[inline]
    pub fn locate_in_start(&self, i: u64) -> (u64, u64, u64) {
        let k = self.start_bitvector.rank1_unchecked(i - 1) + 1;
        let lo = self.start_bitvector.select1_unchecked(k - 1);
        let hi = self.start_bitvector.select1_unchecked(k);
        (k, i - lo, hi - lo)
    }

    pub fn access_observed<O: QueryObserver>(&self, i: u64, obs: &mut O) -> Result<u8> {
        check_position(i, self.n)?;
        let (k, mut j, mut size) = self.locate_in_start(i);
        let mut offset = self.start_offsets.get((k - 1) as usize);
        loop {
            obs.on_descent_step();
            if size == 1 {
                return Ok(self.alphabet[offset as usize]);
            }
            let t = self.record(size, offset, obs);
            check_triple(&t, size, offset)?;
            if j <= t.left_size {
                size = t.left_size;
                offset = t.left_offset;
            } else {
                j -= t.left_size;
                size -= t.left_size;
                offset = t.right_offset;
            }
        }
    }

    /// The sequence of nodes visited when accessing position `i`, starting
    /// at the start-rule symbol.
    pub fn descent_path(&self, i: u64) -> Result<Vec<DescentFrame>> {
        check_position(i, self.n)?;
        let (k, mut j, mut size) = self.locate_in_start(i);
        let mut offset = self.start_offsets.get((k - 1) as usize);
        let mut path = Vec::new();
        while size > 1 {
            let t = self.record(size, offset, &mut ());
            check_triple(&t, size, offset)?;
            let branch = if j <= t.left_size {
                Branch::Left
            } else {
                Branch::Right
            };
            path.push(DescentFrame {
                size,
                offset,
                char_offset: j,
                branch: Some(branch),
            });
            if branch == Branch::Left {
                size = t.left_size;
                offset = t.left_offset;
            } else {
                j -= t.left_size;
                size -= t.left_size;
                offset = t.right_offset;
            }
        }
        path.push(DescentFrame {
            size,
            offset,
            char_offset: j,
            branch: None,
        });
        Ok(path)
    }

    /// Appends `T[i..i+len-1]` to `out`: one descent to position `i`, then
    /// an in-order walk that keeps the pending right subtrees on a stack.
    pub fn extract_observed<O: QueryObserver>(
        &self,
        i: u64,
        len: u64,
        out: &mut Vec<u8>,
        obs: &mut O,
    ) -> Result<()> {
        check_range(i, len, self.n)?;
        if len == 0 {
            return Ok(());
        }
        out.reserve(len as usize);
        let (mut k, mut j, mut size) = self.locate_in_start(i);
        let mut symbol_end = self.start_bitvector.select1_unchecked(k);
        let mut offset = self.start_offsets.get((k - 1) as usize);
        let mut pending: Vec<(u64, u64)> = Vec::with_capacity(64);
        let mut remaining = len;
        loop {
            while size > 1 {
                let t = self.record(size, offset, obs);
                check_triple(&t, size, offset)?;
                if j <= t.left_size {
                    pending.push((size - t.left_size, t.right_offset));
                    obs.on_frame_push();
                    size = t.left_size;
                    offset = t.left_offset;
                } else {
                    j -= t.left_size;
                    size -= t.left_size;
                    offset = t.right_offset;
                }
            }
            out.push(self.alphabet[offset as usize]);
            remaining -= 1;
            if remaining == 0 {
                return Ok(());
            }
            j = 1;
            match pending.pop() {
                Some((s, o)) => {
                    size = s;
                    offset = o;
                }
                None => {
                    k += 1;
                    let end = self.start_bitvector.select1_unchecked(k);
                    size = end - symbol_end;
                    symbol_end = end;
                    offset = self.start_offsets.get((k - 1) as usize);
                }
            }
        }
    }

    /// Checks every structural invariant; needs the size table.
    pub fn verify(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Corrupt(m));
        let d = self.num_sizes();
        let sigma = self.sigma();
        let Some(table) = &self.group_sizes_table else {
            return bad("verification needs the group size table".into());
        };
        let mut total = 0;
        for g in 0..d {
            total += self.group_len(g);
        }
        if total != self.r {
            return bad(format!("group sizes sum to {total}, expected {}", self.r));
        }
        for g in 0..d {
            let l = table.get(g as usize);
            if l < 2 || self.size_mphf.query(l) != g {
                return bad(format!("group {g} has size {l} hashing elsewhere"));
            }
            let child_ok = |size: u64, offset: u64| {
                if size == 1 {
                    offset < sigma
                } else {
                    let cg = self.size_mphf.query(size);
                    table.get(cg as usize) == size && offset < self.group_len(cg)
                }
            };
            for k in 0..self.group_len(g) {
                let t = self.record(l, k, &mut ());
                if !(1..l).contains(&t.left_size)
                    || !child_ok(t.left_size, t.left_offset)
                    || !child_ok(l - t.left_size, t.right_offset)
                {
                    return bad(format!("triple {k} of group {g} is inconsistent: {t:?}"));
                }
            }
        }
        let s = self.start_len();
        if self.start_offsets.len() as u64 != s || self.start_bitvector.len() != self.n {
            return bad("start structures disagree".into());
        }
        let mut prev = 0;
        for k in 1..=s {
            let end = self.start_bitvector.select1_unchecked(k);
            let size = end - prev;
            let offset = self.start_offsets.get((k - 1) as usize);
            let ok = if size == 1 {
                offset < sigma
            } else {
                let cg = self.size_mphf.query(size);
                cg < d && table.get(cg as usize) == size && offset < self.group_len(cg)
            };
            if !ok {
                return bad(format!("start symbol {k} is inconsistent"));
            }
            prev = end;
        }
        Ok(())
    }

    pub fn size_report(&self) -> SizeReport {
        let header = (4 + 2 + 5 * 8 + self.alphabet.len() + 1) as u64;
        let mphf = self.size_mphf.serialized_len() as u64;
        let groups = (self.group_starts.serialized_len() + self.group_meta.serialized_len()) as u64;
        let size_table = self
            .group_sizes_table
            .as_ref()
            .map_or(0, |t| t.serialized_len() as u64);
        let triples = self.triples.serialized_len() as u64;
        let start =
            (self.start_bitvector.serialized_len() + self.start_offsets.serialized_len()) as u64;
        SizeReport {
            header,
            mphf,
            groups,
            size_table,
            triples,
            start,
            total: header + mphf + groups + size_table + triples + start,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(SHAPED_MAGIC);
        w.u16(SHAPED_VERSION);
        w.u64(self.sigma());
        w.u64(self.r);
        w.u64(self.start_len());
        w.u64(self.n);
        w.u64(self.num_sizes());
        w.bytes(&self.alphabet);
        w.u8(if self.group_sizes_table.is_some() {
            FLAG_SIZE_TABLE
        } else {
            0
        });
        self.size_mphf.write(&mut w);
        self.group_starts.write(&mut w);
        self.group_meta.write(&mut w);
        self.triples.write(&mut w);
        if let Some(t) = &self.group_sizes_table {
            t.write(&mut w);
        }
        self.start_bitvector.write(&mut w);
        self.start_offsets.write(&mut w);
        w.into_inner()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.magic(SHAPED_MAGIC)?;
        let version = r.u16()?;
        if version != SHAPED_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let sigma = r.u64()?;
        let nrules = r.u64()?;
        let s = r.u64()?;
        let n = r.u64()?;
        let d = r.u64()?;
        if sigma == 0 || sigma > 256 {
            return Err(Error::Corrupt(format!("alphabet size {sigma}")));
        }
        let alphabet = r.take(sigma as usize)?.to_vec();
        let flags = r.u8()?;
        if flags & !FLAG_SIZE_TABLE != 0 {
            return Err(Error::Corrupt(format!("unknown flags {flags:#04x}")));
        }
        let size_mphf = SizeMphf::read(&mut r)?;
        let group_starts = RankSelectBitVector::read(&mut r)?;
        let group_meta = FixedWidthArray::read(&mut r)?;
        let triples = BitBuffer::read(&mut r)?;
        let group_sizes_table = if flags & FLAG_SIZE_TABLE != 0 {
            Some(FixedWidthArray::read(&mut r)?)
        } else {
            None
        };
        let start_bitvector = RankSelectBitVector::read(&mut r)?;
        let start_offsets = FixedWidthArray::read(&mut r)?;
        r.finish()?;

        let corrupt = |m: &str| Err(Error::Corrupt(m.to_string()));
        if alphabet.windows(2).any(|w| w[0] >= w[1]) {
            return corrupt("alphabet not ascending");
        }
        if size_mphf.len() != d
            || group_meta.len() as u64 != d
            || group_starts.len() != nrules
            || group_starts.count_ones() != d
            || group_sizes_table
                .as_ref()
                .is_some_and(|t| t.len() as u64 != d)
        {
            return corrupt("group structures disagree with header");
        }
        if d > 0 && group_starts.select1_unchecked(1) != 1 {
            return corrupt("first group does not start at 0");
        }
        if start_bitvector.len() != n
            || start_bitvector.count_ones() != s
            || start_offsets.len() as u64 != s
            || s == 0
            || !start_bitvector.get(n).unwrap_or(false)
        {
            return corrupt("start structures disagree with header");
        }
        let enc = Self {
            n,
            r: nrules,
            alphabet,
            size_mphf,
            group_starts,
            group_meta,
            triples,
            group_sizes_table,
            start_bitvector,
            start_offsets,
        };
        if enc.group_sizes_table.is_some() {
            enc.verify()?;
        }
        Ok(enc)
    }
}

impl TextAccess for ShapedSlpEncoding {
    fn text_len(&self) -> u64 {
        self.n
    }

    fn access(&self, i: u64) -> Result<u8> {
        self.access_observed(i, &mut ())
    }

    fn extract_into(&self, i: u64, len: u64, out: &mut Vec<u8>) -> Result<()> {
        self.extract_observed(i, len, out, &mut ())
    }

    fn size_bytes(&self) -> u64 {
        self.size_report().total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::example_grammar;

    fn worked_example() -> ShapedSlpEncoding {
        let options = EncodeOptions {
            size_order: Some(BTreeMap::from([(5, 1), (3, 2), (2, 0)])),
            ..Default::default()
        };
        ShapedSlpEncoding::encode(&example_grammar(), &options).unwrap()
    }

    #[test]
    fn worked_example_triples() {
        let e = worked_example();
        let t = |v: &[(u64, u64, u64)]| v.iter().map(|&x| Triple::from(x)).collect::<Vec<_>>();
        assert_eq!(e.group_triples(0).unwrap(), t(&[(1, 1, 4), (1, 4, 1)]));
        assert_eq!(e.group_triples(1).unwrap(), t(&[(3, 0, 1)]));
        assert_eq!(e.group_triples(2).unwrap(), t(&[(1, 3, 0), (1, 2, 0)]));
        e.verify().unwrap();
    }

    #[test]
    fn worked_example_start_rule() {
        let e = worked_example();
        let bits: String = (1..=25)
            .map(|i| {
                if e.start_bitvector().get(i).unwrap() {
                    '1'
                } else {
                    '0'
                }
            })
            .collect();
        assert_eq!(bits, "0000100110011000010011001");
        assert_eq!(e.start_offsets(), vec![0, 0, 1, 1, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn worked_example_access_path() {
        let e = worked_example();
        assert_eq!(e.locate_in_start(17), (6, 4, 5));
        let path = e.descent_path(17).unwrap();
        let summary: Vec<(u64, u64, u64)> = path
            .iter()
            .map(|f| (f.size, f.offset, f.char_offset))
            .collect();
        assert_eq!(summary, vec![(5, 0, 4), (2, 1, 1), (1, 4, 1)]);
        assert_eq!(e.triple(5, 0), Some(Triple::from((3, 0, 1))));
        assert_eq!(e.triple(2, 1), Some(Triple::from((1, 4, 1))));
        assert_eq!(e.access(17).unwrap(), b'T');
    }

    #[test]
    fn all_positions_match_oracle() {
        let g = example_grammar();
        let text = g.decompress();
        for e in [
            worked_example(),
            ShapedSlpEncoding::encode(&g, &EncodeOptions::default()).unwrap(),
        ] {
            for i in 1..=25 {
                assert_eq!(e.access(i).unwrap(), text[i as usize - 1], "position {i}");
            }
            assert_eq!(e.extract(1, 25).unwrap(), text);
            assert_eq!(e.extract(17, 1).unwrap(), b"T");
            assert_eq!(e.extract(14, 4).unwrap(), b"GATT");
            assert_eq!(e.extract(25, 0).unwrap(), b"");
        }
    }

    #[test]
    fn out_of_range() {
        let e = worked_example();
        assert!(e.access(0).is_err());
        assert!(e.access(26).is_err());
        assert!(e.extract(20, 7).is_err());
        assert!(e.extract(0, 1).is_err());
        assert!(e.extract(26, 0).is_ok());
    }

    #[test]
    fn terminals_only() {
        let g = Slp::from_terminals(b"ab").unwrap();
        let e = ShapedSlpEncoding::encode(&g, &EncodeOptions::default()).unwrap();
        assert_eq!(e.num_sizes(), 0);
        assert_eq!(e.start_offsets(), vec![0, 1]);
        assert_eq!(e.start_bitvector().count_ones(), 2);
        assert_eq!(e.access(2).unwrap(), b'b');
        e.verify().unwrap();
        let back = ShapedSlpEncoding::from_bytes(&e.to_bytes()).unwrap();
        assert_eq!(back.extract(1, 2).unwrap(), b"ab");
    }

    #[test]
    fn damaged_left_size_is_an_error() {
        // X = ab, Y = XX, Z = YX; Z has size 6, so its left size takes 3 bits
        let g = Slp::new(
            b"ab".to_vec(),
            vec![
                crate::Rule::new(0, 1),
                crate::Rule::new(2, 2),
                crate::Rule::new(3, 2),
            ],
            vec![crate::SymbolId(4)],
        )
        .unwrap();
        let mut e = ShapedSlpEncoding::encode(&g, &EncodeOptions::default()).unwrap();
        let g6 = e.size_mphf.query(6);
        let base = e.group_meta.get(g6 as usize) >> (2 * META_WIDTH_BITS);
        e.triples.set_bits(base, left_size_width(6), 6);
        assert!(e.verify().is_err());
        assert!(matches!(e.access(1), Err(Error::Corrupt(_))));
        assert!(e.extract(1, 6).is_err());
        assert!(e.descent_path(6).is_err());
    }

    #[test]
    fn bad_size_order_rejected() {
        let g = example_grammar();
        let missing = EncodeOptions {
            size_order: Some(BTreeMap::from([(5, 1), (3, 0)])),
            ..Default::default()
        };
        assert!(ShapedSlpEncoding::encode(&g, &missing).is_err());
        let clash = EncodeOptions {
            size_order: Some(BTreeMap::from([(5, 1), (3, 1), (2, 0)])),
            ..Default::default()
        };
        assert!(ShapedSlpEncoding::encode(&g, &clash).is_err());
    }

    #[test]
    fn serialization_round_trip_and_size_report() {
        for keep in [true, false] {
            let e = ShapedSlpEncoding::encode(
                &example_grammar(),
                &EncodeOptions {
                    keep_size_table: keep,
                    ..Default::default()
                },
            )
            .unwrap();
            let bytes = e.to_bytes();
            let report = e.size_report();
            assert_eq!(report.total, bytes.len() as u64);
            assert_eq!(
                report.header
                    + report.mphf
                    + report.groups
                    + report.size_table
                    + report.triples
                    + report.start,
                report.total
            );
            let back = ShapedSlpEncoding::from_bytes(&bytes).unwrap();
            assert_eq!(back, e);
            assert_eq!(back.to_bytes(), bytes);
            for cut in 0..bytes.len() {
                assert!(ShapedSlpEncoding::from_bytes(&bytes[..cut]).is_err());
            }
        }
    }

    #[test]
    fn corrupt_header_rejected() {
        let bytes = worked_example().to_bytes();
        let mut bad = bytes.clone();
        bad[3] = b'X';
        assert!(matches!(
            ShapedSlpEncoding::from_bytes(&bad),
            Err(Error::BadMagic { .. })
        ));
        let mut ver = bytes.clone();
        ver[4] = 9;
        assert!(matches!(
            ShapedSlpEncoding::from_bytes(&ver),
            Err(Error::UnsupportedVersion(9))
        ));
        let mut count = bytes;
        count[6 + 8] ^= 1; // r
        assert!(ShapedSlpEncoding::from_bytes(&count).is_err());
    }
}
