//! Bit-level building blocks: packed integer arrays, rank/select
//! bitvectors (dense and Elias–Fano sparse), and the minimal perfect hash
//! over expansion sizes.
//!
//! Every structure serializes as a one-byte tag followed by little-endian
//! u64 length fields and a packed payload of u64 words; see `FORMATS.md`.

mod bits;
mod elias_fano;
mod mphf;
mod plain;

pub use bits::{bits_for, BitBuffer, FixedWidthArray};
pub use elias_fano::EliasFano;
pub use mphf::SizeMphf;
pub use plain::PlainBitVector;

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

pub(crate) const TAG_BITS: u8 = 0x01;
pub(crate) const TAG_INT_ARRAY: u8 = 0x02;
pub(crate) const TAG_PLAIN_BV: u8 = 0x03;
pub(crate) const TAG_SPARSE_BV: u8 = 0x04;
pub(crate) const TAG_MPHF_PILOT: u8 = 0x05;
pub(crate) const TAG_MPHF_TABLE: u8 = 0x06;

/// Below this density (ones / length) a bitvector is stored Elias–Fano.
pub const SPARSE_DENSITY_DIVISOR: u64 = 16;

/// Bitvector with rank and select, stored plain or Elias–Fano depending on
/// density. Queries use 1-based positions: `rank1(i)` counts ones among the
/// first `i` bits and `select1(k)` is the 1-based position of the `k`-th one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankSelectBitVector {
    Plain(PlainBitVector),
    Sparse(EliasFano),
}

impl RankSelectBitVector {
    /// Builds from strictly increasing 0-based positions of the ones.
    pub fn from_ones(len: u64, ones: &[u64]) -> Self {
        if (ones.len() as u64) * SPARSE_DENSITY_DIVISOR < len {
            Self::Sparse(EliasFano::from_ones(len, ones))
        } else {
            Self::Plain(PlainBitVector::from_ones(len, ones))
        }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut len = 0u64;
        let mut ones = Vec::new();
        for b in bits {
            if b {
                ones.push(len);
            }
            len += 1;
        }
        Self::from_ones(len, &ones)
    }

    #[inline]
    pub fn len(&self) -> u64 {
        match self {
            Self::Plain(b) => b.len(),
            Self::Sparse(b) => b.len(),
        }
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn count_ones(&self) -> u64 {
        match self {
            Self::Plain(b) => b.count_ones(),
            Self::Sparse(b) => b.count_ones(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Self::Sparse(_))
    }

    /// Bit at 1-based position `i`.
    pub fn get(&self, i: u64) -> Result<bool> {
        if i == 0 || i > self.len() {
            return Err(Error::PositionOutOfRange {
                pos: i,
                len: self.len(),
            });
        }
        Ok(match self {
            Self::Plain(b) => b.get(i - 1),
            Self::Sparse(b) => b.get(i - 1),
        })
    }

    pub fn rank1(&self, i: u64) -> Result<u64> {
        if i > self.len() {
            return Err(Error::PositionOutOfRange {
                pos: i,
                len: self.len(),
            });
        }
        Ok(self.rank1_unchecked(i))
    }

    pub fn select1(&self, k: u64) -> Result<u64> {
        if k == 0 || k > self.count_ones() {
            return Err(Error::PositionOutOfRange {
                pos: k,
                len: self.count_ones(),
            });
        }
        Ok(self.select1_unchecked(k))
    }

    #[inline]
    pub(crate) fn rank1_unchecked(&self, i: u64) -> u64 {
        match self {
            Self::Plain(b) => b.rank1(i),
            Self::Sparse(b) => b.rank1(i),
        }
    }

    /// `select1_unchecked(0) == 0` by convention.
    #[inline]
    pub(crate) fn select1_unchecked(&self, k: u64) -> u64 {
        if k == 0 {
            return 0;
        }
        1 + match self {
            Self::Plain(b) => b.select1(k - 1),
            Self::Sparse(b) => b.select1(k - 1),
        }
    }

    pub fn serialized_len(&self) -> usize {
        match self {
            Self::Plain(b) => b.serialized_len(),
            Self::Sparse(b) => b.serialized_len(),
        }
    }

    pub fn write(&self, w: &mut Writer) {
        match self {
            Self::Plain(b) => b.write(w),
            Self::Sparse(b) => b.write(w),
        }
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        match r.u8()? {
            TAG_PLAIN_BV => Ok(Self::Plain(PlainBitVector::read_body(r)?)),
            TAG_SPARSE_BV => Ok(Self::Sparse(EliasFano::read_body(r)?)),
            t => Err(Error::Corrupt(format!("unknown bitvector tag {t:#04x}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn bits_of(s: &str) -> Vec<bool> {
        s.bytes().map(|b| b == b'1').collect()
    }

    #[test]
    fn worked_example_start_bitvector() {
        let bv = RankSelectBitVector::from_bits(bits_of("0000100110011000010011001"));
        assert_eq!(bv.len(), 25);
        assert_eq!(bv.count_ones(), 9);
        assert_eq!(bv.rank1(16).unwrap(), 5);
        assert_eq!(bv.select1(5).unwrap(), 13);
        assert_eq!(bv.select1(6).unwrap(), 18);
        assert_eq!(bv.rank1(0).unwrap(), 0);
    }

    #[test]
    fn select_first_of_leading_one() {
        let mut bits = vec![false; 100];
        bits[0] = true;
        let bv = RankSelectBitVector::from_bits(bits);
        assert!(bv.is_sparse());
        assert_eq!(bv.select1(1).unwrap(), 1);
    }

    #[test]
    fn out_of_range_queries_error() {
        let bv = RankSelectBitVector::from_bits(bits_of("0110"));
        assert!(bv.rank1(5).is_err());
        assert!(bv.select1(0).is_err());
        assert!(bv.select1(3).is_err());
        assert!(bv.get(0).is_err());
    }

    fn check_against_scan(bits: &[bool]) {
        let bv = RankSelectBitVector::from_bits(bits.iter().copied());
        let mut rank = 0u64;
        let mut selects = Vec::new();
        assert_eq!(bv.rank1(0).unwrap(), 0);
        for (p, &b) in bits.iter().enumerate() {
            if b {
                rank += 1;
                selects.push(p as u64 + 1);
            }
            assert_eq!(bv.rank1(p as u64 + 1).unwrap(), rank);
            assert_eq!(bv.get(p as u64 + 1).unwrap(), b);
        }
        for (k, &pos) in selects.iter().enumerate() {
            assert_eq!(bv.select1(k as u64 + 1).unwrap(), pos);
        }
        let mut w = Writer::new();
        bv.write(&mut w);
        let bytes = w.into_inner();
        assert_eq!(bytes.len(), bv.serialized_len());
        let back = RankSelectBitVector::read(&mut Reader::new(&bytes)).unwrap();
        assert_eq!(back, bv);
    }

    #[test]
    fn random_thousand_bit_vectors_match_scan() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for density in [0.5, 0.1, 0.01, 0.001] {
            for _ in 0..20 {
                let bits: Vec<bool> = (0..1000).map(|_| rng.random_bool(density)).collect();
                check_against_scan(&bits);
            }
        }
    }

    #[test]
    fn sparse_space_bound() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let m = 1_000_000u64;
        let mut ones: Vec<u64> = (0..1000).map(|_| rng.random_range(0..m)).collect();
        ones.sort_unstable();
        ones.dedup();
        let bv = RankSelectBitVector::from_ones(m, &ones);
        assert!(bv.is_sparse());
        let c = ones.len() as u64;
        let ceil_log2 = bits_for(m.div_ceil(c) - 1) as u64;
        let bound_bits = c * (2 + ceil_log2);
        let actual_bits = bv.serialized_len() as u64 * 8;
        assert!(
            actual_bits <= 2 * bound_bits + 1024,
            "{actual_bits} bits vs bound {bound_bits}"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rank_select_identities(bits in prop::collection::vec(prop::bool::weighted(0.3), 0..3000)) {
            let bv = RankSelectBitVector::from_bits(bits.iter().copied());
            let c = bv.count_ones();
            prop_assert_eq!(bv.rank1(bv.len()).unwrap(), c);
            for k in 1..=c {
                prop_assert_eq!(bv.rank1(bv.select1(k).unwrap()).unwrap(), k);
            }
            for i in 1..=bv.len() {
                let r = bv.rank1(i).unwrap();
                if r >= 1 {
                    prop_assert!(bv.select1(r).unwrap() <= i);
                }
            }
        }
    }
}
