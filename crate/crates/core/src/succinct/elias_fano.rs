//! Elias–Fano encoding of a sparse bitvector (the positions of its ones).
//!
//! For `c` ones in a universe of `m` bits, each position is split into
//! `low_width = floor(log2(m / c))` low bits, stored verbatim, and a high
//! part stored in unary in a plain bitvector of `c + (m >> low_width) + 1`
//! bits. Space is about `c * (2 + log2(m / c))` bits.

use crate::codec::{Reader, Writer};
use crate::error::Result;

use super::bits::{bits_for, corrupt, expect_tag, BitBuffer};
use super::plain::PlainBitVector;
use super::TAG_SPARSE_BV;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliasFano {
    len: u64,
    ones: u64,
    low_width: u32,
    low: BitBuffer,
    high: PlainBitVector,
}

fn low_width_for(len: u64, ones: u64) -> u32 {
    if ones == 0 || len <= ones {
        0
    } else {
        bits_for(len / ones) - 1
    }
}

fn high_len(len: u64, ones: u64, low_width: u32) -> u64 {
    ones + (len >> low_width) + 1
}

impl EliasFano {
    /// `ones` must be strictly increasing 0-based positions below `len`.
    pub fn from_ones(len: u64, ones: &[u64]) -> Self {
        let c = ones.len() as u64;
        let low_width = low_width_for(len, c);
        let mut low = BitBuffer::with_len(c * low_width as u64);
        let mut high = BitBuffer::with_len(high_len(len, c, low_width));
        let low_mask = if low_width == 0 {
            0
        } else {
            (1u64 << low_width) - 1
        };
        for (k, &p) in ones.iter().enumerate() {
            debug_assert!(p < len);
            debug_assert!(k == 0 || ones[k - 1] < p);
            low.set_bits(k as u64 * low_width as u64, low_width, p & low_mask);
            high.set((p >> low_width) + k as u64, true);
        }
        Self {
            len,
            ones: c,
            low_width,
            low,
            high: PlainBitVector::new(high),
        }
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn count_ones(&self) -> u64 {
        self.ones
    }

    #[inline]
    fn low_at(&self, k: u64) -> u64 {
        self.low.get_bits(k * self.low_width as u64, self.low_width)
    }

    /// Position of the `k`-th one, `k` 0-based.
    #[inline]
    pub fn select1(&self, k: u64) -> u64 {
        debug_assert!(k < self.ones);
        ((self.high.select1(k) - k) << self.low_width) | self.low_at(k)
    }

    /// Ones in positions `[0, i)`.
    pub fn rank1(&self, i: u64) -> u64 {
        debug_assert!(i <= self.len);
        if i >= self.len {
            return self.ones;
        }
        let bucket = i >> self.low_width;
        let target_low = i & ((1u64 << self.low_width) - 1);
        // first bit of `bucket` in the high bits, and elements before it
        let (mut pos, mut k) = if bucket == 0 {
            (0, 0)
        } else {
            let z = self.high.select0(bucket - 1);
            (z + 1, z + 1 - bucket)
        };
        while pos < self.high.len() && self.high.get(pos) && self.low_at(k) < target_low {
            pos += 1;
            k += 1;
        }
        k
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        self.rank1(i + 1) > self.rank1(i)
    }

    pub fn serialized_len(&self) -> usize {
        1 + 8 + 8 + 1 + 8 * self.low.words().len() + 8 * self.high.bits().words().len()
    }

    pub fn write(&self, w: &mut Writer) {
        w.u8(TAG_SPARSE_BV);
        w.u64(self.len);
        w.u64(self.ones);
        w.u8(self.low_width as u8);
        self.low.write_words(w);
        self.high.bits().write_words(w);
    }

    pub(crate) fn read_body(r: &mut Reader<'_>) -> Result<Self> {
        let len = r.u64()?;
        let ones = r.u64()?;
        let low_width = r.u8()? as u32;
        if ones > len || low_width != low_width_for(len, ones) {
            return Err(corrupt("inconsistent sparse bitvector header"));
        }
        let low = BitBuffer::read_words(r, ones * low_width as u64)?;
        let high = PlainBitVector::new(BitBuffer::read_words(r, high_len(len, ones, low_width))?);
        if high.count_ones() != ones {
            return Err(corrupt("sparse bitvector popcount mismatch"));
        }
        let ef = Self {
            len,
            ones,
            low_width,
            low,
            high,
        };
        if ones > 0 && ef.select1(ones - 1) >= len {
            return Err(corrupt("sparse bitvector position beyond length"));
        }
        Ok(ef)
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        expect_tag(r, TAG_SPARSE_BV)?;
        Self::read_body(r)
    }
}
