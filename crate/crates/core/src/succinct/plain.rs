//! Uncompressed bitvector with constant-time rank and sampled select.
//!
//! Positions are 0-based here; the 1-based query convention lives in
//! [`super::RankSelectBitVector`].

use crate::codec::{Reader, Writer};
use crate::error::Result;

use super::bits::{corrupt, expect_tag, BitBuffer};
use super::TAG_PLAIN_BV;

const WORDS_PER_BLOCK: usize = 8;
const BLOCK_BITS: u64 = 64 * WORDS_PER_BLOCK as u64;
const SELECT_SAMPLE: u64 = 512;

/// Index of the `k`-th (0-based) set bit of `w`.
#[inline]
pub(crate) fn select_in_word(w: u64, mut k: u32) -> u32 {
    debug_assert!(k < w.count_ones());
    let mut shift = 0;
    loop {
        let byte = ((w >> shift) & 0xff) as u32;
        let c = byte.count_ones();
        if k < c {
            let mut b = byte;
            for _ in 0..k {
                b &= b - 1;
            }
            return shift + b.trailing_zeros();
        }
        k -= c;
        shift += 8;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlainBitVector {
    bits: BitBuffer,
    ones: u64,
    /// Ones before each block of `WORDS_PER_BLOCK` words, plus a final total.
    block_ranks: Vec<u64>,
    /// Block holding the (j * SELECT_SAMPLE)-th one / zero.
    select1_hints: Vec<u32>,
    select0_hints: Vec<u32>,
}

impl PlainBitVector {
    pub fn new(bits: BitBuffer) -> Self {
        let words = bits.words();
        let nblocks = words.len().div_ceil(WORDS_PER_BLOCK);
        let mut block_ranks = Vec::with_capacity(nblocks + 1);
        let mut acc = 0u64;
        for b in 0..nblocks {
            block_ranks.push(acc);
            let end = ((b + 1) * WORDS_PER_BLOCK).min(words.len());
            acc += words[b * WORDS_PER_BLOCK..end]
                .iter()
                .map(|w| w.count_ones() as u64)
                .sum::<u64>();
        }
        block_ranks.push(acc);
        let len = bits.len();
        let mut select1_hints = Vec::new();
        let mut select0_hints = Vec::new();
        for b in 0..nblocks {
            let (lo, hi) = (block_ranks[b], block_ranks[b + 1]);
            while (select1_hints.len() as u64) * SELECT_SAMPLE < hi
                && (select1_hints.len() as u64) * SELECT_SAMPLE >= lo
            {
                select1_hints.push(b as u32);
            }
            let zlo = b as u64 * BLOCK_BITS - lo;
            let zhi = ((b as u64 + 1) * BLOCK_BITS).min(len) - hi;
            while (select0_hints.len() as u64) * SELECT_SAMPLE < zhi
                && (select0_hints.len() as u64) * SELECT_SAMPLE >= zlo
            {
                select0_hints.push(b as u32);
            }
        }
        Self {
            ones: acc,
            bits,
            block_ranks,
            select1_hints,
            select0_hints,
        }
    }

    pub fn from_ones(len: u64, ones: &[u64]) -> Self {
        let mut bits = BitBuffer::with_len(len);
        for &p in ones {
            bits.set(p, true);
        }
        Self::new(bits)
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn count_ones(&self) -> u64 {
        self.ones
    }

    #[inline]
    pub fn get(&self, pos: u64) -> bool {
        self.bits.get(pos)
    }

    pub fn bits(&self) -> &BitBuffer {
        &self.bits
    }

    /// Ones in positions `[0, i)`.
    #[inline]
    pub fn rank1(&self, i: u64) -> u64 {
        debug_assert!(i <= self.len());
        let word = (i / 64) as usize;
        let block = word / WORDS_PER_BLOCK;
        let words = self.bits.words();
        let mut r = self.block_ranks[block];
        for w in &words[block * WORDS_PER_BLOCK..word] {
            r += w.count_ones() as u64;
        }
        let rem = i % 64;
        if rem != 0 {
            r += (words[word] & ((1u64 << rem) - 1)).count_ones() as u64;
        }
        r
    }

    #[inline]
    pub fn rank0(&self, i: u64) -> u64 {
        i - self.rank1(i)
    }

    /// Position of the `k`-th one, `k` 0-based.
    pub fn select1(&self, k: u64) -> u64 {
        debug_assert!(k < self.ones);
        let h = (k / SELECT_SAMPLE) as usize;
        let mut lo = self.select1_hints[h] as usize;
        let mut hi = self
            .select1_hints
            .get(h + 1)
            .map_or(self.block_ranks.len() - 1, |&b| b as usize + 1);
        // last block with block_ranks[b] <= k
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.block_ranks[mid] <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let words = self.bits.words();
        let mut rem = k - self.block_ranks[lo];
        let mut word = lo * WORDS_PER_BLOCK;
        loop {
            let c = words[word].count_ones() as u64;
            if rem < c {
                return word as u64 * 64 + select_in_word(words[word], rem as u32) as u64;
            }
            rem -= c;
            word += 1;
        }
    }

    /// Position of the `k`-th zero, `k` 0-based.
    pub fn select0(&self, k: u64) -> u64 {
        debug_assert!(k < self.len() - self.ones);
        let zeros_before = |b: usize| b as u64 * BLOCK_BITS - self.block_ranks[b];
        let h = (k / SELECT_SAMPLE) as usize;
        let mut lo = self.select0_hints[h] as usize;
        let mut hi = self
            .select0_hints
            .get(h + 1)
            .map_or(self.block_ranks.len() - 1, |&b| b as usize + 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if zeros_before(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let words = self.bits.words();
        let mut rem = k - zeros_before(lo);
        let mut word = lo * WORDS_PER_BLOCK;
        loop {
            let inv = !words[word];
            let c = inv.count_ones() as u64;
            if rem < c {
                return word as u64 * 64 + select_in_word(inv, rem as u32) as u64;
            }
            rem -= c;
            word += 1;
        }
    }

    pub fn serialized_len(&self) -> usize {
        1 + 8 + 8 + 8 * self.bits.words().len()
    }

    pub fn write(&self, w: &mut Writer) {
        w.u8(TAG_PLAIN_BV);
        w.u64(self.len());
        w.u64(self.ones);
        self.bits.write_words(w);
    }

    /// Reads the body after the tag byte.
    pub(crate) fn read_body(r: &mut Reader<'_>) -> Result<Self> {
        let len = r.u64()?;
        let ones = r.u64()?;
        let bv = Self::new(BitBuffer::read_words(r, len)?);
        if bv.ones != ones {
            return Err(corrupt("plain bitvector popcount mismatch"));
        }
        Ok(bv)
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        expect_tag(r, TAG_PLAIN_BV)?;
        Self::read_body(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_in_word_matches_scan() {
        let w =
            0b1011_0000_0000_0001_0000_0000_1000_0000_0000_0000_0000_0000_0000_0000_0000_0110u64;
        let positions: Vec<u32> = (0..64).filter(|b| (w >> b) & 1 == 1).collect();
        for (k, &p) in positions.iter().enumerate() {
            assert_eq!(select_in_word(w, k as u32), p);
        }
    }

    #[test]
    fn all_zero_and_all_one() {
        let z = PlainBitVector::new(BitBuffer::with_len(1000));
        assert_eq!(z.rank1(1000), 0);
        assert_eq!(z.select0(999), 999);
        let ones: Vec<u64> = (0..1000).collect();
        let o = PlainBitVector::from_ones(1000, &ones);
        assert_eq!(o.rank1(1000), 1000);
        assert_eq!(o.select1(777), 777);
    }
}
