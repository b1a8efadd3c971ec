//! Packed bit storage and fixed-width integer arrays.

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};

use super::{TAG_BITS, TAG_INT_ARRAY};

/// Number of bits needed to write `v` in binary (0 for 0).
#[inline]
pub fn bits_for(v: u64) -> u32 {
    64 - v.leading_zeros()
}

#[inline]
fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[inline]
fn words_for(bits: u64) -> usize {
    bits.div_ceil(64) as usize
}

/// Append-only bit sequence; bit `i` lives in bit `i % 64` of word `i / 64`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitBuffer {
    words: Vec<u64>,
    len: u64,
}

impl BitBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_len(len: u64) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn from_words(words: Vec<u64>, len: u64) -> Self {
        debug_assert!(words.len() == words_for(len));
        Self { words, len }
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
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, pos: u64) -> bool {
        debug_assert!(pos < self.len);
        (self.words[(pos / 64) as usize] >> (pos % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: u64, bit: bool) {
        debug_assert!(pos < self.len);
        let w = &mut self.words[(pos / 64) as usize];
        if bit {
            *w |= 1 << (pos % 64);
        } else {
            *w &= !(1 << (pos % 64));
        }
    }

    pub fn push(&mut self, bit: bool) {
        self.push_bits(bit as u64, 1);
    }

    /// Reads `width` (≤ 64) bits starting at `pos`.
    #[inline]
    pub fn get_bits(&self, pos: u64, width: u32) -> u64 {
        if width == 0 {
            return 0;
        }
        debug_assert!(pos + width as u64 <= self.len);
        let word = (pos / 64) as usize;
        let shift = (pos % 64) as u32;
        let lo = self.words[word] >> shift;
        let v = if shift + width > 64 {
            lo | (self.words[word + 1] << (64 - shift))
        } else {
            lo
        };
        v & mask(width)
    }

    pub fn set_bits(&mut self, pos: u64, width: u32, value: u64) {
        if width == 0 {
            return;
        }
        debug_assert!(pos + width as u64 <= self.len);
        debug_assert!(value <= mask(width));
        let word = (pos / 64) as usize;
        let shift = (pos % 64) as u32;
        let m = mask(width);
        self.words[word] = (self.words[word] & !(m << shift)) | (value << shift);
        if shift + width > 64 {
            let spill = 64 - shift;
            let hi_mask = m >> spill;
            self.words[word + 1] = (self.words[word + 1] & !hi_mask) | (value >> spill);
        }
    }

    pub fn push_bits(&mut self, value: u64, width: u32) {
        if width == 0 {
            return;
        }
        let pos = self.len;
        self.len += width as u64;
        self.words.resize(words_for(self.len), 0);
        self.set_bits(pos, width, value);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn serialized_len(&self) -> usize {
        1 + 8 + 8 * self.words.len()
    }

    pub fn write(&self, w: &mut Writer) {
        w.u8(TAG_BITS);
        w.u64(self.len);
        self.write_words(w);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        expect_tag(r, TAG_BITS)?;
        let len = r.u64()?;
        Self::read_words(r, len)
    }

    pub(crate) fn write_words(&self, w: &mut Writer) {
        for &word in &self.words {
            w.u64(word);
        }
    }

    pub(crate) fn read_words(r: &mut Reader<'_>, len: u64) -> Result<Self> {
        let n = words_for(len);
        let raw = r.take(
            n.checked_mul(8)
                .ok_or_else(|| corrupt("bit length overflow"))?,
        )?;
        let words: Vec<u64> = raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last() {
                if last >> (len % 64) != 0 {
                    return Err(corrupt("nonzero padding bits"));
                }
            }
        }
        Ok(Self { words, len })
    }
}

pub(crate) fn expect_tag(r: &mut Reader<'_>, tag: u8) -> Result<()> {
    let found = r.u8()?;
    if found != tag {
        return Err(Error::Corrupt(format!(
            "expected structure tag {tag:#04x}, found {found:#04x}"
        )));
    }
    Ok(())
}

pub(crate) fn corrupt(msg: &str) -> Error {
    Error::Corrupt(msg.to_string())
}

/// Array of `len` unsigned integers, each stored in exactly `width` bits.
///
/// A width of 0 is legal: nothing is stored and every element reads as 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FixedWidthArray {
    bits: BitBuffer,
    len: usize,
    width: u32,
}

impl FixedWidthArray {
    pub fn new(len: usize, width: u32) -> Self {
        assert!(width <= 64, "width {width} exceeds 64");
        Self {
            bits: BitBuffer::with_len(len as u64 * width as u64),
            len,
            width,
        }
    }

    /// Packs `values` at the smallest width that holds their maximum.
    pub fn from_values(values: &[u64]) -> Self {
        let width = bits_for(values.iter().copied().max().unwrap_or(0));
        Self::from_values_with_width(values, width)
    }

    pub fn from_values_with_width(values: &[u64], width: u32) -> Self {
        let mut a = Self::new(values.len(), width);
        for (i, &v) in values.iter().enumerate() {
            a.set(i, v);
        }
        a
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        assert!(
            i < self.len,
            "index {i} out of bounds for length {}",
            self.len
        );
        self.bits.get_bits(i as u64 * self.width as u64, self.width)
    }

    /// Panics when `v` does not fit in the array's width.
    pub fn set(&mut self, i: usize, v: u64) {
        assert!(
            i < self.len,
            "index {i} out of bounds for length {}",
            self.len
        );
        assert!(
            v <= mask(self.width),
            "value {v} does not fit in {} bits",
            self.width
        );
        self.bits
            .set_bits(i as u64 * self.width as u64, self.width, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn serialized_len(&self) -> usize {
        1 + 8 + 1 + 8 * self.bits.words().len()
    }

    pub fn write(&self, w: &mut Writer) {
        w.u8(TAG_INT_ARRAY);
        w.u64(self.len as u64);
        w.u8(self.width as u8);
        self.bits.write_words(w);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        expect_tag(r, TAG_INT_ARRAY)?;
        let len = r.u64()?;
        let width = r.u8()? as u32;
        if width > 64 {
            return Err(corrupt("array width above 64"));
        }
        let total = len
            .checked_mul(width as u64)
            .ok_or_else(|| corrupt("array size overflow"))?;
        let bits = BitBuffer::read_words(r, total)?;
        let len = usize::try_from(len).map_err(|_| corrupt("array too long"))?;
        Ok(Self { bits, len, width })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn width_zero_stores_nothing() {
        let mut a = FixedWidthArray::new(10, 0);
        a.set(3, 0);
        assert_eq!(a.get(3), 0);
        assert_eq!(a.bits.words().len(), 0);
    }

    #[test]
    fn width_64_round_trips_extremes() {
        let mut a = FixedWidthArray::new(3, 64);
        a.set(0, u64::MAX);
        a.set(1, 0);
        a.set(2, 0x8000_0000_0000_0001);
        assert_eq!(a.to_vec(), vec![u64::MAX, 0, 0x8000_0000_0000_0001]);
    }

    #[test]
    #[should_panic]
    fn value_too_wide_panics() {
        FixedWidthArray::new(1, 3).set(0, 8);
    }

    #[test]
    fn bits_for_edges() {
        assert_eq!(bits_for(0), 0);
        assert_eq!(bits_for(1), 1);
        assert_eq!(bits_for(9), 4);
        assert_eq!(bits_for(u64::MAX), 64);
    }

    #[test]
    fn serialization_rejects_truncation() {
        let a = FixedWidthArray::from_values(&[1, 2, 3, 1000]);
        let mut w = Writer::new();
        a.write(&mut w);
        let bytes = w.into_inner();
        assert_eq!(bytes.len(), a.serialized_len());
        for cut in 0..bytes.len() {
            assert!(FixedWidthArray::read(&mut Reader::new(&bytes[..cut])).is_err());
        }
        let back = FixedWidthArray::read(&mut Reader::new(&bytes)).unwrap();
        assert_eq!(back, a);
    }

    proptest! {
        #[test]
        fn set_then_get(width in 0u32..=64, raw in prop::collection::vec(any::<u64>(), 0..200)) {
            let values: Vec<u64> = raw.iter().map(|v| v & mask(width)).map(|v| if width == 0 { 0 } else { v }).collect();
            let mut a = FixedWidthArray::new(values.len(), width);
            for (i, &v) in values.iter().enumerate() {
                a.set(i, v);
                prop_assert_eq!(a.get(i), v);
            }
            prop_assert_eq!(a.to_vec(), values);
        }

        #[test]
        fn overwrite_leaves_neighbours(width in 1u32..=64, len in 3usize..100, idx in 0usize..100, v in any::<u64>()) {
            let idx = idx % len;
            let mut a = FixedWidthArray::new(len, width);
            for i in 0..len { a.set(i, mask(width)); }
            a.set(idx, v & mask(width) & !1);
            for i in 0..len {
                let expect = if i == idx { v & mask(width) & !1 } else { mask(width) };
                prop_assert_eq!(a.get(i), expect);
            }
        }
    }
}
