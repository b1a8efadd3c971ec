//! Baseline SLP encoding: right-hand sides and expansion lengths in
//! fixed-width arrays indexed by rule.
//!
//! Symbol ids are stored at `bits_for(r + sigma - 1)` bits and lengths at
//! `bits_for(n)` bits. The start rule is kept as its symbols plus the
//! cumulative end positions, searched by binary search.

use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::grammar::Slp;
use crate::succinct::{bits_for, FixedWidthArray};
use crate::{check_position, check_range, TextAccess};

pub const NAIVE_MAGIC: &[u8; 4] = b"NSLP";
pub const NAIVE_VERSION: u16 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveSlpEncoding {
    n: u64,
    alphabet: Vec<u8>,
    rhs: FixedWidthArray,
    lengths: FixedWidthArray,
    start_symbols: FixedWidthArray,
    start_ends: FixedWidthArray,
}

impl NaiveSlpEncoding {
    pub fn encode(slp: &Slp) -> Self {
        let sigma = slp.sigma();
        let r = slp.num_rules();
        let n = slp.text_length();
        let symbol_width = bits_for(r + sigma - 1);
        let length_width = bits_for(n);
        let lengths = slp.expansion_lengths();

        let rhs: Vec<u64> = slp
            .rules()
            .iter()
            .flat_map(|rule| [rule.left.0, rule.right.0])
            .collect();
        let start: Vec<u64> = slp.start().iter().map(|x| x.0).collect();
        let ends: Vec<u64> = slp
            .start()
            .iter()
            .scan(0, |acc, &x| {
                *acc += slp.symbol_length(&lengths, x);
                Some(*acc)
            })
            .collect();

        Self {
            n,
            alphabet: slp.alphabet().to_vec(),
            rhs: FixedWidthArray::from_values_with_width(&rhs, symbol_width),
            lengths: FixedWidthArray::from_values_with_width(&lengths, length_width),
            start_symbols: FixedWidthArray::from_values_with_width(&start, symbol_width),
            start_ends: FixedWidthArray::from_values_with_width(&ends, length_width),
        }
    }

    pub fn sigma(&self) -> u64 {
        self.alphabet.len() as u64
    }

    pub fn num_rules(&self) -> u64 {
        self.lengths.len() as u64
    }

    pub fn symbol_width(&self) -> u32 {
        self.rhs.width()
    }

    pub fn length_width(&self) -> u32 {
        self.lengths.width()
    }

    #[inline]
    fn len_of(&self, x: u64) -> u64 {
        let sigma = self.sigma();
        if x < sigma {
            1
        } else {
            self.lengths.get((x - sigma) as usize)
        }
    }

    /// Index of the start symbol covering position `i`, and the end of the
    /// preceding symbol.
    #[inline]
    fn locate(&self, i: u64) -> (usize, u64) {
        let (mut lo, mut hi) = (0, self.start_ends.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.start_ends.get(mid) < i {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let before = if lo == 0 {
            0
        } else {
            self.start_ends.get(lo - 1)
        };
        (lo, before)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(NAIVE_MAGIC);
        w.u16(NAIVE_VERSION);
        w.u64(self.sigma());
        w.u64(self.n);
        w.bytes(&self.alphabet);
        self.rhs.write(&mut w);
        self.lengths.write(&mut w);
        self.start_symbols.write(&mut w);
        self.start_ends.write(&mut w);
        w.into_inner()
    }

    pub fn serialized_len(&self) -> usize {
        4 + 2
            + 16
            + self.alphabet.len()
            + self.rhs.serialized_len()
            + self.lengths.serialized_len()
            + self.start_symbols.serialized_len()
            + self.start_ends.serialized_len()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        r.magic(NAIVE_MAGIC)?;
        let version = r.u16()?;
        if version != NAIVE_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let sigma = r.u64()?;
        let n = r.u64()?;
        if sigma == 0 || sigma > 256 {
            return Err(Error::Corrupt(format!("alphabet size {sigma}")));
        }
        let alphabet = r.take(sigma as usize)?.to_vec();
        let rhs = FixedWidthArray::read(&mut r)?;
        let lengths = FixedWidthArray::read(&mut r)?;
        let start_symbols = FixedWidthArray::read(&mut r)?;
        let start_ends = FixedWidthArray::read(&mut r)?;
        r.finish()?;

        let enc = Self {
            n,
            alphabet,
            rhs,
            lengths,
            start_symbols,
            start_ends,
        };
        enc.check().map_err(Error::Corrupt)?;
        Ok(enc)
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.alphabet.windows(2).any(|w| w[0] >= w[1]) {
            return Err("alphabet not ascending".into());
        }
        let sigma = self.sigma();
        let r = self.num_rules();
        if self.rhs.len() as u64 != 2 * r {
            return Err("rule arrays disagree".into());
        }
        let s = self.start_symbols.len();
        if s == 0 || self.start_ends.len() != s || self.start_ends.get(s - 1) != self.n {
            return Err("start arrays disagree with text length".into());
        }
        for k in 0..r as usize {
            let (a, b) = (self.rhs.get(2 * k), self.rhs.get(2 * k + 1));
            // with positive lengths, consistent sums also rule out cycles
            if a >= sigma + r || b >= sigma + r {
                return Err(format!("rule {k} refers past the last rule"));
            }
            if self.len_of(a).checked_add(self.len_of(b)) != Some(self.lengths.get(k)) {
                return Err(format!("rule {k} has inconsistent length"));
            }
        }
        let mut prev = 0;
        for k in 0..s {
            let x = self.start_symbols.get(k);
            let end = self.start_ends.get(k);
            if x >= sigma + r || prev + self.len_of(x) != end {
                return Err(format!("start symbol {k} is inconsistent"));
            }
            prev = end;
        }
        Ok(())
    }
}

impl TextAccess for NaiveSlpEncoding {
    fn text_len(&self) -> u64 {
        self.n
    }

    fn access(&self, i: u64) -> Result<u8> {
        check_position(i, self.n)?;
        let sigma = self.sigma();
        let (k, before) = self.locate(i);
        let mut x = self.start_symbols.get(k);
        let mut j = i - before;
        while x >= sigma {
            let rule = (x - sigma) as usize;
            let left = self.rhs.get(2 * rule);
            let ls = self.len_of(left);
            if j <= ls {
                x = left;
            } else {
                j -= ls;
                x = self.rhs.get(2 * rule + 1);
            }
        }
        Ok(self.alphabet[x as usize])
    }

    fn extract_into(&self, i: u64, len: u64, out: &mut Vec<u8>) -> Result<()> {
        check_range(i, len, self.n)?;
        if len == 0 {
            return Ok(());
        }
        out.reserve(len as usize);
        let sigma = self.sigma();
        let (mut k, before) = self.locate(i);
        let mut x = self.start_symbols.get(k);
        let mut j = i - before;
        let mut pending: Vec<u64> = Vec::with_capacity(64);
        let mut remaining = len;
        loop {
            while x >= sigma {
                let rule = (x - sigma) as usize;
                let left = self.rhs.get(2 * rule);
                let right = self.rhs.get(2 * rule + 1);
                let ls = self.len_of(left);
                if j <= ls {
                    pending.push(right);
                    x = left;
                } else {
                    j -= ls;
                    x = right;
                }
            }
            out.push(self.alphabet[x as usize]);
            remaining -= 1;
            if remaining == 0 {
                return Ok(());
            }
            j = 1;
            x = match pending.pop() {
                Some(y) => y,
                None => {
                    k += 1;
                    self.start_symbols.get(k)
                }
            };
        }
    }

    fn size_bytes(&self) -> u64 {
        self.serialized_len() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::example_grammar;

    #[test]
    fn worked_example_widths() {
        let e = NaiveSlpEncoding::encode(&example_grammar());
        assert_eq!(e.symbol_width(), 4);
        assert_eq!(e.length_width(), 5);
    }

    #[test]
    fn matches_oracle() {
        let g = example_grammar();
        let text = g.decompress();
        let e = NaiveSlpEncoding::encode(&g);
        for i in 1..=25 {
            assert_eq!(e.access(i).unwrap(), text[i as usize - 1]);
        }
        for i in 1..=25u64 {
            for len in 0..=(26 - i) {
                let want = &text[(i - 1) as usize..(i - 1 + len) as usize];
                assert_eq!(e.extract(i, len).unwrap(), want, "i={i} len={len}");
            }
        }
        assert!(e.access(0).is_err());
        assert!(e.access(26).is_err());
        assert!(e.extract(25, 2).is_err());
    }

    #[test]
    fn round_trip() {
        let e = NaiveSlpEncoding::encode(&example_grammar());
        let bytes = e.to_bytes();
        assert_eq!(bytes.len(), e.serialized_len());
        assert_eq!(NaiveSlpEncoding::from_bytes(&bytes).unwrap(), e);
        for cut in 0..bytes.len() {
            assert!(NaiveSlpEncoding::from_bytes(&bytes[..cut]).is_err());
        }
        let mut bad = bytes;
        bad[0] = b'S';
        assert!(matches!(
            NaiveSlpEncoding::from_bytes(&bad),
            Err(Error::BadMagic { .. })
        ));
    }

    #[test]
    fn rules_out_of_order() {
        // X = Y a defined before Y = a b
        let g = Slp::new(
            b"ab".to_vec(),
            vec![crate::Rule::new(3, 0), crate::Rule::new(0, 1)],
            vec![crate::SymbolId(2), crate::SymbolId(3)],
        )
        .unwrap();
        let e = NaiveSlpEncoding::encode(&g);
        let back = NaiveSlpEncoding::from_bytes(&e.to_bytes()).unwrap();
        assert_eq!(back.extract(1, 5).unwrap(), b"abaab");
    }

    #[test]
    fn terminals_only() {
        let g = Slp::from_terminals(b"zzy").unwrap();
        let e = NaiveSlpEncoding::encode(&g);
        assert_eq!(e.extract(1, 3).unwrap(), b"zzy");
    }
}
