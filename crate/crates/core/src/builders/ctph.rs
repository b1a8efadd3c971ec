//! Context-triggered piecewise hashing: cut the text wherever the
//! Karp–Rabin hash of the trailing `window` bytes is 0 modulo `modulus`,
//! then build one grammar for the phrase dictionary and one for the parse
//! and splice them together.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::grammar::{alphabet_of, Rule, Slp, SymbolId};

use super::repair::RePair;

/// Karp–Rabin hashes are taken modulo the Mersenne prime 2^61 - 1.
pub const KR_PRIME: u64 = (1 << 61) - 1;
pub const KR_BASE: u64 = 256 + 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CtphParams {
    pub window: usize,
    pub modulus: u64,
}

impl Default for CtphParams {
    fn default() -> Self {
        Self {
            window: 16,
            modulus: 64,
        }
    }
}

impl CtphParams {
    pub fn new(window: usize, modulus: u64) -> Result<Self> {
        let p = Self { window, modulus };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if self.window < 1 {
            return Err(Error::InvalidArgument("window must be at least 1".into()));
        }
        if self.modulus < 2 {
            return Err(Error::InvalidArgument("modulus must be at least 2".into()));
        }
        Ok(())
    }
}

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let lo = (p as u64) & KR_PRIME;
    let hi = (p >> 61) as u64;
    let s = lo + hi;
    if s >= KR_PRIME {
        s - KR_PRIME
    } else {
        s
    }
}

#[inline]
fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= KR_PRIME {
        s - KR_PRIME
    } else {
        s
    }
}

/// Karp–Rabin hash of `bytes`: `sum bytes[i] * BASE^(len-1-i) mod PRIME`.
pub fn karp_rabin(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(0, |h, &b| add_mod(mul_mod(h, KR_BASE), b as u64))
}

/// 0-based end positions (inclusive) of windows whose hash triggers a cut.
/// The window ending at `t` covers `text[t + 1 - window ..= t]`.
pub fn trigger_positions(text: &[u8], params: &CtphParams) -> Vec<usize> {
    let w = params.window;
    if text.len() < w {
        return Vec::new();
    }
    // BASE^(w-1), the weight of the byte leaving the window
    let top = (1..w).fold(1, |acc, _| mul_mod(acc, KR_BASE));
    let mut h = karp_rabin(&text[..w]);
    let mut out = Vec::new();
    for t in w - 1..text.len() {
        if t >= w {
            let out_byte = text[t - w] as u64;
            h = add_mod(h, KR_PRIME - mul_mod(out_byte, top));
            h = add_mod(mul_mod(h, KR_BASE), text[t] as u64);
        }
        if h.is_multiple_of(params.modulus) {
            out.push(t);
        }
    }
    out
}

/// A text cut into phrases: the distinct phrases in order of first
/// appearance, and the text as a sequence of phrase indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parse {
    pub dictionary: Vec<Vec<u8>>,
    pub parse: Vec<usize>,
}

impl Parse {
    pub fn expand(&self) -> Vec<u8> {
        self.parse
            .iter()
            .flat_map(|&p| self.dictionary[p].iter().copied())
            .collect()
    }
}

/// Cuts `text` after every triggering window end; the last phrase ends
/// with the text.
pub fn ctph_parse(text: &[u8], params: &CtphParams) -> Result<Parse> {
    params.check()?;
    if text.is_empty() {
        return Err(Error::InvalidArgument("cannot parse an empty text".into()));
    }
    let mut cuts: Vec<usize> = trigger_positions(text, params)
        .into_iter()
        .map(|t| t + 1)
        .filter(|&end| end < text.len())
        .collect();
    cuts.push(text.len());

    let mut ids: HashMap<&[u8], usize> = HashMap::new();
    let mut dictionary = Vec::new();
    let mut parse = Vec::with_capacity(cuts.len());
    let mut begin = 0;
    for end in cuts {
        let phrase = &text[begin..end];
        let fresh = ids.len();
        let id = *ids.entry(phrase).or_insert(fresh);
        if id == fresh {
            dictionary.push(phrase.to_vec());
        }
        parse.push(id);
        begin = end;
    }
    Ok(Parse { dictionary, parse })
}

/// Builds an SLP through the CTPH parse.
///
/// The dictionary is compressed by RePair as a forest, so no rule spans two
/// phrases, and each phrase's leftover symbols are folded left to right
/// into a single root. The parse is compressed by RePair over phrase ids,
/// and each phrase id in that grammar is then replaced by its root.
pub fn build_via_ctph(text: &[u8], params: &CtphParams) -> Result<Slp> {
    let parsed = ctph_parse(text, params)?;
    let alphabet = alphabet_of(text);
    let sigma = alphabet.len() as u32;
    let mut code = [0u32; 256];
    for (i, &b) in alphabet.iter().enumerate() {
        code[b as usize] = i as u32;
    }

    let phrases: Vec<Vec<u32>> = parsed
        .dictionary
        .iter()
        .map(|p| p.iter().map(|&b| code[b as usize]).collect())
        .collect();
    let mut dict = RePair::new(&phrases, sigma)?;
    dict.run()?;

    let mut rules: Vec<Rule> = dict
        .rules()
        .iter()
        .map(|&(l, r)| Rule::new(l as u64, r as u64))
        .collect();
    let mut existing: HashMap<(u64, u64), u64> = rules
        .iter()
        .enumerate()
        .map(|(k, r)| ((r.left.0, r.right.0), sigma as u64 + k as u64))
        .collect();
    let mut roots = Vec::with_capacity(phrases.len());
    for s in 0..phrases.len() {
        let residual = dict.segment(s);
        let mut acc = residual[0] as u64;
        for &x in &residual[1..] {
            let rhs = (acc, x as u64);
            acc = match existing.get(&rhs) {
                Some(&id) => id,
                None => {
                    let id = sigma as u64 + rules.len() as u64;
                    rules.push(Rule::new(rhs.0, rhs.1));
                    existing.insert(rhs, id);
                    id
                }
            };
        }
        roots.push(acc);
    }

    let num_phrases = parsed.dictionary.len() as u32;
    let parse_seq: Vec<u32> = parsed.parse.iter().map(|&p| p as u32).collect();
    let mut top = RePair::new(&[parse_seq], num_phrases)?;
    top.run()?;

    let offset = sigma as u64 + rules.len() as u64;
    let splice = |x: u32| -> u64 {
        if x < num_phrases {
            roots[x as usize]
        } else {
            offset + (x - num_phrases) as u64
        }
    };
    for &(l, r) in top.rules() {
        rules.push(Rule::new(splice(l), splice(r)));
    }
    let start = top
        .segment(0)
        .into_iter()
        .map(|x| SymbolId(splice(x)))
        .collect();
    Slp::new(alphabet, rules, start)
}
