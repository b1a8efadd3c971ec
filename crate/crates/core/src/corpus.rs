//! Synthetic repetitive corpora: one random base string, copied with
//! independent point mutations.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub const CORPUS_ALPHABET: &[u8; 5] = b"ACGTN";

/// `copies` concatenated copies of a random base of `base_len` characters
/// over `ACGTN`, where each character of each copy is independently
/// replaced, with probability `mutation_rate`, by a different letter.
pub fn gen_corpus(
    base_len: usize,
    copies: usize,
    mutation_rate: f64,
    seed: u64,
) -> Result<Vec<u8>> {
    if base_len == 0 || copies == 0 {
        return Err(Error::InvalidArgument(
            "base length and copy count must be at least 1".into(),
        ));
    }
    if !(0.0..1.0).contains(&mutation_rate) {
        return Err(Error::InvalidArgument(format!(
            "mutation rate {mutation_rate} outside [0, 1)"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let sigma = CORPUS_ALPHABET.len() as u64;
    let base: Vec<u8> = (0..base_len)
        .map(|_| CORPUS_ALPHABET[rng.below(sigma) as usize])
        .collect();
    let mut out = Vec::with_capacity(base_len * copies);
    for _ in 0..copies {
        for &b in &base {
            if mutation_rate > 0.0 && rng.unit() < mutation_rate {
                let cur = CORPUS_ALPHABET.iter().position(|&c| c == b).unwrap() as u64;
                let shift = 1 + rng.below(sigma - 1);
                out.push(CORPUS_ALPHABET[((cur + shift) % sigma) as usize]);
            } else {
                out.push(b);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_mutation_repeats_base() {
        let t = gen_corpus(100, 7, 0.0, 3).unwrap();
        assert_eq!(t.len(), 700);
        for c in 1..7 {
            assert_eq!(t[..100], t[c * 100..(c + 1) * 100]);
        }
    }

    #[test]
    fn seeded_and_deterministic() {
        assert_eq!(
            gen_corpus(1000, 5, 0.01, 9).unwrap(),
            gen_corpus(1000, 5, 0.01, 9).unwrap()
        );
        assert_ne!(
            gen_corpus(1000, 5, 0.01, 9).unwrap(),
            gen_corpus(1000, 5, 0.01, 10).unwrap()
        );
    }

    #[test]
    fn mutations_change_roughly_the_rate() {
        let t = gen_corpus(10_000, 2, 0.05, 1).unwrap();
        let diff = (0..10_000).filter(|&i| t[i] != t[10_000 + i]).count();
        // two independent copies differ at about 2 * 0.05 of positions
        assert!((700..1300).contains(&diff), "{diff}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gen_corpus(0, 1, 0.0, 0).is_err());
        assert!(gen_corpus(1, 0, 0.0, 0).is_err());
        assert!(gen_corpus(1, 1, 1.0, 0).is_err());
    }
}
