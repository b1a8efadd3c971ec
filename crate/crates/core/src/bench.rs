//! Query benchmark: seeded random substring extraction over one or more
//! encodings of the same text, split across worker threads.
//!
//! Positions come from [`SplitMix64`] seeded with `seed ^ length`, drawn as
//! `1 + below(n - length + 1)`. Each thread takes a contiguous slice of the
//! positions. Every run is checked against a checksum computed from the
//! plain text before its timing is reported.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::TextAccess;

pub const CSV_HEADER: &str = "encoding,length,threads,mean_us,total_s,size_bytes";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub lengths: Vec<u64>,
    pub queries: u64,
    pub threads: Vec<usize>,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            lengths: vec![1, 10, 100, 1000],
            queries: 10_000,
            threads: (1..=8).collect(),
            seed: 42,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self, n: u64) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.lengths.is_empty() || self.threads.is_empty() {
            return bad("need at least one length and one thread count".into());
        }
        if self.queries == 0 {
            return bad("query count must be at least 1".into());
        }
        if let Some(&t) = self.threads.iter().find(|&&t| t == 0) {
            return bad(format!("thread count {t} must be at least 1"));
        }
        for &len in &self.lengths {
            if len == 0 || len > n {
                return bad(format!("substring length {len} outside 1..={n}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub encoding: String,
    pub length: u64,
    pub threads: usize,
    pub mean_us: f64,
    pub total_s: f64,
    pub size_bytes: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.4},{:.6},{}",
                r.encoding, r.length, r.threads, r.mean_us, r.total_s, r.size_bytes
            );
        }
        out
    }

    pub fn row(&self, encoding: &str, length: u64, threads: usize) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.encoding == encoding && r.length == length && r.threads == threads)
    }
}

/// Query start positions (1-based) for substrings of `len` in a text of
/// length `n`.
pub fn query_positions(n: u64, len: u64, queries: u64, seed: u64) -> Vec<u64> {
    let mut rng = SplitMix64::new(seed ^ len);
    (0..queries).map(|_| 1 + rng.below(n - len + 1)).collect()
}

#[inline]
fn fold_bytes(bytes: &[u8]) -> u64 {
    // FNV-1a
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Order-independent checksum of the substrings at `positions`.
pub fn oracle_checksum(text: &[u8], positions: &[u64], len: u64) -> u64 {
    positions.iter().fold(0u64, |acc, &i| {
        let start = (i - 1) as usize;
        acc.wrapping_add(fold_bytes(&text[start..start + len as usize]))
    })
}

/// Runs all queries over `threads` static slices; returns the wall time and
/// the combined checksum.
pub fn run_queries<E: TextAccess + ?Sized>(
    enc: &E,
    positions: &[u64],
    len: u64,
    threads: usize,
) -> Result<(Duration, u64)> {
    let chunk = positions.len().div_ceil(threads.max(1)).max(1);
    let work = |slice: &[u64]| -> Result<u64> {
        let mut buf = Vec::with_capacity(len as usize);
        let mut acc = 0u64;
        for &i in slice {
            if len == 1 {
                acc = acc.wrapping_add(fold_bytes(&[enc.access(i)?]));
            } else {
                buf.clear();
                enc.extract_into(i, len, &mut buf)?;
                acc = acc.wrapping_add(fold_bytes(&buf));
            }
        }
        Ok(acc)
    };
    let begin = Instant::now();
    let sums: Vec<Result<u64>> = if threads <= 1 {
        vec![work(positions)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = positions
                .chunks(chunk)
                .map(|slice| scope.spawn(move || work(slice)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("benchmark worker panicked"))
                .collect()
        })
    };
    let elapsed = begin.elapsed();
    let mut total = 0u64;
    for s in sums {
        total = total.wrapping_add(s?);
    }
    Ok((elapsed, total))
}

/// Benchmarks every encoding at every (length, threads) configuration.
///
/// `text` is the decompressed text all encodings must represent; each
/// encoding is first checked to have its length and the same first and
/// last characters.
pub fn run_bench(
    encodings: &[(&str, &dyn TextAccess)],
    text: &[u8],
    config: &BenchConfig,
) -> Result<BenchReport> {
    let n = text.len() as u64;
    config.validate(n)?;
    for (name, enc) in encodings {
        if enc.text_len() != n {
            return Err(Error::MismatchedTexts(format!(
                "{name} has length {}, expected {n}",
                enc.text_len()
            )));
        }
        if enc.access(1)? != text[0] || enc.access(n)? != text[n as usize - 1] {
            return Err(Error::MismatchedTexts(format!(
                "{name} differs from the text"
            )));
        }
    }
    let mut report = BenchReport::default();
    for (name, enc) in encodings {
        for &len in &config.lengths {
            let positions = query_positions(n, len, config.queries, config.seed);
            let expected = oracle_checksum(text, &positions, len);
            for &threads in &config.threads {
                let (elapsed, actual) = run_queries(*enc, &positions, len, threads)?;
                if actual != expected {
                    return Err(Error::ChecksumMismatch {
                        encoding: name.to_string(),
                        length: len,
                        expected,
                        actual,
                    });
                }
                report.rows.push(BenchRow {
                    encoding: name.to_string(),
                    length: len,
                    threads,
                    mean_us: elapsed.as_secs_f64() * 1e6 / config.queries as f64,
                    total_s: elapsed.as_secs_f64(),
                    size_bytes: enc.size_bytes(),
                });
            }
        }
    }
    Ok(report)
}
