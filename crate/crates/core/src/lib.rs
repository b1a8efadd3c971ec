//! Grammar-compressed text with fast random access.
//!
//! Texts are compressed into straight-line programs ([`Slp`]) by RePair,
//! optionally after content-defined chunking ([`builders`]). An SLP can then
//! be encoded two ways for random access and substring extraction:
//!
//! - [`ShapedSlpEncoding`] groups non-terminals by expansion size, addresses
//!   each by (size, offset in group) through a minimal perfect hash over the
//!   distinct sizes, and stores one small triple per rule.
//! - [`NaiveSlpEncoding`] stores right-hand sides and expansion lengths in
//!   plain fixed-width arrays.
//!
//! Both implement [`TextAccess`]. Positions are 1-based throughout.

pub mod bench;
pub mod builders;
mod codec;
pub mod corpus;
mod error;
pub mod grammar;
pub mod naive;
pub mod rng;
pub mod shaped;
pub mod succinct;

pub use error::{Error, Result};
pub use grammar::{GrammarStats, Rule, Slp, SymbolId, Violation};
pub use naive::NaiveSlpEncoding;
pub use shaped::{EncodeOptions, ShapedSlpEncoding};

/// Random access to a text of known length.
pub trait TextAccess: Sync {
    /// Text length `n`.
    fn text_len(&self) -> u64;

    /// Character at 1-based position `i`.
    fn access(&self, i: u64) -> Result<u8>;

    /// Appends `len` characters starting at 1-based position `i` to `out`.
    fn extract_into(&self, i: u64, len: u64, out: &mut Vec<u8>) -> Result<()>;

    fn extract(&self, i: u64, len: u64) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(len as usize);
        self.extract_into(i, len, &mut out)?;
        Ok(out)
    }

    /// Size of the serialized form in bytes.
    fn size_bytes(&self) -> u64;
}

pub(crate) fn check_position(i: u64, n: u64) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::PositionOutOfRange { pos: i, len: n });
    }
    Ok(())
}

pub(crate) fn check_range(i: u64, len: u64, n: u64) -> Result<()> {
    let ok = i >= 1 && i.checked_add(len).is_some_and(|end| end - 1 <= n);
    if !ok {
        return Err(Error::RangeOutOfBounds {
            pos: i,
            count: len,
            len: n,
        });
    }
    Ok(())
}
