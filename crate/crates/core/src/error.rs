use crate::grammar::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),

    #[error("truncated input: needed {needed} more bytes at offset {offset}")]
    Truncated { offset: usize, needed: usize },

    #[error("corrupt data: {0}")]
    Corrupt(String),

    #[error("invalid grammar: {}", format_violations(.0))]
    InvalidGrammar(Vec<Violation>),

    #[error("position {pos} out of range 1..={len}")]
    PositionOutOfRange { pos: u64, len: u64 },

    #[error("range {pos}+{count} exceeds text length {len}")]
    RangeOutOfBounds { pos: u64, count: u64, len: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("texts differ between encodings: {0}")]
    MismatchedTexts(String),

    #[error("checksum mismatch for {encoding} at length {length}: expected {expected:#018x}, got {actual:#018x}")]
    ChecksumMismatch {
        encoding: String,
        length: u64,
        expected: u64,
        actual: u64,
    },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
