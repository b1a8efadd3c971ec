//! Grammar construction from raw text.

mod ctph;
mod repair;

pub use ctph::{
    build_via_ctph, ctph_parse, karp_rabin, trigger_positions, CtphParams, Parse, KR_BASE, KR_PRIME,
};
pub use repair::repair_build;
