//! SplitMix64, the seeded generator behind corpus generation and benchmark
//! query positions.
//!
//! `next` advances the state by `0x9e3779b97f4a7c15` and returns
//! `z ^ (z >> 31)` after the two multiply-xorshift rounds
//! `z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9` and
//! `z = (z ^ (z >> 27)) * 0x94d049bb133111eb` (wrapping arithmetic).

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, bound)` by multiply-shift reduction; `bound > 0`.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
