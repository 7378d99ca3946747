//! Fixed 64-bit PRNG used by the game generator and the randomized suites.
//!
//! SplitMix64 (Steele, Lea, Flood 2014): state advances by the golden-gamma
//! constant 0x9E3779B97F4A7C15 and the output is a 64-bit finalizer
//! (xor-shift 30, multiply 0xBF58476D1CE4E5B9, xor-shift 27, multiply
//! 0x94D049BB133111EB, xor-shift 31). Pure integer arithmetic, no
//! platform-dependent sources, so identical seeds give identical byte
//! streams everywhere.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` by rejection-free modulo; bias is
    /// irrelevant at the bounds used here (desk-scale counts).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below(0)");
        self.next_u64() % bound
    }

    /// Bernoulli draw with probability `num / den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}
