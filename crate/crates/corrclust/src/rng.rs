//! Seeded randomness for the pivot algorithms and Monte-Carlo harnesses.
//!
//! Everything randomized in this crate draws from ChaCha8 seeded by a
//! caller-provided 64-bit seed; trial `i` of a batch uses
//! [`trial_seed`]`(base, i)`, so trials are independent and reproducible
//! regardless of execution order.

use rand_core::RngCore;

pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    use rand_core::SeedableRng;
    SeededRng::seed_from_u64(seed)
}

/// Seed for the `index`-th trial of a batch.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}

/// Rejection-free uniform draw from `0..len` via a widening multiply.
/// The bias is at most `len / 2^64`, negligible at desk scale.
pub fn uniform_index(rng: &mut impl RngCore, len: usize) -> usize {
    debug_assert!(len > 0);
    (((rng.next_u64() as u128) * (len as u128)) >> 64) as usize
}

/// Uniform draw from `[0, 1)` with 53 random bits.
pub fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform_range(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + uniform_f64(rng) * (hi - lo)
}
