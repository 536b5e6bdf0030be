//! Seeded randomness.
//!
//! Every run is driven by one 64-bit seed. Each consumer of randomness gets
//! its own ChaCha20 stream derived from that seed, so the number of draws one
//! component makes never shifts the values another component sees:
//!
//! | purpose                  | stream id |
//! |--------------------------|-----------|
//! | voter partition          | 1         |
//! | above-threshold gate     | 2         |
//! | limited-domain selection | 3         |
//!
//! Experiment sweeps derive per-question seeds with [`question_seed`].

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub use rand_chacha::ChaCha20Rng as StreamRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Partition = 1,
    Threshold = 2,
    LimitedDomain = 3,
}

pub fn stream(seed: u64, purpose: Purpose) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

/// Seed for one question of a sweep: `base + question_index + repetition`.
pub fn question_seed(base: u64, question_index: usize, repetition: usize) -> u64 {
    base.wrapping_add(question_index as u64)
        .wrapping_add(repetition as u64)
}

/// A uniform draw in the open interval (0, 1) from one 64-bit word.
///
/// The top 52 bits are used and shifted by half a step, so 0 and 1 are never
/// returned.
pub fn uniform_open01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    ((rng.next_u64() >> 12) as f64 + 0.5) * SCALE
}
