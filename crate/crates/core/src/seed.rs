//! Seed derivation.
//!
//! Every random stream in the crate is a [`SeededRng`] built from a 64-bit
//! seed. Child seeds are derived with [`derive_seed`]:
//!
//! ```text
//! z = master ^ index
//! z = z + 0x9E3779B97F4A7C15            (wrapping)
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB  (wrapping)
//! z = z ^ (z >> 31)
//! ```
//!
//! which is the SplitMix64 output function applied to `master ^ index`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The crate-wide deterministic generator.
pub type SeededRng = ChaCha8Rng;

pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = (master ^ index).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Generator for stream `stream` of iteration `iteration` under `seed`.
///
/// Iterations of the learners draw noise and solver randomness from separate
/// per-iteration streams so that paired executions stay aligned even when an
/// earlier iteration consumed a different amount of randomness.
pub fn iteration_rng(seed: u64, iteration: usize, stream: u64) -> SeededRng {
    let base = derive_seed(seed, iteration as u64);
    rng_from_seed(derive_seed(base, 0xA5A5_0000 + stream))
}
