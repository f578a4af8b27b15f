//! Seeded generators. Every stochastic routine takes a `u64` seed and builds
//! its own ChaCha stream, so results never depend on call order elsewhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes `(seed, trial, stream)` into an independent child seed.
///
/// Children for different `trial` values do not depend on each other, so
/// dropping or reordering trials leaves the rest unchanged.
pub fn substream_seed(seed: u64, trial: u64, stream: u64) -> u64 {
    let mut z = splitmix64(seed);
    z = splitmix64(z ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64(z ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
