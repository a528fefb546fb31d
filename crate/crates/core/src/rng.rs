//! Seeded random streams.
//!
//! Every random draw goes through ChaCha20 keyed by a 64-bit seed mixed with
//! a caller-supplied index path, on one of a fixed set of named streams.
//! Streams never share keystream, so adding draws to one cannot shift another.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    /// Hamiltonian coefficients of a model instance.
    Coefficients = 1,
    /// Haar-random initial states.
    HaarStates = 2,
    /// Uniform sampling of environment fragments.
    Fragments = 3,
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_rng(seed: u64, stream: Stream, path: &[u64]) -> ChaCha20Rng {
    let key = path.iter().fold(mix(seed), |acc, &p| mix(acc ^ mix(p)));
    let mut rng = ChaCha20Rng::seed_from_u64(key);
    rng.set_stream(stream as u64);
    rng
}
