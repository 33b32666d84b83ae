//! Deterministic derivation of independent random streams from one root seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Streams that consume randomness. Each gets its own generator so adding
/// draws to one stage never perturbs another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Init = 1,
    Split = 2,
    Epoch = 3,
    Worker = 4,
    Subset = 5,
    Synthetic = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(root: u64, stream: Stream, index: u64) -> u64 {
    splitmix64(splitmix64(root ^ splitmix64(stream as u64)) ^ index)
}

pub fn rng(root: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(root, stream, index))
}
