//! Seed splitting.
//!
//! Every random stream in a run is keyed by `(master, stream, index, purpose)`
//! and hashed through SplitMix64 finalizers, so a stream's values never depend
//! on evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Wind = 1,
    Waves = 2,
    PointShift = 3,
    Voronoi = 4,
    MonteCarlo = 5,
    PointRealization = 6,
    SampleRealization = 7,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed. Each component is folded in with a full SplitMix64
/// round so nearby inputs give unrelated outputs.
pub fn derive(master: u64, purpose: Purpose, index: u64) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ purpose as u64);
    splitmix64(h ^ index)
}

/// Seed for one simulator realization. Headings share realizations
/// (common random numbers), so heading comparisons are paired.
pub fn realization(master: u64, purpose: Purpose, point: u64, replicate: u64) -> u64 {
    derive(derive(master, purpose, point), purpose, replicate)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
