//! Seed derivation. Every random draw comes from a ChaCha stream keyed by
//! the master seed plus a (purpose, slot, round) triple, so results do not
//! depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed number `index` of `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix(mix(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Init = 1,
    Velocity = 2,
    Mutation = 3,
    Genetic = 4,
    Split = 5,
    Folds = 6,
    Weights = 7,
}

/// Independent stream for `(purpose, slot, round)` under `master`.
pub fn stream(master: u64, purpose: Purpose, slot: usize, round: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((purpose as u64) << 56) ^ ((slot as u64) << 32) ^ round as u64);
    rng
}
