//! Seeded random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] keyed by the
//! run seed and a stage tag, with the ChaCha stream id selecting an
//! independent unit (a row block, a surrogate). Results therefore do not
//! depend on thread count or scheduling.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Stage tags; each consumer of randomness gets its own key.
pub mod stage {
    pub const PERTURB: u64 = 0x7065_7274;
    pub const SURROGATE: u64 = 0x7375_7272;
    pub const FIXTURE: u64 = 0x6669_7874;
    pub const DECODE: u64 = 0x6465_636f;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent stream for `(seed, stage, unit)`.
pub fn stream(seed: u64, stage: u64, unit: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(stage)));
    rng.set_stream(unit);
    rng
}

/// Folds several indices into one unit id.
pub fn unit(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x1234_5678_9abc_def0, |acc, &p| splitmix64(acc ^ p))
}
