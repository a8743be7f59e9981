//! Seeded random streams.
//!
//! Every stochastic routine draws from ChaCha8 (`rand_chacha::ChaCha8Rng`)
//! seeded through `SeedableRng::seed_from_u64`. ChaCha output is specified
//! independently of platform and word size, so a seed reproduces the same
//! stream everywhere. Independent streams (one per restart, fold, ...) are
//! derived with [`stream`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for sub-stream `index` of `seed`: same key, distinct ChaCha stream id.
pub fn stream(seed: u64, index: u64) -> Rng {
    let mut rng = seeded(seed);
    rng.set_stream(index);
    rng
}
