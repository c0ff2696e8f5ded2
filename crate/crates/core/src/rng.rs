//! Seeded random streams.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`. Work
//! item `i` (a dataset record, a self-play iteration) draws from stream `i`
//! of that generator, so any item can be regenerated in isolation and items
//! can be produced in any order or in parallel with identical results.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
