//! Seed fan-out.
//!
//! Every run owns a single 64-bit seed. Independent tasks (one per morph
//! pair) draw from their own ChaCha stream keyed by task index, so changing
//! the execution order or parallelizing never changes the numbers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for the `index`-th independent task of this run.
pub fn task_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
