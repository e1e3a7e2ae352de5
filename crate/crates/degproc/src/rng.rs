//! Reproducible random streams.
//!
//! Every trial gets its own ChaCha8 stream selected by `(seed, stream)`, so
//! results do not depend on how trials are spread over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as TrialRng;

/// Generator for trial `stream` under master seed `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
