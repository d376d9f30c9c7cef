//! Splittable random streams.
//!
//! All randomness in the crate flows from a single master seed. Each unit of
//! work (a path in a Monte Carlo run, a repetition in a statistics loop)
//! gets its own ChaCha stream derived from `(master seed, stream id)`, so
//! results do not depend on scheduling order or thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream-id block reserved for the paths of a method run.
pub const STREAM_PATHS: u64 = 0;
/// Stream-id block reserved for the independent reference-constant run.
pub const STREAM_REFERENCE: u64 = 1 << 40;
/// Stream-id block reserved for single-shot draws (simulate, tau-sample).
pub const STREAM_SCRATCH: u64 = 2 << 40;

/// Random stream for one unit of work.
///
/// Streams with distinct `stream` values are statistically independent;
/// the same `(master_seed, stream)` pair always yields the same sequence.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}
