//! Seeded random streams.
//!
//! Every stream is a ChaCha8 generator keyed by the master seed with the
//! stream id selecting one of its 2^64 independent streams. ChaCha is
//! counter based, so the output is a pure function of `(master_seed,
//! stream_id)` and identical on every platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// What a stream is used for inside one simulated day.
///
/// Keeping purposes on separate streams means the number of draws consumed
/// for one purpose never shifts the values seen by another, which is what
/// lets fleet-size variants share random numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamPurpose {
    Arrivals = 0,
    ServiceTimes = 1,
    Bernoullis = 2,
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
    stream_id: u64,
}

/// Creates the stream `stream_id` of generator family keyed by `master_seed`.
pub fn make_stream(master_seed: u64, stream_id: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    RandomStream { rng, stream_id }
}

/// Stream id for `(day_index, purpose)`. Fleet size deliberately plays no part.
pub fn day_stream_id(day_index: u64, purpose: StreamPurpose) -> u64 {
    splitmix64(day_index.wrapping_mul(4).wrapping_add(purpose as u64))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}
