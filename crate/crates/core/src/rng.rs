//! Seeded random streams.
//!
//! Every consumer of randomness draws from its own ChaCha stream derived from
//! the replicate seed, so adding draws in one stage never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Topology = 1,
    SocialGraph = 2,
    History = 3,
    Catalog = 4,
    Popularity = 5,
    RandomPlacement = 6,
    Requests = 7,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    substream_rng(seed, stream, 0)
}

/// Independent stream keyed by `(stream, sub)`, e.g. one per storage ratio.
pub fn substream_rng(seed: u64, stream: Stream, sub: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 32) | sub as u64);
    rng
}
