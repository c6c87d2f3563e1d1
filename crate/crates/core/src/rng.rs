//! Seeded random streams.
//!
//! Every concern draws from its own ChaCha stream keyed by the master seed,
//! so that e.g. changing the number of subcarriers leaves job latencies
//! untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    LatencyJitter = 1,
    CoreSpeed = 2,
    BandwidthJitter = 3,
    Channel = 4,
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
