//! Reproducible random streams for replication-parallel Monte Carlo.
//!
//! A stream is a ChaCha8 key derived from `seed` plus a 64-bit stream
//! selector. Replication `i` of a run always draws from
//! `stream.substream(i)`, so results do not depend on how replications are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Child stream for replication (or sub-task) `index`.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream {
            seed: self.seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(1))),
        }
    }
}

/// Run `n` replications in parallel. Replication `i` receives its own RNG
/// seeded from `stream.substream(i)`; results come back in replication order.
pub fn replicate<T, F>(stream: RngStream, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut StreamRng) -> T + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.substream(i as u64).rng();
            f(i, &mut rng)
        })
        .collect()
}

/// Run `op` inside a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<R, F>(threads: usize, op: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    if threads == 0 {
        return op();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction")
        .install(op)
}
