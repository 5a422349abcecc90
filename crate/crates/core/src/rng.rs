//! Reproducible Gaussian streams.
//!
//! A `(seed, stream_id)` pair selects one ChaCha8 keystream, so draw `k` of
//! stream `s` never depends on how streams are spread over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RandomStream { seed, stream_id }
    }

    /// The `i`-th child stream, used to hand one stream to each work item.
    pub fn child(&self, i: u64) -> RandomStream {
        // Children of different parents occupy disjoint id ranges as long as
        // parents are spaced by more than the number of children.
        RandomStream { seed: self.seed, stream_id: self.stream_id.wrapping_mul(1 << 32).wrapping_add(i) }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    pub fn gaussians(&self) -> GaussianIter {
        GaussianIter { rng: self.rng() }
    }
}

pub struct GaussianIter {
    rng: ChaCha8Rng,
}

impl Iterator for GaussianIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(StandardNormal.sample(&mut self.rng))
    }
}

#[inline]
pub fn gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}
