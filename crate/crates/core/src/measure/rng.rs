//! Seeded, counter-based random streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{FieldElement, FieldSpec};

/// ChaCha8 keyed by `seed` on substream `stream`. Output depends only on
/// `(seed, stream, draw index)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: u32) -> u32 {
        self.rng.gen_range(0..n)
    }

    pub fn element(&mut self, k: &FieldSpec) -> FieldElement {
        k.element(self.below(k.order())).expect("in range")
    }

    pub fn nonzero_element(&mut self, k: &FieldSpec) -> FieldElement {
        k.element(1 + self.below(k.order() - 1)).expect("in range")
    }

    pub fn unit_f64(&mut self) -> f64 {
        self.rng.gen()
    }
}
