//! Deterministic, order-independent random streams.
//!
//! Every randomized step draws from its own ChaCha stream keyed by
//! `(seed, phase, a, b)`, so running per-solution work sequentially or on a
//! thread pool yields identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Phase {
    InitialSolutions = 1,
    InitialIm = 2,
    PartialIm = 3,
    Mutation = 4,
    UniformScores = 5,
    Perturbation = 6,
    RandomSubset = 7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Streams {
    seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, phase: Phase, a: u64, b: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&(phase as u64).to_le_bytes());
        key[16..24].copy_from_slice(&a.to_le_bytes());
        key[24..].copy_from_slice(&b.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}
