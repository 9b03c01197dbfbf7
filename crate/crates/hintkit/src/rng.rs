//! Keyed, deterministic random streams.
//!
//! All randomness in the pipeline flows through [`RngKey`]: a stream is a
//! pure function of `(seed, epoch, record_id, label)`, where `label`
//! separates independent decisions (hint gate, subset draw, word swaps, ...)
//! made for the same record. Streams are stable across platforms and across
//! serial/parallel execution.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Identifies one record in one pass over the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngKey<'a> {
    pub seed: u64,
    pub epoch: u64,
    pub record_id: &'a str,
}

impl<'a> RngKey<'a> {
    pub fn new(seed: u64, epoch: u64, record_id: &'a str) -> Self {
        Self {
            seed,
            epoch,
            record_id,
        }
    }

    /// Derives the stream for one labeled decision.
    pub fn stream(&self, label: &str) -> ChaCha8Rng {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update(self.epoch.to_le_bytes());
        // Length-prefix the variable-size fields so (id, label) pairs cannot
        // collide by shifting bytes between them.
        hasher.update((self.record_id.len() as u64).to_le_bytes());
        hasher.update(self.record_id.as_bytes());
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        ChaCha8Rng::from_seed(hasher.finalize().into())
    }
}
