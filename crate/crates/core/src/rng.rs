//! Keyed random streams.
//!
//! Every random draw in the toolkit comes from a ChaCha8 stream whose key is
//! derived from `(base_seed, experiment, index, tag)`. ChaCha is a counter
//! based cipher, so two tasks with different keys never share state and a
//! task's output does not depend on what ran before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The generator used throughout.
pub type StreamRng = ChaCha8Rng;

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey<'a> {
    pub base_seed: u64,
    pub experiment: &'a str,
    pub index: u64,
    pub tag: &'a str,
}

impl<'a> StreamKey<'a> {
    pub fn new(base_seed: u64, experiment: &'a str, index: u64, tag: &'a str) -> Self {
        Self {
            base_seed,
            experiment,
            index,
            tag,
        }
    }

    /// Same key with a different module tag.
    pub fn with_tag(self, tag: &'a str) -> Self {
        Self { tag, ..self }
    }

    /// Same key with a different index.
    pub fn with_index(self, index: u64) -> Self {
        Self { index, ..self }
    }

    pub fn rng(&self) -> StreamRng {
        let mut hasher = Sha256::new();
        hasher.update(b"fanlab/stream/v1");
        hasher.update(self.base_seed.to_le_bytes());
        // length prefixes keep ("ab","c") and ("a","bc") apart
        hasher.update((self.experiment.len() as u64).to_le_bytes());
        hasher.update(self.experiment.as_bytes());
        hasher.update(self.index.to_le_bytes());
        hasher.update((self.tag.len() as u64).to_le_bytes());
        hasher.update(self.tag.as_bytes());
        let seed: [u8; 32] = hasher.finalize().into();
        ChaCha8Rng::from_seed(seed)
    }
}

/// Shorthand for `StreamKey::new(..).rng()`.
pub fn stream(base_seed: u64, experiment: &str, index: u64, tag: &str) -> StreamRng {
    StreamKey::new(base_seed, experiment, index, tag).rng()
}
