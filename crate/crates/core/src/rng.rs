//! Deterministic per-tree random streams.
//!
//! A stream is a ChaCha8 generator keyed by the master seed with the stream
//! word set to the tree (or replication) index. Two streams with the same
//! `(seed, index)` produce identical draws no matter which thread runs them
//! or in which order they are created.

use rand::{Error as RandError, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Self { inner }
    }

    /// Derive an independent child seed, e.g. for a forest fitted inside a replication.
    pub fn child_seed(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), RandError> {
        self.inner.try_fill_bytes(dest)
    }
}
