//! Seeded randomness.
//!
//! Every random draw in the crate goes through [`stream`], which returns a
//! ChaCha8 generator keyed by a 64-bit seed and positioned on a numbered
//! stream. ChaCha is counter based, so distinct stream ids give independent
//! sequences from one seed and results do not depend on which worker thread
//! evaluates a cell.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64, stream_id: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Stable 64-bit seed derived from a base seed and a list of labels.
///
/// Uses SHA-256 so the value is identical across platforms and toolchains.
pub fn derive_seed(seed: u64, labels: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for label in labels {
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
