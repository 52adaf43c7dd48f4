//! Named, reproducible random streams.
//!
//! Every random decision in the crate draws from a ChaCha8 stream derived
//! from one user-facing seed, a stream name and an index (usually the trial
//! number). Two streams with different names or indices never share state.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// FNV-1a over the stream name.
fn name_hash(name: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in name.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Returns the generator for `(seed, name, index)`.
pub fn stream(seed: u64, name: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ name_hash(name));
    rng.set_stream(index);
    rng
}

/// A fresh 64-bit seed drawn from `(seed, name, index)`, for handing to
/// APIs that take a plain seed.
pub fn derive_seed(seed: u64, name: &str, index: u64) -> u64 {
    stream(seed, name, index).next_u64()
}
