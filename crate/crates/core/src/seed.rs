//! Seed derivation.
//!
//! Every random stream in the toolkit is a `ChaCha8Rng` whose seed is the
//! first eight bytes of a SHA-256 digest over a master seed and a list of
//! labelled coordinates. The derivation does not depend on the platform word
//! size or on the order in which cells are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

/// Build the generator used everywhere in the crate.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive a child seed from `master` and a path of coordinates.
///
/// ```
/// use svmspectra::seed::derive_seed;
/// let a = derive_seed(7, &["sweep", "overlap", "3", "0", "train"]);
/// let b = derive_seed(7, &["sweep", "overlap", "3", "0", "test"]);
/// assert_ne!(a, b);
/// ```
pub fn derive_seed<S: AsRef<str>>(master: u64, path: &[S]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(b"svmspectra/seed/v1");
    hasher.update(master.to_le_bytes());
    for part in path {
        let bytes = part.as_ref().as_bytes();
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(bytes);
    }
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}
