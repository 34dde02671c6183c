//! Construction, noisy syndrome extraction and table decoding of quantum
//! random linear codes.
//!
//! The pipeline, bottom to top:
//!
//! - [`pauli`], [`f2`]: phase-free Pauli strings in binary symplectic form
//!   and the F2 row-reduction machinery (check matrix, transforms, pivots).
//! - [`clifford`]: conjugation through {H, sqrt(Z), CNOT} circuits and the
//!   cached enumeration of the 11 520-element two-qubit Clifford group.
//! - [`code`]: random (n, k) encodings, stabilizer/logical derivation, and
//!   the precomputed reduced structures the decoder keys off.
//! - [`extraction`]: the noisy extraction round, fault enumeration, and
//!   propagation to error patterns and syndrome sequences.
//! - [`decoder`]: the degeneracy-aware table decoder (coset leaders, logical
//!   components, data and decoding tables, parallel merge).
//! - [`bernoulli`]: order-indexed count tables for uniform Bernoulli noise,
//!   with the self-convolution merge and overcounting corrections.
//! - [`evaluate`], [`fit`]: failure probabilities (exact and Monte Carlo)
//!   and the asymptotic per-extraction fits.

pub mod bernoulli;
pub mod bits;
pub mod clifford;
pub mod code;
pub mod decoder;
pub mod error;
pub mod evaluate;
pub mod extraction;
pub mod f2;
pub mod fit;
pub mod pauli;

pub use error::{Error, Result};

/// Derive an independent, reproducible RNG from a master seed and a purpose
/// label, so separate pipeline stages never share a stream.
pub fn seeded_rng(master_seed: u64, stream: &str) -> rand_chacha::ChaCha12Rng {
    use rand::SeedableRng;
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update(stream.as_bytes());
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    rand_chacha::ChaCha12Rng::from_seed(seed)
}
