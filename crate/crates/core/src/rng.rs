//! Seed derivation for every random stream in the pipeline.
//!
//! All randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`), a
//! counter-based generator. The 256-bit key is the little-endian
//! concatenation
//!
//! ```text
//! seed (u64) | domain tag (8 ASCII bytes) | a (u64) | b (u64)
//! ```
//!
//! where `a`/`b` are domain-specific parameters (for fields: mode tag and
//! `n`). Independent samples of the same configuration use distinct ChaCha
//! stream ids, so sample `k` is a pure function of `(seed, mode, n, k)`
//! and never depends on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Domain tag for Gaussian free field samples.
pub const FIELD_DOMAIN: &[u8; 8] = b"wl-field";
/// Domain tag for the tie-breaking edge jitter.
pub const JITTER_DOMAIN: &[u8; 8] = b"wl-jittr";
/// Domain tag for randomized verification checks.
pub const CHECK_DOMAIN: &[u8; 8] = b"wl-check";

pub fn keyed_rng(seed: u64, domain: &[u8; 8], a: u64, b: u64, stream: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(domain);
    key[16..24].copy_from_slice(&a.to_le_bytes());
    key[24..32].copy_from_slice(&b.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Stable 64-bit tag for a short label (FNV-1a), used to key check streams by name.
pub fn label_tag(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
