//! Deterministic stream derivation.
//!
//! Every Monte Carlo unit draws from its own ChaCha8 stream whose seed is a
//! SHA-256 digest of the master seed and a length-prefixed label path. Two
//! different label paths never share a framing, so `["ab"]` and `["a", "b"]`
//! map to different streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// One element of a label path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Label {
    Str(String),
    Int(u64),
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Str(s.to_string())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label::Str(s)
    }
}

impl From<u64> for Label {
    fn from(v: u64) -> Self {
        Label::Int(v)
    }
}

impl From<usize> for Label {
    fn from(v: usize) -> Self {
        Label::Int(v as u64)
    }
}

impl From<u32> for Label {
    fn from(v: u32) -> Self {
        Label::Int(v as u64)
    }
}

const DOMAIN: &[u8] = b"ssalab/seed/v1";

/// Derives a 64-bit stream seed from `master` and the label path.
pub fn derive(master: u64, labels: &[Label]) -> u64 {
    let mut h = Sha256::new();
    h.update(DOMAIN);
    h.update(master.to_le_bytes());
    h.update((labels.len() as u64).to_le_bytes());
    for l in labels {
        match l {
            Label::Str(s) => {
                h.update([0u8]);
                h.update((s.len() as u64).to_le_bytes());
                h.update(s.as_bytes());
            }
            Label::Int(v) => {
                h.update([1u8]);
                h.update(v.to_le_bytes());
            }
        }
    }
    let out = h.finalize();
    let mut b = [0u8; 8];
    b.copy_from_slice(&out[..8]);
    u64::from_le_bytes(b)
}

/// Shorthand for `derive` followed by seeding a ChaCha8 generator.
pub fn stream(master: u64, labels: &[Label]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, labels))
}

/// Builds a label path from heterogeneous items.
#[macro_export]
macro_rules! labels {
    ($($x:expr),* $(,)?) => {
        [$($crate::seeds::Label::from($x)),*]
    };
}
