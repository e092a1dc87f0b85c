//! Counter-based random streams.
//!
//! Every consumer derives its own key from a master seed and a fixed label,
//! then opens one ChaCha8 stream per logical counter (feature row, JL row,
//! sweep). A stream's output depends only on `(key, counter)`, so rows can be
//! generated in any order and still come out bit-identical.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const LABEL_FREQUENCIES: &str = "frequencies";
pub const LABEL_PAIRS: &str = "pairs";
pub const LABEL_JL: &str = "jl";
pub const LABEL_SVM: &str = "svm";
pub const LABEL_FROBENIUS: &str = "frobenius";

/// Derive a sub-seed from a master seed and a label.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    splitmix(master ^ splitmix(fnv1a64(label.as_bytes())))
}

/// Open the stream `counter` under `key`.
pub fn stream(key: u64, counter: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    let mut state = key;
    for chunk in seed.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        chunk.copy_from_slice(&splitmix(state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(counter);
    rng
}

/// Uniform draw from the open interval (0, 1) with 53 bits of resolution.
pub fn open_unit<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `0..bound` (Lemire's multiply-shift with rejection).
pub fn below<R: RngCore>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0, "bound must be positive");
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let m = (rng.next_u64() as u128) * (bound as u128);
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

/// In-place Fisher–Yates shuffle.
pub fn shuffle<R: RngCore, T>(rng: &mut R, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
