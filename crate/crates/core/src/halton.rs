//! Halton low-discrepancy sequence.

use alloc::vec::Vec;

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| !candidate.is_multiple_of(p))
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Van der Corput radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut value = 0.0;
    while index > 0 {
        value += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    value
}

/// Multi-dimensional Halton sequence over the first `dims` primes.
///
/// Point `n` (starting at 1) has coordinate `d` equal to the radical inverse
/// of `n` in the `d`-th prime base. Index 0 maps to the origin and is never
/// emitted by [`HaltonSequence::point`] callers in this crate.
#[derive(Debug, Clone)]
pub struct HaltonSequence {
    bases: Vec<u64>,
}

impl HaltonSequence {
    pub fn new(dims: usize) -> Self {
        Self {
            bases: first_primes(dims),
        }
    }

    pub fn dims(&self) -> usize {
        self.bases.len()
    }

    pub fn point_into(&self, index: u64, out: &mut [f64]) {
        for (o, &b) in out.iter_mut().zip(&self.bases) {
            *o = radical_inverse(index, b);
        }
    }

    pub fn point(&self, index: u64) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.bases.len()];
        self.point_into(index, &mut out);
        out
    }
}
