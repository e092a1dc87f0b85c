//! Stationary kernels and sampling from their spectral measures.
//!
//! | family  | k(x, y)                       | per-coordinate frequency law |
//! |---------|-------------------------------|------------------------------|
//! | RBF     | exp(-γ‖x−y‖₂²)                | Normal(0, 2γ)                |
//! | Laplace | exp(-γ‖x−y‖₁)                 | Cauchy(0, scale γ)           |
//! | Cauchy  | ∏ᵢ 1/(1 + γ(xᵢ−yᵢ)²)          | Laplace(0, scale √γ)         |
//!
//! Every family satisfies k(x, x) = 1.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{exp, sqrt};

use crate::error::{check_len, Error, Result};
use crate::halton::HaltonSequence;
use crate::linalg::Matrix;
use crate::rng::{self, open_unit};
use crate::special::{cauchy_quantile, laplace_quantile, normal_quantile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum KernelFamily {
    Rbf,
    Laplace,
    Cauchy,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Rbf => "rbf",
            KernelFamily::Laplace => "laplace",
            KernelFamily::Cauchy => "cauchy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rbf" | "gaussian" => Some(KernelFamily::Rbf),
            "laplace" | "laplacian" => Some(KernelFamily::Laplace),
            "cauchy" => Some(KernelFamily::Cauchy),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub gamma: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument("gamma must be positive and finite"));
        }
        Ok(Self { family, gamma })
    }

    pub fn rbf(gamma: f64) -> Result<Self> {
        Self::new(KernelFamily::Rbf, gamma)
    }

    /// Map a uniform draw `u ∈ (0, 1)` to one coordinate of a frequency.
    pub fn frequency_quantile(&self, u: f64) -> f64 {
        match self.family {
            KernelFamily::Rbf => sqrt(2.0 * self.gamma) * normal_quantile(u),
            KernelFamily::Laplace => cauchy_quantile(u, self.gamma),
            KernelFamily::Cauchy => laplace_quantile(u, sqrt(self.gamma)),
        }
    }

    /// Kernel value on two dense vectors.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_len(x.len(), y.len())?;
        let g = self.gamma;
        let v = match self.family {
            KernelFamily::Rbf => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                exp(-g * d2)
            }
            KernelFamily::Laplace => {
                let d1: f64 = x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum();
                exp(-g * d1)
            }
            KernelFamily::Cauchy => x
                .iter()
                .zip(y)
                .map(|(a, b)| 1.0 / (1.0 + g * (a - b) * (a - b)))
                .product(),
        };
        Ok(v)
    }
}

/// Exact kernel evaluation.
pub fn eval_kernel(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.eval(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SamplingKind {
    MonteCarlo,
    HaltonQmc,
}

/// How frequencies are drawn. The seed drives Monte-Carlo draws; for Halton
/// it only matters when `scramble` is set (random shift modulo 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingStrategy {
    pub kind: SamplingKind,
    pub seed: u64,
    pub scramble: bool,
}

impl SamplingStrategy {
    pub fn monte_carlo(seed: u64) -> Self {
        Self {
            kind: SamplingKind::MonteCarlo,
            seed,
            scramble: false,
        }
    }

    pub fn halton(seed: u64) -> Self {
        Self {
            kind: SamplingKind::HaltonQmc,
            seed,
            scramble: false,
        }
    }
}

/// Draw `j_plus` frequencies (rows of a `j_plus × p` matrix) and phases.
///
/// Row `j` consumes one point of a `p + 1`-dimensional uniform sequence: the
/// first `p` coordinates go through the per-coordinate quantile of the
/// spectral measure and the last one, scaled by 2π, becomes the phase.
/// Monte-Carlo rows come from stream `j` of the seed's key, so each row is
/// independent of every other row and of generation order.
pub fn sample_frequencies(
    spec: &KernelSpec,
    strategy: &SamplingStrategy,
    j_plus: usize,
    p: usize,
) -> Result<(Matrix, Vec<f64>)> {
    if j_plus == 0 {
        return Err(Error::InvalidArgument("j_plus must be at least 1"));
    }
    if p == 0 {
        return Err(Error::InvalidArgument("input dimension must be at least 1"));
    }
    let mut omega = Matrix::zeros(j_plus, p);
    let mut phases = vec![0.0; j_plus];
    let mut u = vec![0.0; p + 1];
    match strategy.kind {
        SamplingKind::MonteCarlo => {
            let key = rng::derive_seed(strategy.seed, rng::LABEL_FREQUENCIES);
            for j in 0..j_plus {
                let mut r = rng::stream(key, j as u64);
                for ui in u.iter_mut() {
                    *ui = open_unit(&mut r);
                }
                fill_row(spec, &u, omega.row_mut(j), &mut phases[j]);
            }
        }
        SamplingKind::HaltonQmc => {
            let halton = HaltonSequence::new(p + 1);
            let shift: Vec<f64> = if strategy.scramble {
                let key = rng::derive_seed(strategy.seed, rng::LABEL_FREQUENCIES);
                let mut r = rng::stream(key, u64::MAX);
                (0..=p).map(|_| open_unit(&mut r)).collect()
            } else {
                vec![0.0; p + 1]
            };
            for j in 0..j_plus {
                halton.point_into(j as u64 + 1, &mut u);
                for (ui, s) in u.iter_mut().zip(&shift) {
                    let mut v = *ui + s;
                    if v >= 1.0 {
                        v -= 1.0;
                    }
                    // keep strictly inside (0, 1) so quantiles stay finite
                    *ui = v.clamp(f64::EPSILON, 1.0 - f64::EPSILON);
                }
                fill_row(spec, &u, omega.row_mut(j), &mut phases[j]);
            }
        }
    }
    Ok((omega, phases))
}

fn fill_row(spec: &KernelSpec, u: &[f64], row: &mut [f64], phase: &mut f64) {
    let p = row.len();
    for (w, &ui) in row.iter_mut().zip(&u[..p]) {
        *w = spec.frequency_quantile(ui);
    }
    *phase = 2.0 * PI * u[p];
}
