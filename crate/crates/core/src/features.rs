//! Random Fourier feature maps, weighted (compressed) maps and the Gaussian
//! Johnson–Lindenstrauss baseline.

use alloc::vec;
use alloc::vec::Vec;
use libm::{cos, sqrt};

use crate::error::{check_len, Error, Result};
use crate::kernels::{sample_frequencies, KernelSpec, SamplingStrategy};
use crate::linalg::{dot, Matrix};
use crate::points::{PointRef, PointSet};
use crate::rng::{self, open_unit};
use crate::special::normal_quantile;

/// Per-feature amplitude convention.
///
/// `Unbiased` uses √(2/J₊), which makes `z(x)ᵀz(y)` an unbiased estimate of
/// `k(x, y)` (averaging over the phase halves the product of cosines).
/// `UnitBounded` uses 1/√J₊, which keeps `‖z(x)‖₂ ≤ 1` but estimates `k/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FeatureScaling {
    #[default]
    Unbiased,
    UnitBounded,
}

impl FeatureScaling {
    pub fn amplitude(self, j_plus: usize) -> f64 {
        match self {
            FeatureScaling::Unbiased => sqrt(2.0 / j_plus as f64),
            FeatureScaling::UnitBounded => 1.0 / sqrt(j_plus as f64),
        }
    }
}

/// Frequencies `Ω` (J₊ × p), phases `b` and the per-feature amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMapParams {
    omega: Matrix,
    phases: Vec<f64>,
    amplitude: f64,
}

impl FeatureMapParams {
    pub fn new(omega: Matrix, phases: Vec<f64>, scaling: FeatureScaling) -> Result<Self> {
        check_len(omega.rows(), phases.len())?;
        if omega.rows() == 0 {
            return Err(Error::InvalidArgument("feature map needs at least one frequency"));
        }
        let amplitude = scaling.amplitude(omega.rows());
        Ok(Self {
            omega,
            phases,
            amplitude,
        })
    }

    /// Sample frequencies for `spec` and wrap them.
    pub fn sample(
        spec: &KernelSpec,
        strategy: &SamplingStrategy,
        j_plus: usize,
        p: usize,
        scaling: FeatureScaling,
    ) -> Result<Self> {
        let (omega, phases) = sample_frequencies(spec, strategy, j_plus, p)?;
        Self::new(omega, phases, scaling)
    }

    pub fn j_plus(&self) -> usize {
        self.omega.rows()
    }

    pub fn dim(&self) -> usize {
        self.omega.cols()
    }

    pub fn omega(&self) -> &Matrix {
        &self.omega
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Write `z₊(x)` into `out` (length J₊).
    pub fn featurize_point_into(&self, x: PointRef<'_>, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.j_plus());
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.amplitude * cos(x.dot(self.omega.row(j)) + self.phases[j]);
        }
    }

    pub fn featurize_point(&self, x: PointRef<'_>) -> Vec<f64> {
        let mut out = vec![0.0; self.j_plus()];
        self.featurize_point_into(x, &mut out);
        out
    }

    /// Feature matrix (rows × J₊) for selected points of a set.
    pub fn featurize_rows<P: PointSet + ?Sized>(&self, points: &P, indices: &[usize]) -> Result<Matrix> {
        check_len(self.dim(), points.dim())?;
        let mut z = Matrix::zeros(indices.len(), self.j_plus());
        for (r, &i) in indices.iter().enumerate() {
            self.featurize_point_into(points.point(i), z.row_mut(r));
        }
        Ok(z)
    }
}

/// `z₊(x)`: entry `j` is `amplitude · cos(ωⱼᵀx + bⱼ)`.
pub fn featurize(params: &FeatureMapParams, x: &[f64]) -> Result<Vec<f64>> {
    check_len(params.dim(), x.len())?;
    Ok(params.featurize_point(PointRef::Dense(x)))
}

/// Sparse nonnegative weights over the J₊ features.
///
/// Entries are kept sorted by feature index and every stored weight is
/// strictly positive.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightVector {
    j_plus: usize,
    entries: Vec<(usize, f64)>,
}

impl WeightVector {
    pub fn zeros(j_plus: usize) -> Self {
        Self {
            j_plus,
            entries: Vec::new(),
        }
    }

    pub fn ones(j_plus: usize) -> Self {
        Self {
            j_plus,
            entries: (0..j_plus).map(|j| (j, 1.0)).collect(),
        }
    }

    /// Drops zero entries. Negative or non-finite weights are rejected.
    pub fn from_dense(weights: &[f64]) -> Result<Self> {
        let mut entries = Vec::new();
        for (j, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidArgument("weights must be finite and nonnegative"));
            }
            if w > 0.0 {
                entries.push((j, w));
            }
        }
        Ok(Self {
            j_plus: weights.len(),
            entries,
        })
    }

    /// Build from `(index, weight)` pairs; duplicate indices are summed.
    pub fn from_entries(j_plus: usize, pairs: &[(usize, f64)]) -> Result<Self> {
        let mut dense = vec![0.0; j_plus];
        for &(j, w) in pairs {
            if j >= j_plus {
                return Err(Error::IndexOutOfRange { index: j, len: j_plus });
            }
            dense[j] += w;
        }
        Self::from_dense(&dense)
    }

    pub fn j_plus(&self) -> usize {
        self.j_plus
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// ‖w‖₀.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.entries
            .binary_search_by_key(&j, |e| e.0)
            .map_or(0.0, |k| self.entries[k].1)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.j_plus];
        for &(j, w) in &self.entries {
            d[j] = w;
        }
        d
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

/// Feature map restricted to the support of a weight vector.
///
/// Only the kept frequency rows are stored; entry `k` of the output is
/// `√wⱼ · amplitude · cos(ωⱼᵀx + bⱼ)` for the `k`-th kept feature `j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompressedMap {
    pub kernel: Option<KernelSpec>,
    pub j_plus: usize,
    pub amplitude: f64,
    pub indices: Vec<usize>,
    pub omega: Matrix,
    pub phases: Vec<f64>,
    pub sqrt_weights: Vec<f64>,
}

impl CompressedMap {
    pub fn new(params: &FeatureMapParams, weights: &WeightVector) -> Result<Self> {
        check_len(params.j_plus(), weights.j_plus())?;
        let p = params.dim();
        let mut omega = Vec::with_capacity(weights.support_len() * p);
        let mut phases = Vec::with_capacity(weights.support_len());
        let mut sqrt_weights = Vec::with_capacity(weights.support_len());
        let mut indices = Vec::with_capacity(weights.support_len());
        for &(j, w) in weights.entries() {
            omega.extend_from_slice(params.omega().row(j));
            phases.push(params.phases()[j]);
            sqrt_weights.push(sqrt(w));
            indices.push(j);
        }
        Ok(Self {
            kernel: None,
            j_plus: params.j_plus(),
            amplitude: params.amplitude(),
            omega: Matrix::from_vec(indices.len(), p, omega)?,
            indices,
            phases,
            sqrt_weights,
        })
    }

    pub fn with_kernel(mut self, kernel: KernelSpec) -> Self {
        self.kernel = Some(kernel);
        self
    }

    /// Number of kept features (‖w‖₀).
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.omega.cols()
    }

    pub fn featurize_point_into(&self, x: PointRef<'_>, out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.sqrt_weights[k] * (self.amplitude * cos(x.dot(self.omega.row(k)) + self.phases[k]));
        }
    }

    pub fn featurize_point(&self, x: PointRef<'_>) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.featurize_point_into(x, &mut out);
        out
    }

    pub fn featurize_rows<P: PointSet + ?Sized>(&self, points: &P, indices: &[usize]) -> Result<Matrix> {
        if !self.is_empty() {
            check_len(self.dim(), points.dim())?;
        }
        let mut z = Matrix::zeros(indices.len(), self.len());
        for (r, &i) in indices.iter().enumerate() {
            self.featurize_point_into(points.point(i), z.row_mut(r));
        }
        Ok(z)
    }
}

/// `z(w)(x)`: compressed features of a dense point.
pub fn featurize_compressed(cm: &CompressedMap, x: &[f64]) -> Result<Vec<f64>> {
    if !cm.is_empty() {
        check_len(cm.dim(), x.len())?;
    }
    Ok(cm.featurize_point(PointRef::Dense(x)))
}

/// Gaussian JL projection `f(z) = A z` with `A` (J × J₊) having i.i.d.
/// Normal(0, 1/J) entries. Row `i` of `A` comes from stream `i` of the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct JlProjection {
    matrix: Matrix,
}

impl JlProjection {
    pub fn new(seed: u64, j_plus: usize, j: usize) -> Result<Self> {
        if j > j_plus {
            return Err(Error::InvalidArgument("JL target dimension exceeds source dimension"));
        }
        if j == 0 {
            return Err(Error::InvalidArgument("JL target dimension must be at least 1"));
        }
        let key = rng::derive_seed(seed, rng::LABEL_JL);
        let sd = 1.0 / sqrt(j as f64);
        let mut matrix = Matrix::zeros(j, j_plus);
        for i in 0..j {
            let mut r = rng::stream(key, i as u64);
            for a in matrix.row_mut(i) {
                *a = sd * normal_quantile(open_unit(&mut r));
            }
        }
        Ok(Self { matrix })
    }

    pub fn from_matrix(matrix: Matrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn project(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.matrix.mul_vec(z)
    }

    /// Project every row of `z` (n × J₊) to J columns.
    pub fn project_rows(&self, z: &Matrix) -> Result<Matrix> {
        z.mul_transpose(&self.matrix)
    }
}

/// One-shot JL projection of a single vector.
pub fn jl_project(seed: u64, j_plus: usize, j: usize, z: &[f64]) -> Result<Vec<f64>> {
    check_len(j_plus, z.len())?;
    JlProjection::new(seed, j_plus, j)?.project(z)
}

/// Full J₊ features followed by a JL projection, materialized in row batches.
#[derive(Debug, Clone)]
pub struct JlFeatureMap<'a> {
    pub params: &'a FeatureMapParams,
    pub projection: &'a JlProjection,
    pub batch_rows: usize,
}

impl JlFeatureMap<'_> {
    pub fn featurize_rows<P: PointSet + ?Sized>(&self, points: &P, indices: &[usize]) -> Result<Matrix> {
        check_len(self.params.j_plus(), self.projection.source_dim())?;
        let j = self.projection.target_dim();
        let mut out = Matrix::zeros(indices.len(), j);
        for (b, chunk) in indices.chunks(self.batch_rows.max(1)).enumerate() {
            let up = self.params.featurize_rows(points, chunk)?;
            let down = self.projection.project_rows(&up)?;
            let start = b * self.batch_rows.max(1);
            for r in 0..chunk.len() {
                out.row_mut(start + r).copy_from_slice(down.row(r));
            }
        }
        Ok(out)
    }
}

/// Weighted inner product `Σⱼ wⱼ aⱼ bⱼ` of two full feature vectors.
pub fn weighted_inner(weights: &WeightVector, a: &[f64], b: &[f64]) -> f64 {
    weights.entries().iter().map(|&(j, w)| w * a[j] * b[j]).sum()
}

/// Inner product helper re-exported for callers holding feature rows.
pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b)
}
