//! Consumers of feature matrices: kernel-approximation error, ridge
//! regression, a dual coordinate descent linear SVM and kernel-PCA residuals.

use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

use crate::error::{check_len, Error, Result};
use crate::features::{CompressedMap, FeatureMapParams, JlFeatureMap};
use crate::kernels::KernelSpec;
use crate::linalg::{dot, symmetric_eigenvalues, Cholesky, Matrix};
use crate::points::PointSet;
use crate::rng::{self, below};

/// Anything that can turn selected datapoints into feature rows.
pub trait FeatureSource {
    /// One row per entry of `indices`.
    fn feature_rows(&self, points: &dyn PointSet, indices: &[usize]) -> Result<Matrix>;
}

impl FeatureSource for FeatureMapParams {
    fn feature_rows(&self, points: &dyn PointSet, indices: &[usize]) -> Result<Matrix> {
        self.featurize_rows(points, indices)
    }
}

impl FeatureSource for CompressedMap {
    fn feature_rows(&self, points: &dyn PointSet, indices: &[usize]) -> Result<Matrix> {
        self.featurize_rows(points, indices)
    }
}

impl FeatureSource for JlFeatureMap<'_> {
    fn feature_rows(&self, points: &dyn PointSet, indices: &[usize]) -> Result<Matrix> {
        self.featurize_rows(points, indices)
    }
}

/// Features fixed in advance: row `i` belongs to datapoint `i`.
#[derive(Debug, Clone)]
pub struct PrecomputedFeatures(pub Matrix);

impl FeatureSource for PrecomputedFeatures {
    fn feature_rows(&self, points: &dyn PointSet, indices: &[usize]) -> Result<Matrix> {
        check_len(points.len(), self.0.rows())?;
        let mut out = Matrix::zeros(indices.len(), self.0.cols());
        for (r, &i) in indices.iter().enumerate() {
            if i >= self.0.rows() {
                return Err(Error::IndexOutOfRange { index: i, len: self.0.rows() });
            }
            out.row_mut(r).copy_from_slice(self.0.row(i));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrobeniusEstimate {
    pub relative_error: f64,
    pub sample_size: usize,
    pub seed: u64,
}

/// Exact kernel Gram matrix of the listed points.
pub fn kernel_matrix(spec: &KernelSpec, points: &dyn PointSet, indices: &[usize]) -> Result<Matrix> {
    let p = points.dim();
    let dense: Vec<Vec<f64>> = indices
        .iter()
        .map(|&i| {
            if i >= points.len() {
                Err(Error::IndexOutOfRange { index: i, len: points.len() })
            } else {
                Ok(points.point(i).to_dense(p))
            }
        })
        .collect::<Result<_>>()?;
    let m = indices.len();
    let mut k = Matrix::zeros(m, m);
    for a in 0..m {
        for b in 0..=a {
            let v = spec.eval(&dense[a], &dense[b])?;
            k[(a, b)] = v;
            k[(b, a)] = v;
        }
    }
    Ok(k)
}

/// `‖approx − exact‖_F / ‖exact‖_F`.
pub fn relative_frobenius_error(approx: &Matrix, exact: &Matrix) -> Result<f64> {
    let denom = exact.frobenius_norm();
    if !(denom > 0.0) {
        return Err(Error::InvalidArgument("reference matrix has zero norm"));
    }
    Ok(approx.sub(exact)?.frobenius_norm() / denom)
}

/// `m` distinct indices out of `0..n` (partial Fisher–Yates).
pub fn sample_without_replacement(n: usize, m: usize, seed: u64) -> Result<Vec<usize>> {
    if m > n {
        return Err(Error::InvalidArgument("sample size exceeds the number of datapoints"));
    }
    let mut r = rng::stream(rng::derive_seed(seed, rng::LABEL_FROBENIUS), 0);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = i + below(&mut r, (n - i) as u64) as usize;
        idx.swap(i, j);
    }
    idx.truncate(m);
    Ok(idx)
}

/// Relative Frobenius error of `ZZᵀ` against `K` on a random `m × m` block.
pub fn estimate_frobenius_error(
    points: &dyn PointSet,
    approx: &dyn FeatureSource,
    spec: &KernelSpec,
    m: usize,
    seed: u64,
) -> Result<FrobeniusEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument("sample size must be positive"));
    }
    let idx = sample_without_replacement(points.len(), m, seed)?;
    let exact = kernel_matrix(spec, points, &idx)?;
    let z = approx.feature_rows(points, &idx)?;
    let relative_error = relative_frobenius_error(&z.mul_transpose(&z)?, &exact)?;
    Ok(FrobeniusEstimate {
        relative_error,
        sample_size: m,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RidgeModel {
    pub beta: Vec<f64>,
    pub lambda: f64,
}

/// `β = (ZᵀZ + λI)⁻¹ Zᵀy` through a Cholesky solve.
pub fn ridge_fit(z: &Matrix, y: &[f64], lambda: f64) -> Result<RidgeModel> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument("lambda must be positive"));
    }
    check_len(z.rows(), y.len())?;
    let mut a = z.gram();
    for i in 0..a.rows() {
        a[(i, i)] += lambda;
    }
    let rhs = z.tr_mul_vec(y)?;
    let beta = Cholesky::factor(&a)?.solve(&rhs)?;
    Ok(RidgeModel { beta, lambda })
}

pub fn ridge_predict(model: &RidgeModel, z: &[f64]) -> Result<f64> {
    check_len(model.beta.len(), z.len())?;
    Ok(dot(&model.beta, z))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmParams {
    pub c: f64,
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
    /// Append a constant 1 feature so the hyperplane need not pass through 0.
    pub bias: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 0.1,
            max_sweeps: 1000,
            seed: 0,
            bias: false,
        }
    }
}

/// One binary problem with labels in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySvm {
    /// Primal weights; the last entry is the bias when enabled.
    pub w: Vec<f64>,
    pub alpha: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

/// Dual coordinate descent for the L1-loss linear SVM.
pub fn svm_fit_binary(z: &Matrix, y: &[f64], params: &SvmParams, stream: u64) -> Result<BinarySvm> {
    check_len(z.rows(), y.len())?;
    if !(params.c > 0.0) || !(params.tol > 0.0) {
        return Err(Error::InvalidArgument("C and tol must be positive"));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidArgument("binary labels must be +1 or -1"));
    }
    let (n, d) = (z.rows(), z.cols());
    let extra = usize::from(params.bias);
    let mut w = vec![0.0; d + extra];
    let mut alpha = vec![0.0; n];
    let q_diag: Vec<f64> = z.row_iter().map(|r| dot(r, r) + extra as f64).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut r = rng::stream(rng::derive_seed(params.seed, rng::LABEL_SVM), stream);
    let c = params.c;
    let mut sweeps = 0;
    let mut converged = false;

    while sweeps < params.max_sweeps {
        sweeps += 1;
        rng::shuffle(&mut r, &mut order);
        let mut violation: f64 = 0.0;
        for &i in &order {
            if q_diag[i] <= 0.0 {
                continue;
            }
            let zi = z.row(i);
            let mut margin = dot(&w[..d], zi);
            if params.bias {
                margin += w[d];
            }
            let g = y[i] * margin - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= c {
                g.max(0.0)
            } else {
                g
            };
            violation = violation.max(pg.abs());
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / q_diag[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * y[i];
                for (wk, &zk) in w[..d].iter_mut().zip(zi) {
                    *wk += step * zk;
                }
                if params.bias {
                    w[d] += step;
                }
            }
        }
        if violation <= params.tol {
            converged = true;
            break;
        }
    }
    Ok(BinarySvm {
        w,
        alpha,
        sweeps,
        converged,
    })
}

/// Linear SVM; two classes give one model, more give one-vs-rest models.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SvmModel {
    /// Sorted distinct labels.
    pub classes: Vec<f64>,
    /// With two classes a single model scoring `classes[1]` positive,
    /// otherwise one model per class.
    pub weights: Vec<Vec<f64>>,
    pub bias: bool,
    pub c: f64,
    pub tol: f64,
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.weights[0].len() - usize::from(self.bias)
    }

    fn score(&self, k: usize, z: &[f64]) -> f64 {
        let w = &self.weights[k];
        let d = z.len();
        let s = dot(&w[..d], z);
        if self.bias {
            s + w[d]
        } else {
            s
        }
    }
}

pub fn svm_fit(z: &Matrix, labels: &[f64], params: &SvmParams) -> Result<SvmModel> {
    check_len(z.rows(), labels.len())?;
    if labels.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidArgument("labels must be finite"));
    }
    let mut classes = labels.to_vec();
    classes.sort_by(f64::total_cmp);
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let positives: &[f64] = if classes.len() == 2 { &classes[1..] } else { &classes };
    let mut weights = Vec::with_capacity(positives.len());
    for (k, &pos) in positives.iter().enumerate() {
        let y: Vec<f64> = labels.iter().map(|&l| if l == pos { 1.0 } else { -1.0 }).collect();
        weights.push(svm_fit_binary(z, &y, params, k as u64)?.w);
    }
    Ok(SvmModel {
        classes,
        weights,
        bias: params.bias,
        c: params.c,
        tol: params.tol,
    })
}

/// Predicted class label; ties go to the smaller label.
pub fn svm_predict(model: &SvmModel, z: &[f64]) -> Result<f64> {
    check_len(model.dim(), z.len())?;
    if model.weights.len() == 1 {
        let s = model.score(0, z);
        return Ok(if s > 0.0 { model.classes[1] } else { model.classes[0] });
    }
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for k in 0..model.weights.len() {
        let s = model.score(k, z);
        if s > best_score {
            best = k;
            best_score = s;
        }
    }
    Ok(model.classes[best])
}

/// Fraction of rows of `z` whose prediction equals the label.
pub fn svm_accuracy(model: &SvmModel, z: &Matrix, labels: &[f64]) -> Result<f64> {
    check_len(z.rows(), labels.len())?;
    if labels.is_empty() {
        return Err(Error::InvalidArgument("no rows to score"));
    }
    let mut hits = 0usize;
    for (row, &l) in z.row_iter().zip(labels) {
        if svm_predict(model, row)? == l {
            hits += 1;
        }
    }
    Ok(hits as f64 / labels.len() as f64)
}

/// Average residual eigenvalue mass `Σ_{i>l} λᵢ / m`, eigenvalues descending.
pub fn pca_residual(k: &Matrix, l: usize) -> Result<f64> {
    let m = k.rows();
    let scale = k.as_slice().iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if !k.is_symmetric(1e-9 * scale) {
        return Err(Error::NotSymmetric);
    }
    if l > m {
        return Err(Error::InvalidArgument("l exceeds the matrix size"));
    }
    if m == 0 {
        return Ok(0.0);
    }
    let eig = symmetric_eigenvalues(k)?;
    Ok(eig[l..].iter().sum::<f64>() / m as f64)
}

/// `‖v‖₂`.
pub fn euclidean_norm(v: &[f64]) -> f64 {
    sqrt(dot(v, v))
}
