//! Subsampled compression problem and the greedy solvers.
//!
//! For `S` sampled pairs `(iₛ, jₛ)` the matrix `R` (J₊ × S) has entries
//! `R_js = z₊ⱼ(x_iₛ) · z₊ⱼ(x_jₛ)`, and the target is `r = Σⱼ Rⱼ`, so
//! `rₛ = z₊(x_iₛ)ᵀ z₊(x_jₛ)`. Compression looks for a sparse `w ≥ 0` with
//! `r(w) = Σⱼ wⱼ Rⱼ` close to `r`; `(1/S)‖r − r(w)‖²` is the Monte-Carlo
//! estimate of the Gram-matrix discrepancy over off-diagonal pairs.
//!
//! `R` is never materialized for real data: the problem keeps the feature
//! values of the touched datapoints and forms `R_js` on the fly, so memory
//! is `O(J₊ · #touched)` instead of `O(J₊ · S)`.

use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

use crate::error::{check_len, Error, Result};
use crate::features::{FeatureMapParams, WeightVector};
use crate::linalg::{axpy, dot, norm_sq, Matrix};
use crate::points::PointSet;
use crate::rng::{self, below};

/// Below this squared step length Frank–Wolfe treats the iterate as converged.
pub const FW_MIN_STEP_NORM_SQ: f64 = 1e-18;

/// A residual this small relative to `‖r‖²` counts as an exact fit.
const EXACT_FIT_REL_SQ: f64 = 1e-28;

/// `S` index pairs, each strictly above the diagonal (`i < j`, 0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSample {
    pub pairs: Vec<(usize, usize)>,
    pub seed: u64,
}

impl PairSample {
    /// Every admissible pair of `n` points exactly once, ordered by `(j, i)`.
    pub fn all_pairs(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for j in 1..n {
            for i in 0..j {
                pairs.push((i, j));
            }
        }
        Self { pairs, seed: 0 }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Map a rank in `0..n(n−1)/2` to the pair `(i, j)`, `i < j`, enumerated by
/// `j` then `i` (the inverse of `k = j(j−1)/2 + i`).
fn unrank_pair(k: u64) -> (usize, usize) {
    let mut j = ((1.0 + sqrt(1.0 + 8.0 * k as f64)) / 2.0) as u64;
    while j * (j - 1) / 2 > k {
        j -= 1;
    }
    while (j + 1) * j / 2 <= k {
        j += 1;
    }
    let i = k - j * (j - 1) / 2;
    (i as usize, j as usize)
}

/// Draw `s` pairs i.i.d. uniformly from `{(i, j) : i < j < n}`.
pub fn sample_pairs(n: usize, s: usize, seed: u64) -> Result<PairSample> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two datapoints to sample pairs"));
    }
    if s == 0 {
        return Err(Error::InvalidArgument("need at least one pair"));
    }
    let total = (n as u64) * (n as u64 - 1) / 2;
    let mut r = rng::stream(rng::derive_seed(seed, rng::LABEL_PAIRS), 0);
    let pairs = (0..s).map(|_| unrank_pair(below(&mut r, total))).collect();
    Ok(PairSample { pairs, seed })
}

#[derive(Debug, Clone)]
enum Rows {
    /// Explicit `R`, row-major J₊ × S.
    Dense(Matrix),
    /// `features` is T × J₊, one row per touched datapoint; pair `s`
    /// references rows `pairs[s]`. Point-major layout keeps the all-rows
    /// product in [`CoresetProblem::row_dots`] contiguous.
    Factored {
        features: Matrix,
        pairs: Vec<(u32, u32)>,
    },
}

/// The compression problem: rows `Rⱼ`, target `r`, and the norms
/// `σ̂ⱼ = ‖Rⱼ‖/√S`, `σ̂ = Σⱼ σ̂ⱼ`.
#[derive(Debug, Clone)]
pub struct CoresetProblem {
    rows: Rows,
    j_plus: usize,
    s: usize,
    target: Vec<f64>,
    sigma_j: Vec<f64>,
    sigma: f64,
}

impl CoresetProblem {
    /// Wrap an explicit `R` (J₊ × S); `r` is its column sum.
    pub fn from_rows(r: Matrix) -> Result<Self> {
        if r.rows() == 0 || r.cols() == 0 {
            return Err(Error::InvalidArgument("coreset problem needs at least one row and column"));
        }
        let (j_plus, s) = (r.rows(), r.cols());
        let mut p = Self {
            rows: Rows::Dense(r),
            j_plus,
            s,
            target: Vec::new(),
            sigma_j: Vec::new(),
            sigma: 0.0,
        };
        p.finish();
        Ok(p)
    }

    fn finish(&mut self) {
        let s_inv = 1.0 / self.s as f64;
        match &self.rows {
            Rows::Dense(m) => {
                let mut target = vec![0.0; self.s];
                self.sigma_j = m
                    .row_iter()
                    .map(|row| {
                        for (t, v) in target.iter_mut().zip(row) {
                            *t += *v;
                        }
                        sqrt(norm_sq(row) * s_inv)
                    })
                    .collect();
                self.target = target;
            }
            Rows::Factored { features, pairs } => {
                let mut sq = vec![0.0; self.j_plus];
                self.target = pairs
                    .iter()
                    .map(|&(a, b)| {
                        let (fa, fb) = (features.row(a as usize), features.row(b as usize));
                        // plain left-to-right sum, the order `reconstruct` uses
                        let mut t = 0.0;
                        for ((q, &x), &y) in sq.iter_mut().zip(fa).zip(fb) {
                            let v = x * y;
                            t += v;
                            *q += v * v;
                        }
                        t
                    })
                    .collect();
                self.sigma_j = sq.into_iter().map(|q| sqrt(q * s_inv)).collect();
            }
        }
        self.sigma = self.sigma_j.iter().sum();
    }

    pub fn j_plus(&self) -> usize {
        self.j_plus
    }

    /// Number of sampled pairs `S`.
    pub fn num_pairs(&self) -> usize {
        self.s
    }

    /// `r`.
    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// `σ̂ⱼ` for every row.
    pub fn row_norms(&self) -> &[f64] {
        &self.sigma_j
    }

    /// `σ̂`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn row_into(&self, j: usize, out: &mut [f64]) {
        match &self.rows {
            Rows::Dense(m) => out.copy_from_slice(m.row(j)),
            Rows::Factored { features, pairs } => {
                for (o, &(a, b)) in out.iter_mut().zip(pairs) {
                    *o = features[(a as usize, j)] * features[(b as usize, j)];
                }
            }
        }
    }

    pub fn row(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.s];
        self.row_into(j, &mut out);
        out
    }

    /// Materialize `R` (J₊ × S).
    pub fn dense_rows(&self) -> Matrix {
        let mut m = Matrix::zeros(self.j_plus, self.s);
        for j in 0..self.j_plus {
            self.row_into(j, m.row_mut(j));
        }
        m
    }

    /// `⟨Rⱼ, v⟩`.
    #[inline]
    pub fn row_dot(&self, j: usize, v: &[f64]) -> f64 {
        match &self.rows {
            Rows::Dense(m) => dot(m.row(j), v),
            Rows::Factored { features, pairs } => pairs
                .iter()
                .zip(v)
                .map(|(&(a, b), &vs)| features[(a as usize, j)] * features[(b as usize, j)] * vs)
                .sum(),
        }
    }

    /// `⟨Rⱼ, v⟩` for every row.
    pub fn row_dots(&self, v: &[f64], out: &mut [f64]) {
        match &self.rows {
            Rows::Dense(m) => {
                for (o, row) in out.iter_mut().zip(m.row_iter()) {
                    *o = dot(row, v);
                }
            }
            Rows::Factored { features, pairs } => {
                out.fill(0.0);
                for (&(a, b), &vs) in pairs.iter().zip(v) {
                    let (fa, fb) = (features.row(a as usize), features.row(b as usize));
                    for ((o, &x), &y) in out.iter_mut().zip(fa).zip(fb) {
                        *o += x * y * vs;
                    }
                }
            }
        }
    }

    /// `out += alpha · Rⱼ`.
    pub fn add_row(&self, j: usize, alpha: f64, out: &mut [f64]) {
        match &self.rows {
            Rows::Dense(m) => axpy(alpha, m.row(j), out),
            Rows::Factored { features, pairs } => {
                for (o, &(a, b)) in out.iter_mut().zip(pairs) {
                    *o += alpha * (features[(a as usize, j)] * features[(b as usize, j)]);
                }
            }
        }
    }

    /// `r(w) = Σⱼ wⱼ Rⱼ`, summed in ascending feature order.
    pub fn reconstruct(&self, w: &WeightVector) -> Result<Vec<f64>> {
        check_len(self.j_plus, w.j_plus())?;
        let mut out = vec![0.0; self.s];
        for &(j, wj) in w.entries() {
            self.add_row(j, wj, &mut out);
        }
        Ok(out)
    }

    fn residual_objective(&self, approx: &[f64]) -> f64 {
        let ss: f64 = self.target.iter().zip(approx).map(|(a, b)| (a - b) * (a - b)).sum();
        ss / self.s as f64
    }
}

/// Featurize only the datapoints touched by the pairs and assemble the problem.
pub fn build_problem<P: PointSet + ?Sized>(
    points: &P,
    params: &FeatureMapParams,
    ps: &PairSample,
) -> Result<CoresetProblem> {
    check_len(params.dim(), points.dim())?;
    if ps.is_empty() {
        return Err(Error::InvalidArgument("pair sample is empty"));
    }
    let n = points.len();
    for &(i, j) in &ps.pairs {
        if !(i < j) {
            return Err(Error::InvalidArgument("pairs must lie strictly above the diagonal"));
        }
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, len: n });
        }
    }
    let mut touched: Vec<usize> = ps.pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    touched.sort_unstable();
    touched.dedup();
    let local = |i: usize| touched.binary_search(&i).expect("touched index") as u32;
    let pairs: Vec<(u32, u32)> = ps.pairs.iter().map(|&(i, j)| (local(i), local(j))).collect();

    let j_plus = params.j_plus();
    let mut features = Matrix::zeros(touched.len(), j_plus);
    for (row, &i) in touched.iter().enumerate() {
        params.featurize_point_into(points.point(i), features.row_mut(row));
    }
    let mut p = CoresetProblem {
        rows: Rows::Factored { features, pairs },
        j_plus,
        s: ps.len(),
        target: Vec::new(),
        sigma_j: Vec::new(),
        sigma: 0.0,
    };
    p.finish();
    Ok(p)
}

/// `(1/S)‖r − r(w)‖²`.
pub fn objective(cp: &CoresetProblem, w: &WeightVector) -> Result<f64> {
    let approx = cp.reconstruct(w)?;
    Ok(cp.residual_objective(&approx))
}

/// Solver output: final weights and the objective after every iteration.
#[derive(Debug, Clone)]
pub struct Compression {
    pub weights: WeightVector,
    /// `objectives[t]` is the objective after iteration `t + 1`.
    pub objectives: Vec<f64>,
}

impl Compression {
    pub fn final_objective(&self) -> f64 {
        self.objectives.last().copied().unwrap_or(f64::NAN)
    }

    pub fn iterations(&self) -> usize {
        self.objectives.len()
    }
}

/// State handed to solver observers after each iteration.
#[derive(Debug)]
pub struct Iterate<'a> {
    /// 1-based iteration number.
    pub iteration: usize,
    /// Dense weights of the current iterate.
    pub weights: &'a [f64],
    pub objective: f64,
}

fn argmax(scores: &[f64], valid: &[bool]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, (&s, &ok)) in scores.iter().zip(valid).enumerate() {
        // strict comparison keeps the lowest index on ties
        if ok && s.is_finite() && best.is_none_or(|(_, b)| s > b) {
            best = Some((j, s));
        }
    }
    best.map(|(j, _)| j)
}

fn live_rows(cp: &CoresetProblem) -> Result<Vec<bool>> {
    let valid: Vec<bool> = cp.sigma_j.iter().map(|&s| s > 0.0).collect();
    if valid.iter().any(|&v| v) {
        Ok(valid)
    } else {
        Err(Error::DegenerateProblem)
    }
}

/// Frank–Wolfe on `{w ≥ 0 : Σⱼ wⱼσ̂ⱼ = σ̂}` with exact line search.
///
/// Vertices are `(σ̂/σ̂ⱼ) eⱼ`. The first iteration jumps to the vertex that
/// best aligns with `r`; later ones move toward the vertex best aligned with
/// the residual. The support grows by at most one feature per iteration.
pub fn frank_wolfe(cp: &CoresetProblem, iterations: usize) -> Result<Compression> {
    frank_wolfe_observed(cp, iterations, |_| {})
}

pub fn frank_wolfe_observed(
    cp: &CoresetProblem,
    iterations: usize,
    mut observe: impl FnMut(&Iterate<'_>),
) -> Result<Compression> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("at least one iteration is required"));
    }
    let valid = live_rows(cp)?;
    let (j_plus, s) = (cp.j_plus, cp.s);
    let sigma = cp.sigma;
    let mut w = vec![0.0; j_plus];
    let mut approx = vec![0.0; s];
    let mut cand = vec![0.0; s];
    let mut residual = cp.target.clone();
    let mut scores = vec![0.0; j_plus];
    let mut objectives = Vec::with_capacity(iterations);
    let target_sq = norm_sq(&cp.target);

    for it in 1..=iterations {
        cp.row_dots(&residual, &mut scores);
        for (sc, &sj) in scores.iter_mut().zip(&cp.sigma_j) {
            *sc = if sj > 0.0 { *sc / sj } else { f64::NEG_INFINITY };
        }
        let f = argmax(&scores, &valid).ok_or(Error::DegenerateProblem)?;
        let scale = sigma / cp.sigma_j[f];
        if it == 1 {
            w[f] = scale;
            cp.add_row(f, scale, &mut approx);
        } else {
            if norm_sq(&residual) <= EXACT_FIT_REL_SQ * target_sq {
                break;
            }
            // d = v − r(w), with v = scale · R_f
            let mut d = cp.row(f);
            for (dv, a) in d.iter_mut().zip(&approx) {
                *dv = scale * *dv - a;
            }
            let denom = norm_sq(&d);
            if denom < FW_MIN_STEP_NORM_SQ {
                break;
            }
            let gamma = (dot(&d, &residual) / denom).clamp(0.0, 1.0);
            if gamma <= 0.0 {
                break;
            }
            // Exact line search cannot increase the objective; a rounding-level
            // increase means we are at the optimum along every useful vertex.
            cand.copy_from_slice(&approx);
            axpy(gamma, &d, &mut cand);
            let obj = cp.residual_objective(&cand);
            if obj > objectives.last().copied().unwrap_or(f64::INFINITY) {
                break;
            }
            for wj in w.iter_mut() {
                *wj *= 1.0 - gamma;
            }
            w[f] += gamma * scale;
            core::mem::swap(&mut approx, &mut cand);
        }
        for ((res, t), a) in residual.iter_mut().zip(&cp.target).zip(&approx) {
            *res = t - a;
        }
        let obj = cp.residual_objective(&approx);
        objectives.push(obj);
        observe(&Iterate {
            iteration: it,
            weights: &w,
            objective: obj,
        });
    }
    Ok(Compression {
        weights: WeightVector::from_dense(&w)?,
        objectives,
    })
}

/// Greedy iterative geodesic ascent.
///
/// Works on the unit sphere: `ℓ = r/‖r‖`, `ℓⱼ = Rⱼ/‖Rⱼ‖`, and the current
/// direction `y = ℓ(w)`. Each iteration picks the row whose tangent direction
/// at `y` best matches the tangent toward `ℓ`, then moves along the geodesic
/// with the closed-form step. The returned weights are rescaled so that
/// `r(w)` is the optimal multiple of the final direction.
pub fn giga(cp: &CoresetProblem, iterations: usize) -> Result<Compression> {
    giga_observed(cp, iterations, |_| {})
}

pub fn giga_observed(
    cp: &CoresetProblem,
    iterations: usize,
    mut observe: impl FnMut(&Iterate<'_>),
) -> Result<Compression> {
    if iterations == 0 {
        return Err(Error::InvalidArgument("at least one iteration is required"));
    }
    let valid = live_rows(cp)?;
    let (j_plus, s) = (cp.j_plus, cp.s);
    let target_norm = sqrt(norm_sq(&cp.target));
    if !(target_norm > 0.0) {
        return Err(Error::ZeroTarget);
    }
    let sqrt_s = sqrt(s as f64);
    let row_norm: Vec<f64> = cp.sigma_j.iter().map(|&sj| sj * sqrt_s).collect();

    // b_j = ⟨ℓ, ℓⱼ⟩
    let mut align = vec![0.0; j_plus];
    cp.row_dots(&cp.target, &mut align);
    for (a, &nj) in align.iter_mut().zip(&row_norm) {
        *a = if nj > 0.0 { *a / (nj * target_norm) } else { f64::NEG_INFINITY };
    }

    // y = Σ u_j ℓⱼ, kept unit length
    let mut u = vec![0.0; j_plus];
    let mut y = vec![0.0; s];
    let mut cross = vec![0.0; j_plus];
    let mut scores = vec![0.0; j_plus];
    let mut scaled = vec![0.0; j_plus];
    let mut objectives = Vec::with_capacity(iterations);

    for it in 1..=iterations {
        if it == 1 {
            let f = argmax(&align, &valid).ok_or(Error::DegenerateProblem)?;
            u[f] = 1.0;
            cp.add_row(f, 1.0 / row_norm[f], &mut y);
        } else {
            // a_j = ⟨ℓⱼ, y⟩, c = ⟨ℓ, y⟩
            cp.row_dots(&y, &mut cross);
            let c = dot(&cp.target, &y) / target_norm;
            let tangent_sq = 1.0 - c * c;
            if !(tangent_sq > 1e-24) {
                break;
            }
            let tangent = sqrt(tangent_sq);
            for j in 0..j_plus {
                let a = if valid[j] { cross[j] / row_norm[j] } else { 0.0 };
                cross[j] = a;
                let perp_sq = 1.0 - a * a;
                scores[j] = if valid[j] && perp_sq > 1e-24 {
                    (align[j] - c * a) / (tangent * sqrt(perp_sq))
                } else {
                    f64::NEG_INFINITY
                };
            }
            let Some(f) = argmax(&scores, &valid) else { break };
            let (z0, z1, z2) = (align[f], c, cross[f]);
            let num = z0 - z1 * z2;
            let den = num + (z1 - z0 * z2);
            if !(den > 0.0) || !(num > 0.0) {
                break;
            }
            let gamma = (num / den).clamp(0.0, 1.0);
            for yv in y.iter_mut() {
                *yv *= 1.0 - gamma;
            }
            cp.add_row(f, gamma / row_norm[f], &mut y);
            let nrm = sqrt(norm_sq(&y));
            if !(nrm > 0.0) {
                break;
            }
            for yv in y.iter_mut() {
                *yv /= nrm;
            }
            for uj in u.iter_mut() {
                *uj *= (1.0 - gamma) / nrm;
            }
            u[f] += gamma / nrm;
        }
        // optimally scaled iterate: w = ⟨r, y⟩ · u / ‖R‖
        let alpha = dot(&cp.target, &y);
        for j in 0..j_plus {
            scaled[j] = if u[j] != 0.0 { alpha * u[j] / row_norm[j] } else { 0.0 };
        }
        let obj = cp
            .target
            .iter()
            .zip(&y)
            .map(|(t, yv)| (t - alpha * yv) * (t - alpha * yv))
            .sum::<f64>()
            / s as f64;
        objectives.push(obj);
        observe(&Iterate {
            iteration: it,
            weights: &scaled,
            objective: obj,
        });
    }

    // Final rescale against the exactly reconstructed direction.
    let raw: Vec<f64> = (0..j_plus)
        .map(|j| if u[j] > 0.0 { u[j] / row_norm[j] } else { 0.0 })
        .collect();
    let raw_w = WeightVector::from_dense(&raw)?;
    let direction = cp.reconstruct(&raw_w)?;
    let dn = norm_sq(&direction);
    let alpha = if dn > 0.0 { dot(&cp.target, &direction) / dn } else { 0.0 };
    let final_w: Vec<f64> = raw.iter().map(|&v| (alpha * v).max(0.0)).collect();
    let weights = WeightVector::from_dense(&final_w)?;
    if let Some(last) = objectives.last_mut() {
        *last = objective(cp, &weights)?;
    }
    Ok(Compression { weights, objectives })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureScaling;
    use crate::kernels::{KernelSpec, SamplingStrategy};

    fn random_points(n: usize, p: usize, seed: u64) -> Matrix {
        let mut r = rng::stream(seed, 0);
        let data = (0..n * p).map(|_| rng::open_unit(&mut r) - 0.5).collect();
        Matrix::from_vec(n, p, data).unwrap()
    }

    #[test]
    fn unrank_covers_every_pair_once() {
        let n = 7u64;
        let total = n * (n - 1) / 2;
        let got: Vec<_> = (0..total).map(unrank_pair).collect();
        assert_eq!(got, PairSample::all_pairs(n as usize).pairs);
    }

    #[test]
    fn two_points_always_give_the_same_pair() {
        let ps = sample_pairs(2, 50, 3).unwrap();
        assert!(ps.pairs.iter().all(|&p| p == (0, 1)));
    }

    #[test]
    fn pairs_stay_above_diagonal() {
        let ps = sample_pairs(5, 1000, 8).unwrap();
        assert!(ps.pairs.iter().all(|&(i, j)| i < j && j < 5));
        assert!(sample_pairs(1, 10, 0).is_err());
        assert!(sample_pairs(4, 0, 0).is_err());
    }

    #[test]
    fn pair_frequencies_are_uniform_for_three_points() {
        let ps = sample_pairs(3, 30_000, 17).unwrap();
        let mut counts = [0usize; 3];
        for &(i, j) in &ps.pairs {
            counts[i + j - 1] += 1; // (0,1)→0, (0,2)→1, (1,2)→2
        }
        for c in counts {
            assert!((c as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.01, "{counts:?}");
        }
    }

    #[test]
    fn constant_features_give_closed_form_problem() {
        let params =
            FeatureMapParams::new(Matrix::zeros(2, 1), vec![0.0; 2], FeatureScaling::UnitBounded).unwrap();
        let pts = Matrix::from_rows(&[[0.3], [0.9]]).unwrap();
        let cp = build_problem(&pts, &params, &PairSample { pairs: vec![(0, 1)], seed: 0 }).unwrap();
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(cp.dense_rows().as_slice(), &[0.5, 0.5]));
        assert!(close(cp.target(), &[1.0]));
        assert!(close(cp.row_norms(), &[0.5, 0.5]));
        assert!((cp.sigma() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn target_is_column_sum_and_pair_inner_product() {
        let pts = random_points(50, 3, 1);
        let spec = KernelSpec::rbf(2.0).unwrap();
        let params =
            FeatureMapParams::sample(&spec, &SamplingStrategy::monte_carlo(4), 20, 3, FeatureScaling::Unbiased)
                .unwrap();
        let ps = sample_pairs(50, 40, 5).unwrap();
        let cp = build_problem(&pts, &params, &ps).unwrap();
        let dense = cp.dense_rows();
        for s in 0..40 {
            let col: f64 = (0..20).map(|j| dense[(j, s)]).sum();
            assert!((col - cp.target()[s]).abs() < 1e-12);
            let (i, j) = ps.pairs[s];
            let zi = params.featurize_point(pts.point(i));
            let zj = params.featurize_point(pts.point(j));
            assert!((dot(&zi, &zj) - cp.target()[s]).abs() < 1e-12);
        }
        assert_eq!(objective(&cp, &WeightVector::ones(20)).unwrap(), 0.0);
        let zero = objective(&cp, &WeightVector::zeros(20)).unwrap();
        assert!((zero - norm_sq(cp.target()) / 40.0).abs() < 1e-15);
    }

    #[test]
    fn unit_bounded_entries_respect_bounds() {
        let pts = random_points(30, 2, 2);
        let spec = KernelSpec::rbf(1.0).unwrap();
        let params =
            FeatureMapParams::sample(&spec, &SamplingStrategy::monte_carlo(6), 25, 2, FeatureScaling::UnitBounded)
                .unwrap();
        let cp = build_problem(&pts, &params, &sample_pairs(30, 60, 1).unwrap()).unwrap();
        let bound = 1.0 / 25.0 + 1e-15;
        assert!(cp.dense_rows().as_slice().iter().all(|c| c.abs() <= bound));
        assert!(cp.row_norms().iter().all(|&s| s <= bound));
        assert!(cp.sigma() <= 1.0 + 1e-12);
    }

    #[test]
    fn build_problem_rejects_bad_pairs() {
        let pts = random_points(4, 2, 2);
        let spec = KernelSpec::rbf(1.0).unwrap();
        let params =
            FeatureMapParams::sample(&spec, &SamplingStrategy::monte_carlo(6), 5, 2, FeatureScaling::Unbiased)
                .unwrap();
        let bad = PairSample { pairs: vec![(2, 1)], seed: 0 };
        assert!(build_problem(&pts, &params, &bad).is_err());
        let oob = PairSample { pairs: vec![(0, 4)], seed: 0 };
        assert!(build_problem(&pts, &params, &oob).is_err());
    }

    #[test]
    fn single_row_problem() {
        let cp = CoresetProblem::from_rows(Matrix::from_rows(&[[0.2, -0.1, 0.4]]).unwrap()).unwrap();
        assert_eq!(objective(&cp, &WeightVector::ones(1)).unwrap(), 0.0);
        let fw = frank_wolfe(&cp, 1).unwrap();
        assert_eq!(fw.weights.get(0), 1.0);
        assert_eq!(fw.final_objective(), 0.0);
        let g = giga(&cp, 1).unwrap();
        assert!(g.final_objective() < 1e-30);
    }

    #[test]
    fn duplicate_rows_are_reconstructed_in_one_step() {
        let row = [0.3, -0.2, 0.5, 0.1];
        let cp = CoresetProblem::from_rows(Matrix::from_rows(&[row, row]).unwrap()).unwrap();
        let fw = frank_wolfe(&cp, 1).unwrap();
        assert_eq!(fw.weights.entries(), &[(0, 2.0)]);
        assert!(fw.final_objective() < 1e-30);
        let g = giga(&cp, 1).unwrap();
        assert_eq!(g.weights.support_len(), 1);
        assert!((g.weights.get(0) - 2.0).abs() < 1e-12);
        assert!(g.final_objective() < 1e-30);
    }

    #[test]
    fn zero_rows_are_rejected() {
        let cp = CoresetProblem::from_rows(Matrix::zeros(3, 4)).unwrap();
        assert_eq!(frank_wolfe(&cp, 3).unwrap_err(), Error::DegenerateProblem);
        assert_eq!(giga(&cp, 3).unwrap_err(), Error::DegenerateProblem);
        // rows cancel: nonzero rows, zero target
        let cp = CoresetProblem::from_rows(Matrix::from_rows(&[[1.0, 2.0], [-1.0, -2.0]]).unwrap()).unwrap();
        assert_eq!(giga(&cp, 3).unwrap_err(), Error::ZeroTarget);
    }

    #[test]
    fn zero_row_is_never_selected() {
        let cp = CoresetProblem::from_rows(
            Matrix::from_rows(&[[0.0, 0.0, 0.0], [0.1, 0.2, 0.3], [0.3, 0.1, 0.0]]).unwrap(),
        )
        .unwrap();
        for c in [frank_wolfe(&cp, 5).unwrap(), giga(&cp, 5).unwrap()] {
            assert_eq!(c.weights.get(0), 0.0);
        }
    }

    #[test]
    fn tie_break_prefers_lowest_index() {
        let row = [0.5, 0.5];
        let cp = CoresetProblem::from_rows(Matrix::from_rows(&[row, row, row]).unwrap()).unwrap();
        assert_eq!(frank_wolfe(&cp, 1).unwrap().weights.entries()[0].0, 0);
        assert_eq!(giga(&cp, 1).unwrap().weights.entries()[0].0, 0);
    }
}
