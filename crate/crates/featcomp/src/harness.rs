//! End-to-end experiments: build features per method, evaluate, report rows.

use std::fmt::Write as _;
use std::time::Instant;

use featcomp_core::coreset::{frank_wolfe_observed, giga_observed, Iterate};
use featcomp_core::downstream::{svm_accuracy, FeatureSource};
use featcomp_core::features::JlFeatureMap;
use featcomp_core::{
    build_problem, estimate_frobenius_error, sample_pairs, svm_fit, CompressedMap, Dataset, FeatureMapParams,
    JlProjection, SvmParams, WeightVector,
};

use crate::config::{ConfigError, ExperimentConfig, Method};
use crate::error::Result;
use crate::libsvm;

/// Rows featurized at once by the JL baseline.
const JL_BATCH_ROWS: usize = 256;

/// One (method, trial, J) measurement. Times are wall-clock milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: Method,
    pub j_plus: usize,
    pub j: usize,
    /// Features actually used: ‖w‖₀ for coreset methods, `j` otherwise.
    pub j_effective: usize,
    /// Only set for coreset methods.
    pub s_pairs: Option<usize>,
    pub seed: u64,
    pub rel_frob_error: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub t_featurize_ms: f64,
    pub t_compress_ms: f64,
    pub t_train_ms: f64,
}

impl ResultRow {
    fn sort_key(&self) -> (Method, usize, u64, Option<usize>) {
        (self.method, self.j, self.seed, self.s_pairs)
    }
}

pub const CSV_HEADER: &str =
    "method,j_plus,j,j_effective,s_pairs,seed,rel_frob_error,test_accuracy,t_featurize_ms,t_compress_ms,t_train_ms";

/// `%.6g`-style formatting: 6 significant digits, trailing zeros dropped.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let fixed = format!("{x:.decimals$}");
    if fixed.contains('.') {
        fixed.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        fixed
    }
}

pub fn emit_csv(rows: &[ResultRow]) -> String {
    let opt = |v: Option<f64>| v.map(format_sig6).unwrap_or_default();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.method,
            r.j_plus,
            r.j,
            r.j_effective,
            r.s_pairs.map(|s| s.to_string()).unwrap_or_default(),
            r.seed,
            opt(r.rel_frob_error),
            opt(r.test_accuracy),
            format_sig6(r.t_featurize_ms),
            format_sig6(r.t_compress_ms),
            format_sig6(r.t_train_ms),
        )
        .unwrap();
    }
    out
}

/// Load the configured train and test files with a shared dimension.
pub fn load_data(cfg: &ExperimentConfig) -> Result<(Dataset, Option<Dataset>)> {
    let path = cfg
        .train
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("no training file given".to_owned()))?;
    let train = libsvm::read_file(path)?;
    let test = cfg.test.as_deref().map(libsvm::read_file).transpose()?;
    align_dims(cfg, train, test)
}

pub fn align_dims(cfg: &ExperimentConfig, train: Dataset, test: Option<Dataset>) -> Result<(Dataset, Option<Dataset>)> {
    let seen = train.dim().max(test.as_ref().map_or(0, Dataset::dim));
    let dim = cfg.dim.unwrap_or(seen);
    if dim < seen {
        return Err(ConfigError::Invalid(format!("dim = {dim} is below the largest feature index {seen}")).into());
    }
    let train = train.with_dim(dim)?;
    let test = test.map(|t| t.with_dim(dim)).transpose()?;
    Ok((train, test))
}

struct Clock(bool);

impl Clock {
    fn time<T>(&self, f: impl FnOnce() -> T) -> (T, f64) {
        let start = Instant::now();
        let out = f();
        (out, self.since(start))
    }

    fn since(&self, start: Instant) -> f64 {
        if self.0 {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        }
    }
}

struct Eval {
    frob: Option<f64>,
    acc: Option<f64>,
    t_featurize: f64,
    t_train: f64,
}

struct Trial<'a> {
    cfg: &'a ExperimentConfig,
    train: &'a Dataset,
    test: Option<&'a Dataset>,
    seed: u64,
    clock: Clock,
}

impl Trial<'_> {
    fn evaluate(&self, src: &dyn FeatureSource) -> Result<Eval> {
        let cfg = self.cfg;
        let mut ev = Eval {
            frob: None,
            acc: None,
            t_featurize: 0.0,
            t_train: 0.0,
        };
        if cfg.task.frobenius() {
            let m = cfg.frob_m.min(self.train.len());
            let est = estimate_frobenius_error(self.train, src, &cfg.kernel, m, self.seed)?;
            ev.frob = Some(est.relative_error);
        }
        if cfg.task.classify() {
            let test = self
                .test
                .ok_or_else(|| ConfigError::Invalid("classification needs a test file".to_owned()))?;
            let (train_y, test_y) = match (self.train.labels(), test.labels()) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(ConfigError::Invalid("classification needs labels".to_owned()).into()),
            };
            let all_train: Vec<usize> = (0..self.train.len()).collect();
            let all_test: Vec<usize> = (0..test.len()).collect();
            let (zs, t_feat) = self.clock.time(|| -> Result<_> {
                Ok((src.feature_rows(self.train, &all_train)?, src.feature_rows(test, &all_test)?))
            });
            let (z_train, z_test) = zs?;
            let params = SvmParams {
                c: cfg.svm_c,
                tol: cfg.svm_tol,
                max_sweeps: cfg.svm_max_sweeps,
                seed: self.seed,
                bias: cfg.svm_bias,
            };
            let (model, t_train) = self.clock.time(|| svm_fit(&z_train, train_y, &params));
            ev.acc = Some(svm_accuracy(&model?, &z_test, test_y)?);
            ev.t_featurize = t_feat;
            ev.t_train = t_train;
        }
        Ok(ev)
    }

    fn row(&self, method: Method, j: usize, j_effective: usize, ev: &Eval, t_feat: f64, t_comp: f64) -> ResultRow {
        ResultRow {
            method,
            j_plus: self.cfg.j_plus,
            j,
            j_effective,
            s_pairs: method.is_coreset().then_some(self.cfg.s_pairs),
            seed: self.seed,
            rel_frob_error: ev.frob,
            test_accuracy: ev.acc,
            t_featurize_ms: t_feat + ev.t_featurize,
            t_compress_ms: t_comp,
            t_train_ms: ev.t_train,
        }
    }

    fn sample(&self, j: usize) -> (featcomp_core::Result<FeatureMapParams>, f64) {
        let cfg = self.cfg;
        self.clock.time(|| {
            FeatureMapParams::sample(&cfg.kernel, &cfg.strategy(self.seed), j, self.train.dim(), cfg.scaling)
        })
    }

    fn run(&self, rows: &mut Vec<ResultRow>) -> Result<()> {
        let cfg = self.cfg;
        let needs_full = cfg.methods.iter().any(|&m| m != Method::Rfm);
        let full = if needs_full {
            let (p, t) = self.sample(cfg.j_plus);
            Some((p?, t))
        } else {
            None
        };
        for &method in &cfg.methods {
            match method {
                Method::Rfm => {
                    for &j in &cfg.j {
                        let (params, t) = self.sample(j);
                        let ev = self.evaluate(&params?)?;
                        rows.push(self.row(method, j, j, &ev, t, 0.0));
                    }
                }
                Method::RfmJl => {
                    let (params, t_full) = full.as_ref().expect("full draw sampled");
                    for &j in &cfg.j {
                        let (proj, t_comp) = self.clock.time(|| JlProjection::new(self.seed, cfg.j_plus, j));
                        let proj = proj?;
                        let src = JlFeatureMap {
                            params,
                            projection: &proj,
                            batch_rows: JL_BATCH_ROWS,
                        };
                        let ev = self.evaluate(&src)?;
                        rows.push(self.row(method, j, j, &ev, *t_full, t_comp));
                    }
                }
                Method::RfmFw | Method::RfmGiga => {
                    let (params, t_full) = full.as_ref().expect("full draw sampled");
                    for (j, weights, t_comp) in self.compress(method, params)? {
                        let cm = CompressedMap::new(params, &weights)?.with_kernel(cfg.kernel);
                        let ev = self.evaluate(&cm)?;
                        rows.push(self.row(method, j, weights.support_len(), &ev, *t_full, t_comp));
                    }
                }
            }
        }
        Ok(())
    }

    /// One solver run up to the largest requested J; smaller J values take
    /// the intermediate iterates. Returns (J, weights, elapsed ms).
    fn compress(&self, method: Method, params: &FeatureMapParams) -> Result<Vec<(usize, WeightVector, f64)>> {
        let cfg = self.cfg;
        let start = Instant::now();
        let pairs = sample_pairs(self.train.len(), cfg.s_pairs, self.seed)?;
        let cp = build_problem(self.train, params, &pairs)?;
        let max_j = cfg.j.iter().copied().max().expect("validated non-empty");
        let mut snapshots: Vec<(usize, Vec<f64>, f64)> = Vec::new();
        let observe = |it: &Iterate<'_>| {
            if it.iteration < max_j && cfg.j.contains(&it.iteration) {
                snapshots.push((it.iteration, it.weights.to_vec(), self.clock.since(start)));
            }
        };
        let result = match method {
            Method::RfmFw => frank_wolfe_observed(&cp, max_j, observe)?,
            _ => giga_observed(&cp, max_j, observe)?,
        };
        let t_total = self.clock.since(start);
        let mut out = Vec::with_capacity(cfg.j.len());
        for &j in &cfg.j {
            match snapshots.iter().find(|s| s.0 == j) {
                Some((_, w, t)) => out.push((j, WeightVector::from_dense(w)?, *t)),
                // the largest J, or the solver converged before reaching J
                None => out.push((j, result.weights.clone(), t_total)),
            }
        }
        Ok(out)
    }
}

/// Run every trial of `cfg` on in-memory data; rows sorted by (method, J, seed).
pub fn run_on(cfg: &ExperimentConfig, train: &Dataset, test: Option<&Dataset>) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if train.len() < 2 {
        return Err(ConfigError::Invalid("training set needs at least two rows".to_owned()).into());
    }
    let mut rows = Vec::new();
    for t in 0..cfg.trials as u64 {
        let trial = Trial {
            cfg,
            train,
            test,
            seed: cfg.base_seed.wrapping_add(t),
            clock: Clock(cfg.timings),
        };
        trial.run(&mut rows)?;
    }
    rows.sort_by_key(ResultRow::sort_key);
    Ok(rows)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let (train, test) = load_data(cfg)?;
    run_on(cfg, &train, test.as_ref())
}

/// Rerun at each pair count; every trial keeps its feature draw across S.
pub fn sweep_s(cfg: &ExperimentConfig, s_values: &[usize], train: &Dataset, test: Option<&Dataset>) -> Result<Vec<ResultRow>> {
    if !cfg.methods.iter().any(|m| m.is_coreset()) {
        return Err(ConfigError::Invalid("sweep-s needs rfm-fw or rfm-giga".to_owned()).into());
    }
    let mut rows = Vec::new();
    for &s in s_values {
        let mut c = cfg.clone();
        c.s_pairs = s;
        rows.extend(run_on(&c, train, test)?);
    }
    rows.sort_by_key(ResultRow::sort_key);
    Ok(rows)
}

pub fn sweep_j(cfg: &ExperimentConfig, j_values: &[usize], train: &Dataset, test: Option<&Dataset>) -> Result<Vec<ResultRow>> {
    let mut c = cfg.clone();
    c.j = j_values.to_vec();
    c.j.sort_unstable();
    c.j.dedup();
    run_on(&c, train, test)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvRow {
    pub gamma: f64,
    pub c: f64,
    pub mean_accuracy: f64,
}

/// Grid search over (γ, C) by k-fold cross-validation on a seeded subsample
/// of the training set, using the first configured method at the largest J.
pub fn cv(
    cfg: &ExperimentConfig,
    train: &Dataset,
    gammas: &[f64],
    cs: &[f64],
    folds: usize,
    subsample: usize,
) -> Result<Vec<CvRow>> {
    if folds < 2 {
        return Err(ConfigError::Invalid("cv needs at least two folds".to_owned()).into());
    }
    let n = subsample.min(train.len());
    if n < folds * 2 {
        return Err(ConfigError::Invalid("subsample too small for the number of folds".to_owned()).into());
    }
    let idx = featcomp_core::downstream::sample_without_replacement(train.len(), n, cfg.base_seed)?;
    let mut base = cfg.clone();
    base.methods.truncate(1);
    base.j = vec![cfg.j.iter().copied().max().unwrap_or(1)];
    base.task = crate::config::Task::Classify;
    base.trials = 1;
    base.timings = false;
    let mut out = Vec::new();
    for &gamma in gammas {
        for &c in cs {
            let mut run = base.clone();
            run.set("gamma", &gamma.to_string())?;
            run.svm_c = c;
            let mut total = 0.0;
            for f in 0..folds {
                let (held, kept): (Vec<usize>, Vec<usize>) = idx.iter().enumerate().fold(
                    (Vec::new(), Vec::new()),
                    |(mut h, mut k), (pos, &i)| {
                        if pos % folds == f {
                            h.push(i)
                        } else {
                            k.push(i)
                        }
                        (h, k)
                    },
                );
                let fit = train.select(&kept)?;
                let eval = train.select(&held)?;
                let rows = run_on(&run, &fit, Some(&eval))?;
                total += rows[0].test_accuracy.unwrap_or(0.0);
            }
            out.push(CvRow {
                gamma,
                c,
                mean_accuracy: total / folds as f64,
            });
        }
    }
    Ok(out)
}

pub fn emit_cv_csv(rows: &[CvRow]) -> String {
    let mut out = String::from("gamma,c,mean_accuracy\n");
    for r in rows {
        writeln!(out, "{},{},{}", format_sig6(r.gamma), format_sig6(r.c), format_sig6(r.mean_accuracy)).unwrap();
    }
    out
}

/// Compressed feature map for the first configured method at the largest J.
/// Plain RFM keeps J fresh features with unit weights; RFM-JL has no
/// compressed-map representation.
pub fn compress(cfg: &ExperimentConfig, train: &Dataset) -> Result<CompressedMap> {
    cfg.validate()?;
    let method = cfg.methods[0];
    let j = cfg.j.iter().copied().max().expect("validated non-empty");
    let mut c = cfg.clone();
    c.j = vec![j];
    c.timings = false;
    let trial = Trial {
        cfg: &c,
        train,
        test: None,
        seed: cfg.base_seed,
        clock: Clock(false),
    };
    let cm = match method {
        Method::Rfm => {
            let params = trial.sample(j).0?;
            CompressedMap::new(&params, &WeightVector::ones(j))?
        }
        Method::RfmJl => {
            return Err(ConfigError::Invalid("rfm-jl cannot be stored as a compressed feature map".to_owned()).into())
        }
        Method::RfmFw | Method::RfmGiga => {
            let params = trial.sample(cfg.j_plus).0?;
            let (_, w, _) = trial.compress(method, &params)?.pop().expect("one J requested");
            CompressedMap::new(&params, &w)?
        }
    };
    Ok(cm.with_kernel(cfg.kernel))
}
