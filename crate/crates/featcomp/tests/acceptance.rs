//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers as arguments to run a subset.

use std::path::Path;
use std::time::{Duration, Instant};

use featcomp::config::{ExperimentConfig, Method, Task};
use featcomp::harness::{run_on, sweep_s, ResultRow};
use featcomp::libsvm;
use featcomp::synthetic::BlobSpec;
use featcomp_core::coreset::{frank_wolfe_observed, giga};
use featcomp_core::downstream::kernel_matrix;
use featcomp_core::linalg::{dot, Cholesky, Matrix};
use featcomp_core::*;

type Outcome = std::result::Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn rff(spec: &KernelSpec, j: usize, p: usize, seed: u64) -> FeatureMapParams {
    FeatureMapParams::sample(spec, &SamplingStrategy::monte_carlo(seed), j, p, FeatureScaling::Unbiased).unwrap()
}

/// N = 2000, p = 10 blobs shared by the comparison criteria.
fn comparison_data() -> Dataset {
    BlobSpec::new(2000, 10, 2024).dataset()
}

fn comparison_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.kernel = KernelSpec::rbf(1.0).unwrap();
    cfg.j_plus = 2000;
    cfg.j = vec![200];
    cfg.s_pairs = 10_000;
    cfg.trials = 20;
    cfg.task = Task::Frobenius;
    cfg.frob_m = 1000;
    cfg.timings = false;
    cfg
}

fn errors_of(rows: &[ResultRow], method: Method) -> Vec<f64> {
    rows.iter().filter(|r| r.method == method).map(|r| r.rel_frob_error.unwrap()).collect()
}

fn c01_feature_concentration() -> Outcome {
    let start = Instant::now();
    let (x, _) = BlobSpec::new(200, 5, 1).generate();
    let spec = KernelSpec::rbf(1.0).unwrap();
    let params = rff(&spec, 10_000, 5, 1);
    let pairs = sample_pairs(200, 500, 1).unwrap();
    let mut worst: f64 = 0.0;
    for &(i, j) in &pairs.pairs {
        let zi = featurize(&params, x.row(i)).unwrap();
        let zj = featurize(&params, x.row(j)).unwrap();
        let k = eval_kernel(&spec, x.row(i), x.row(j)).unwrap();
        worst = worst.max((dot(&zi, &zj) - k).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 0.05 && secs < 30.0, format!("max |z(x)'z(y) - k(x,y)| = {worst:.4} (<= 0.05), {secs:.1}s (< 30s)"))
}

fn c02_all_pairs_objective() -> Outcome {
    let (n, j_plus, p) = (30, 40, 3);
    let (x, _) = BlobSpec::new(n, p, 2).generate();
    let spec = KernelSpec::rbf(1.0).unwrap();
    let params = rff(&spec, j_plus, p, 2);
    let ps = PairSample::all_pairs(n);
    let cp = build_problem(&x, &params, &ps).unwrap();
    // features straight from Ω and b, independent of the featurize path
    let amp = params.amplitude();
    let z: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..j_plus)
                .map(|j| amp * (dot(params.omega().row(j), x.row(i)) + params.phases()[j]).cos())
                .collect()
        })
        .collect();
    let oracle = |w: &[f64]| {
        let mut acc = 0.0;
        for b in 1..n {
            for a in 0..b {
                let full: f64 = (0..j_plus).map(|j| z[a][j] * z[b][j]).sum();
                let weighted: f64 = (0..j_plus).map(|j| w[j] * z[a][j] * z[b][j]).sum();
                acc += (full - weighted).powi(2);
            }
        }
        acc / (n * (n - 1) / 2) as f64
    };
    let mut weights = vec![vec![1.0; j_plus], vec![0.0; j_plus]];
    weights.push((0..j_plus).map(|j| ((j * 7) % 5) as f64 * 0.4).collect());
    weights.push(giga(&cp, 10).unwrap().weights.to_dense());
    let mut worst: f64 = 0.0;
    for w in &weights {
        let got = objective(&cp, &WeightVector::from_dense(w).unwrap()).unwrap();
        worst = worst.max((got - oracle(w)).abs());
    }
    check(
        ps.len() == 435 && worst <= 1e-10,
        format!("{} pairs, max |objective - Gram oracle| = {worst:.2e} (<= 1e-10)", ps.len()),
    )
}

/// 50 instances with J₊ ≤ 200 and S ≤ 500.
fn instances() -> Vec<CoresetProblem> {
    let spec = KernelSpec::rbf(1.0).unwrap();
    (0..50u64)
        .map(|k| {
            let j_plus = 20 + (k as usize * 37) % 181;
            let s = 50 + (k as usize * 89) % 451;
            let (x, _) = BlobSpec::new(80, 4, 100 + k).generate();
            let params = rff(&spec, j_plus, 4, k);
            build_problem(&x, &params, &sample_pairs(80, s, k).unwrap()).unwrap()
        })
        .collect()
}

fn c03_frank_wolfe_invariants(probs: &[CoresetProblem]) -> Outcome {
    let mut worst_mass: f64 = 0.0;
    let mut failures = Vec::new();
    for (k, cp) in probs.iter().enumerate() {
        let sigma = cp.sigma();
        let sig = cp.row_norms().to_vec();
        let mut prev = f64::INFINITY;
        let mut monotone = true;
        let mut sparse = true;
        frank_wolfe_observed(cp, 40, |it| {
            let mass: f64 = it.weights.iter().zip(&sig).map(|(w, s)| w * s).sum();
            worst_mass = worst_mass.max((mass - sigma).abs() / sigma);
            monotone &= it.objective <= prev;
            sparse &= it.weights.iter().filter(|&&w| w != 0.0).count() <= it.iteration;
            prev = it.objective;
        })
        .unwrap();
        let exact = objective(cp, &WeightVector::ones(cp.j_plus())).unwrap() == 0.0;
        if !(monotone && sparse && exact) {
            failures.push(k);
        }
    }
    check(
        worst_mass <= 1e-8 && failures.is_empty(),
        format!(
            "50 instances: max |sum w_j s_j - s|/s = {worst_mass:.2e} (<= 1e-8), monotone/sparse/exact-at-ones failures {failures:?}"
        ),
    )
}

fn log_slope(objectives: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = objectives
        .iter()
        .enumerate()
        .filter(|(_, &o)| o > 0.0)
        .map(|(i, &o)| (i as f64, o.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let mx = mean(&pts.iter().map(|p| p.0).collect::<Vec<_>>());
    let my = mean(&pts.iter().map(|p| p.1).collect::<Vec<_>>());
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

fn best_one_sparse(cp: &CoresetProblem) -> f64 {
    let r = cp.target();
    (0..cp.j_plus())
        .filter(|&j| cp.row_norms()[j] > 0.0)
        .map(|j| {
            let row = cp.row(j);
            let w = (dot(r, &row) / dot(&row, &row)).max(0.0);
            objective(cp, &WeightVector::from_entries(cp.j_plus(), &[(j, w)]).unwrap()).unwrap()
        })
        .fold(f64::INFINITY, f64::min)
}

fn c04_greedy_decay(probs: &[CoresetProblem]) -> Outcome {
    let mut bad = Vec::new();
    let mut max_slope = f64::NEG_INFINITY;
    let mut worst_ratio: f64 = 0.0;
    for (k, cp) in probs.iter().enumerate() {
        let fw = featcomp_core::frank_wolfe(cp, 20).unwrap();
        let g = giga(cp, 20).unwrap();
        let slopes = [log_slope(&fw.objectives), log_slope(&g.objectives)];
        let one = best_one_sparse(cp);
        let ratio = g.final_objective() / one;
        worst_ratio = worst_ratio.max(ratio);
        for s in slopes.iter().flatten() {
            max_slope = max_slope.max(*s);
        }
        if slopes.iter().any(|s| !matches!(s, Some(v) if *v < 0.0)) || !(g.final_objective() < one) {
            bad.push(k);
        }
    }
    check(
        bad.is_empty(),
        format!(
            "largest log-objective slope {max_slope:.3} (< 0); worst GIGA/one-sparse ratio {worst_ratio:.3} (< 1); failing instances {bad:?}"
        ),
    )
}

fn c05_compression_beats_fresh_features() -> Outcome {
    let start = Instant::now();
    let data = comparison_data();
    let mut cfg = comparison_config();
    cfg.methods = vec![Method::Rfm, Method::RfmJl, Method::RfmGiga];
    let rows = run_on(&cfg, &data, None).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let (rfm, jl, gg) = (
        mean(&errors_of(&rows, Method::Rfm)),
        mean(&errors_of(&rows, Method::RfmJl)),
        mean(&errors_of(&rows, Method::RfmGiga)),
    );
    check(
        gg < rfm && gg < jl && secs < 300.0,
        format!("20 trials mean error: giga {gg:.4} < rfm {rfm:.4} and < jl {jl:.4}; {secs:.0}s (< 300s)"),
    )
}

/// Trials for the S sweep; the 10⁵-pair problems dominate the runtime.
const SWEEP_TRIALS: usize = 10;

fn c06_pair_count_sweep() -> Outcome {
    let data = comparison_data();
    let mut cfg = comparison_config();
    cfg.methods = vec![Method::RfmGiga];
    cfg.trials = SWEEP_TRIALS;
    let s_values = [100, 1000, 10_000, 100_000];
    let rows = sweep_s(&cfg, &s_values, &data, None).map_err(|e| e.to_string())?;
    let means: Vec<f64> = s_values
        .iter()
        .map(|&s| mean(&rows.iter().filter(|r| r.s_pairs == Some(s)).map(|r| r.rel_frob_error.unwrap()).collect::<Vec<_>>()))
        .collect();
    let gap = means[3] - means[2];
    check(
        gap < 0.02,
        format!(
            "{SWEEP_TRIALS} trials, mean error at S=1e2..1e5: {:.4} {:.4} {:.4} {:.4}; S=1e5 minus S=1e4 = {gap:.4} (< 0.02)",
            means[0], means[1], means[2], means[3]
        ),
    )
}

fn c07_ridge_bound() -> Outcome {
    let (n, lambda0, m_bound, p) = (100, 0.1, 1.0, 5);
    let spec = KernelSpec::rbf(1.0).unwrap();
    let lambda = n as f64 * lambda0;
    let mut tightest: f64 = 0.0;
    let mut violations = 0;
    for seed in 0..10u64 {
        let (x, _) = BlobSpec::new(n, p, 300 + seed).generate();
        let (test, _) = BlobSpec::new(50, p, 400 + seed).generate();
        let y: Vec<f64> = (0..n).map(|i| (x[(i, 0)] * 5.0 + seed as f64).sin() * m_bound).collect();
        let all: Vec<usize> = (0..n).collect();
        let k = kernel_matrix(&spec, &x, &all).unwrap();
        let z = rff(&spec, 100, p, seed).featurize_rows(&x, &all).unwrap();
        let k_hat = z.mul_transpose(&z).unwrap();
        let dual = |g: &Matrix| {
            let mut a = g.clone();
            for i in 0..n {
                a[(i, i)] += lambda;
            }
            Cholesky::factor(&a).unwrap().solve(&y).unwrap()
        };
        let (a_star, a_hat) = (dual(&k), dual(&k_hat));
        let bound = m_bound / (lambda0 * lambda0 * n as f64) * k_hat.sub(&k).unwrap().frobenius_norm();
        for t in 0..50 {
            let kx: Vec<f64> = (0..n).map(|i| spec.eval(test.row(t), x.row(i)).unwrap()).collect();
            let gap = (dot(&kx, &a_hat) - dot(&kx, &a_star)).abs();
            tightest = tightest.max(gap / bound);
            if gap > bound {
                violations += 1;
            }
        }
    }
    check(
        violations == 0,
        format!("500 test points over 10 seeds: {violations} violations, largest |f_hat - f*| / bound = {tightest:.3}"),
    )
}

fn c08_pca_residual_bound() -> Outcome {
    let (m, p) = (100, 5);
    let spec = KernelSpec::rbf(1.0).unwrap();
    let mut violations = 0;
    let mut tightest: f64 = 0.0;
    for seed in 0..10u64 {
        let (x, _) = BlobSpec::new(m, p, 500 + seed).generate();
        let all: Vec<usize> = (0..m).collect();
        let k = kernel_matrix(&spec, &x, &all).unwrap();
        let z = rff(&spec, 100, p, seed).featurize_rows(&x, &all).unwrap();
        let k_hat = z.mul_transpose(&z).unwrap();
        let diff = k.sub(&k_hat).unwrap().frobenius_norm();
        for l in [1, 10, 50] {
            let gap = (pca_residual(&k, l).unwrap() - pca_residual(&k_hat, l).unwrap()).abs();
            let bound = (1.0 - l as f64 / m as f64) * diff;
            tightest = tightest.max(gap / bound);
            if gap > bound {
                violations += 1;
            }
        }
    }
    check(
        violations == 0,
        format!("l in {{1,10,50}} over 10 seeds: {violations} violations, largest gap / bound = {tightest:.2e}"),
    )
}

fn c09_jl_inner_products() -> Outcome {
    let d = 512;
    let raw_u: Vec<f64> = (0..d).map(|i| ((i * 31 % 17) as f64 - 8.0) + 0.5).collect();
    let raw_v: Vec<f64> = (0..d).map(|i| ((i * 13 % 11) as f64 - 5.0) + raw_u[i] * 0.8).collect();
    let unit = |v: &[f64]| {
        let n = dot(v, v).sqrt();
        v.iter().map(|x| x / n).collect::<Vec<_>>()
    };
    let (u, v) = (unit(&raw_u), unit(&raw_v));
    let truth = dot(&u, &v);
    let est: Vec<f64> = (0..2000u64)
        .map(|seed| {
            let a = JlProjection::new(seed, d, 64).unwrap();
            dot(&a.project(&u).unwrap(), &a.project(&v).unwrap())
        })
        .collect();
    let m = mean(&est);
    check((m - truth).abs() <= 0.02, format!("mean f(u)'f(v) = {m:.4}, u'v = {truth:.4}, |diff| <= 0.02"))
}

fn c10_qmc_variant() -> Outcome {
    let start = Instant::now();
    let data = comparison_data();
    let mut cfg = comparison_config();
    cfg.methods = vec![Method::Rfm, Method::RfmJl, Method::RfmGiga];
    cfg.sampling = SamplingKind::HaltonQmc;
    let rows = run_on(&cfg, &data, None).map_err(|e| e.to_string())?;
    let (rfm, jl, gg) = (
        mean(&errors_of(&rows, Method::Rfm)),
        mean(&errors_of(&rows, Method::RfmJl)),
        mean(&errors_of(&rows, Method::RfmGiga)),
    );
    let secs = start.elapsed().as_secs_f64();
    check(
        gg < rfm && gg < jl,
        format!("Halton features, 20 trials mean error: giga {gg:.4} < rfm {rfm:.4} and < jl {jl:.4} ({secs:.0}s)"),
    )
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let train = dir.path().join("train.svm");
    let test = dir.path().join("test.svm");
    libsvm::write_file(&train, &BlobSpec::new(300, 6, 7).dataset()).map_err(|e| e.to_string())?;
    libsvm::write_file(&test, &BlobSpec::new(100, 6, 8).dataset()).map_err(|e| e.to_string())?;
    let run = |out: &Path| {
        std::process::Command::new(env!("CARGO_BIN_EXE_featcomp"))
            .args(["eval", "--train", train.to_str().unwrap(), "--test", test.to_str().unwrap()])
            .args(["--method", "rfm,rfm-jl,rfm-fw,rfm-giga", "--jplus", "300", "--j", "10,40"])
            .args(["--s", "2000", "--trials", "3", "--seed", "5", "--task", "both"])
            .args(["--set", "timings=false", "--set", "frob_m=200", "--out", out.to_str().unwrap()])
            .status()
            .map(|s| s.success())
            .unwrap_or(false)
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    if !(run(&a) && run(&b)) {
        return Err("harness run failed".to_owned());
    }
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let lines = a.iter().filter(|&&c| c == b'\n').count();
    check(a == b && lines == 25, format!("two CLI runs, {lines} lines each, byte-identical: {}", a == b))
}

fn c12_real_data() -> Outcome {
    let start = Instant::now();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let train = libsvm::read_file(&dir.join("digits.train")).map_err(|e| e.to_string())?;
    let test = libsvm::read_file(&dir.join("digits.test")).map_err(|e| e.to_string())?;
    let mut cfg = ExperimentConfig::default();
    cfg.kernel = KernelSpec::rbf(0.001).unwrap();
    cfg.task = Task::Classify;
    cfg.timings = false;
    cfg.svm_c = 1.0;
    cfg.methods = vec![Method::RfmGiga];
    cfg.j = vec![500];
    let giga_rows = run_on(&cfg, &train, Some(&test)).map_err(|e| e.to_string())?;
    cfg.methods = vec![Method::Rfm];
    cfg.j = vec![cfg.j_plus];
    let rfm_rows = run_on(&cfg, &train, Some(&test)).map_err(|e| e.to_string())?;
    let (g, r) = (giga_rows[0].test_accuracy.unwrap(), rfm_rows[0].test_accuracy.unwrap());
    let secs = start.elapsed().as_secs_f64();
    check(
        (g - r).abs() <= 0.05 && secs < 600.0,
        format!(
            "digits (1397 train / 400 test), J+=5000, S=20000: giga J=500 accuracy {g:.4} vs rfm J=5000 {r:.4}, |diff| <= 0.05; {secs:.0}s (< 600s)"
        ),
    )
}

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |k: usize| wanted.is_empty() || wanted.contains(&k);
    let probs = if want(3) || want(4) { instances() } else { Vec::new() };
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, "feature concentration", Box::new(c01_feature_concentration)),
        (2, "all-pairs objective oracle", Box::new(c02_all_pairs_objective)),
        (3, "Frank-Wolfe invariants", Box::new(|| c03_frank_wolfe_invariants(&probs))),
        (4, "greedy objective decay", Box::new(|| c04_greedy_decay(&probs))),
        (5, "compression beats fresh features", Box::new(c05_compression_beats_fresh_features)),
        (6, "pair count sweep", Box::new(c06_pair_count_sweep)),
        (7, "ridge perturbation bound", Box::new(c07_ridge_bound)),
        (8, "PCA residual bound", Box::new(c08_pca_residual_bound)),
        (9, "JL inner products", Box::new(c09_jl_inner_products)),
        (10, "quasi-Monte-Carlo features", Box::new(c10_qmc_variant)),
        (11, "deterministic CSV", Box::new(c11_determinism)),
        (12, "real-data smoke test", Box::new(c12_real_data)),
    ];
    let mut failed = 0;
    let mut total = Duration::ZERO;
    for (k, name, run) in &criteria {
        if !want(*k) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_owned()));
        total += start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {k:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {k:>2} FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {failed} failed, {:.0}s total", total.as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
