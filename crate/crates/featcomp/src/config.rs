//! Experiment configuration: a flat `key = value` file plus overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use featcomp_core::{FeatureScaling, KernelFamily, KernelSpec, SamplingKind, SamplingStrategy};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Feature construction under comparison. Declaration order is CSV order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Rfm,
    RfmJl,
    RfmFw,
    RfmGiga,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Rfm, Method::RfmJl, Method::RfmFw, Method::RfmGiga];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rfm => "rfm",
            Method::RfmJl => "rfm-jl",
            Method::RfmFw => "rfm-fw",
            Method::RfmGiga => "rfm-giga",
        }
    }

    pub fn is_coreset(self) -> bool {
        matches!(self, Method::RfmFw | Method::RfmGiga)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| "expected one of rfm, rfm-jl, rfm-fw, rfm-giga".to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Frobenius,
    Classify,
    Both,
}

impl Task {
    pub fn frobenius(self) -> bool {
        matches!(self, Task::Frobenius | Task::Both)
    }

    pub fn classify(self) -> bool {
        matches!(self, Task::Classify | Task::Both)
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "frobenius" => Ok(Task::Frobenius),
            "classify" => Ok(Task::Classify),
            "both" => Ok(Task::Both),
            _ => Err("expected frobenius, classify or both".to_owned()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub kernel: KernelSpec,
    pub methods: Vec<Method>,
    pub sampling: SamplingKind,
    pub scramble: bool,
    pub scaling: FeatureScaling,
    pub j_plus: usize,
    pub j: Vec<usize>,
    pub s_pairs: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub task: Task,
    pub svm_c: f64,
    pub svm_tol: f64,
    pub svm_max_sweeps: usize,
    pub svm_bias: bool,
    /// Rows sampled for the Frobenius error (capped at N).
    pub frob_m: usize,
    /// Overrides the feature dimension so train and test agree.
    pub dim: Option<usize>,
    /// Record wall-clock phase timings; when off all timing fields are 0.
    pub timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            train: None,
            test: None,
            kernel: KernelSpec::rbf(1.0).expect("positive gamma"),
            methods: vec![Method::RfmGiga],
            sampling: SamplingKind::MonteCarlo,
            scramble: false,
            scaling: FeatureScaling::Unbiased,
            j_plus: 5000,
            j: vec![100],
            s_pairs: 20_000,
            trials: 1,
            base_seed: 0,
            task: Task::Frobenius,
            svm_c: 1.0,
            svm_tol: 0.1,
            svm_max_sweeps: 1000,
            svm_bias: true,
            frob_m: 1000,
            dim: None,
            timings: true,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key: key.to_owned(),
        value: value.to_owned(),
        reason: e.to_string(),
    })
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn bad(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_owned(),
        value: value.to_owned(),
        reason: reason.to_owned(),
    }
}

impl ExperimentConfig {
    /// Parse `key = value` lines over the defaults. `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.merge_text(text)?;
        Ok(cfg)
    }

    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: n + 1 })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "train" => self.train = Some(PathBuf::from(value)),
            "test" => self.test = Some(PathBuf::from(value)),
            "kernel" => {
                let family = KernelFamily::parse(value).ok_or_else(|| bad(key, value, "expected rbf, laplace or cauchy"))?;
                self.kernel.family = family;
            }
            "gamma" => {
                let gamma: f64 = parse_value(key, value)?;
                self.kernel = KernelSpec::new(self.kernel.family, gamma).map_err(|e| bad(key, value, &e.to_string()))?;
            }
            "method" => self.methods = parse_list(key, value)?,
            "sampling" => {
                self.sampling = match value {
                    "mc" | "monte-carlo" => SamplingKind::MonteCarlo,
                    "halton" | "qmc" => SamplingKind::HaltonQmc,
                    _ => return Err(bad(key, value, "expected mc or halton")),
                }
            }
            "scramble" => self.scramble = parse_value(key, value)?,
            "scaling" => {
                self.scaling = match value {
                    "unbiased" => FeatureScaling::Unbiased,
                    "unit-bounded" => FeatureScaling::UnitBounded,
                    _ => return Err(bad(key, value, "expected unbiased or unit-bounded")),
                }
            }
            "jplus" => self.j_plus = parse_value(key, value)?,
            "j" => self.j = parse_list(key, value)?,
            "s" => self.s_pairs = parse_value(key, value)?,
            "trials" => self.trials = parse_value(key, value)?,
            "seed" => self.base_seed = parse_value(key, value)?,
            "task" => self.task = parse_value(key, value)?,
            "svm_c" => self.svm_c = parse_value(key, value)?,
            "svm_tol" => self.svm_tol = parse_value(key, value)?,
            "svm_max_sweeps" => self.svm_max_sweeps = parse_value(key, value)?,
            "svm_bias" => self.svm_bias = parse_value(key, value)?,
            "frob_m" => self.frob_m = parse_value(key, value)?,
            "dim" => self.dim = Some(parse_value(key, value)?),
            "timings" => self.timings = parse_value(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_owned())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_owned()));
        if self.methods.is_empty() {
            return invalid("no method selected");
        }
        if self.j.is_empty() {
            return invalid("no feature count j given");
        }
        if self.j_plus == 0 {
            return invalid("jplus must be positive");
        }
        if let Some(&bad_j) = self.j.iter().find(|&&j| j == 0 || j > self.j_plus) {
            return Err(ConfigError::Invalid(format!("j = {bad_j} must lie in 1..=jplus ({})", self.j_plus)));
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        if self.s_pairs == 0 && self.methods.iter().any(|m| m.is_coreset()) {
            return invalid("s must be at least 1 for rfm-fw and rfm-giga");
        }
        if self.frob_m == 0 {
            return invalid("frob_m must be positive");
        }
        if !(self.svm_c > 0.0) || !(self.svm_tol > 0.0) {
            return invalid("svm_c and svm_tol must be positive");
        }
        Ok(())
    }

    pub fn strategy(&self, seed: u64) -> SamplingStrategy {
        SamplingStrategy {
            kind: self.sampling,
            seed,
            scramble: self.scramble,
        }
    }
}
