use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use featcomp::config::{ConfigError, ExperimentConfig};
use featcomp::error::{HarnessError, Result};
use featcomp::harness::{self, emit_csv};
use featcomp::libsvm;
use featcomp::synthetic::BlobSpec;

#[derive(Parser)]
#[command(name = "featcomp", version, about = "Compress random Fourier features and benchmark the result")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a compressed feature map and write it as JSON.
    Compress(Common),
    /// Run trials and write one CSV row per (method, trial, J).
    Eval(Common),
    /// Error as a function of the number of sampled pairs.
    SweepS {
        #[command(flatten)]
        common: Common,
        /// Comma-separated pair counts.
        #[arg(long)]
        s_values: String,
    },
    /// Error as a function of the number of kept features.
    SweepJ {
        #[command(flatten)]
        common: Common,
        /// Comma-separated feature counts.
        #[arg(long)]
        j_values: String,
    },
    /// Grid search over gamma and C by cross-validation on a subsample.
    Cv {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "0.1,1,10")]
        gammas: String,
        #[arg(long, default_value = "0.1,1,10")]
        cs: String,
        #[arg(long, default_value_t = 3)]
        folds: usize,
        #[arg(long, default_value_t = 10_000)]
        subsample: usize,
    },
    /// Write a Gaussian-blob dataset in LIBSVM format.
    Synth {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        p: usize,
        #[arg(long, default_value_t = 4)]
        clusters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags shared by the experiment subcommands. They override `--config`.
#[derive(Args)]
struct Common {
    /// key = value file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    train: Option<String>,
    #[arg(long)]
    test: Option<String>,
    /// rbf, laplace or cauchy.
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Comma-separated list of rfm, rfm-jl, rfm-fw, rfm-giga.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    jplus: Option<String>,
    /// Comma-separated feature counts.
    #[arg(long)]
    j: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// frobenius, classify or both.
    #[arg(long)]
    task: Option<String>,
    /// mc or halton.
    #[arg(long)]
    sampling: Option<String>,
    /// Any other config key, as key=value. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| libsvm::LoadError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                ExperimentConfig::from_text(&text)?
            }
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("train", &self.train),
            ("test", &self.test),
            ("kernel", &self.kernel),
            ("gamma", &self.gamma),
            ("method", &self.method),
            ("jplus", &self.jplus),
            ("j", &self.j),
            ("s", &self.s),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("task", &self.task),
            ("sampling", &self.sampling),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| ConfigError::Invalid(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn list<T: std::str::FromStr>(key: &str, text: &str) -> Result<Vec<T>> {
    let values: Option<Vec<T>> = text.split(',').map(|s| s.trim().parse().ok()).collect();
    match values {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(ConfigError::BadValue {
            key: key.to_owned(),
            value: text.to_owned(),
            reason: "expected a comma-separated list of numbers".to_owned(),
        }
        .into()),
    }
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| HarnessError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compress(common) => {
            let cfg = common.config()?;
            let (train, _) = harness::load_data(&cfg)?;
            let cm = harness::compress(&cfg, &train)?;
            let json = serde_json::to_string_pretty(&cm).expect("compressed map serializes");
            write_out(common.out.as_ref(), &(json + "\n"))
        }
        Command::Eval(common) => {
            let cfg = common.config()?;
            let rows = harness::run_experiment(&cfg)?;
            write_out(common.out.as_ref(), &emit_csv(&rows))
        }
        Command::SweepS { common, s_values } => {
            let cfg = common.config()?;
            let s = list("s-values", &s_values)?;
            let (train, test) = harness::load_data(&cfg)?;
            let rows = harness::sweep_s(&cfg, &s, &train, test.as_ref())?;
            write_out(common.out.as_ref(), &emit_csv(&rows))
        }
        Command::SweepJ { common, j_values } => {
            let mut cfg = common.config()?;
            let j = list("j-values", &j_values)?;
            cfg.j = j.clone();
            cfg.validate()?;
            let (train, test) = harness::load_data(&cfg)?;
            let rows = harness::sweep_j(&cfg, &j, &train, test.as_ref())?;
            write_out(common.out.as_ref(), &emit_csv(&rows))
        }
        Command::Cv {
            common,
            gammas,
            cs,
            folds,
            subsample,
        } => {
            let cfg = common.config()?;
            let gammas = list("gammas", &gammas)?;
            let cs = list("cs", &cs)?;
            let (train, _) = harness::load_data(&cfg)?;
            let rows = harness::cv(&cfg, &train, &gammas, &cs, folds, subsample)?;
            write_out(common.out.as_ref(), &harness::emit_cv_csv(&rows))
        }
        Command::Synth {
            n,
            p,
            clusters,
            seed,
            out,
        } => {
            let spec = BlobSpec {
                clusters,
                ..BlobSpec::new(n, p, seed)
            };
            write_out(out.as_ref(), &libsvm::serialize(&spec.dataset()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
