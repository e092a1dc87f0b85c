//! File formats, experiment harness and command-line front end for
//! compressed random Fourier features.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod harness;
pub mod libsvm;
pub mod synthetic;

pub use config::{ConfigError, ExperimentConfig, Method, Task};
pub use error::HarnessError;
pub use harness::{emit_csv, run_experiment, run_on, sweep_j, sweep_s, ResultRow};
