//! Config-driven experiments: sweeps, convergence traces, and the verification
//! suite behind the command-line tool.

pub mod config;
pub mod output;
pub mod run;
pub mod verify;

pub use config::{Axis, ConfigError, ExperimentConfig, Scheme, SweepConfig};
pub use run::{run_convergence, run_optimize, run_sweep, RunOptions, SweepRow, TraceRow};
pub use verify::{run_verify, CheckResult, VerifyReport};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "BDRIS_WORKERS";
