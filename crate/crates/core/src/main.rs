use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bdris_crb::experiment::output::{
    sweep_gnuplot, trace_gnuplot, write_csv, write_json, OPTIMIZE_FILE, SWEEP_FILE, TRACE_FILE,
    VERIFY_FILE,
};
use bdris_crb::experiment::{
    run_convergence, run_optimize, run_sweep, run_verify, ConfigError, ExperimentConfig,
    RunOptions, Scheme, TraceRow, WORKERS_ENV,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// CRB-optimal scattering-matrix design for surface-assisted angle estimation.
#[derive(Parser)]
#[command(name = "bdris-crb", version, about)]
#[command(after_help = "Exit codes: 0 success, 1 runtime error, 2 invalid config or arguments, 3 verification failure.\n\
The worker-thread count is read from BDRIS_WORKERS (default: all cores).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the scattering matrix on the configured scenario.
    Optimize(Common),
    /// Sweep one parameter and write sweep.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Record wall time per row (makes the output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Write the per-iteration trace of the ascent to trace.csv.
    Converge(Common),
    /// Run the oracle suite and write verify.json.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of proposed,random_unitary,diagonal_baseline.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<Scheme>>,
    #[arg(long)]
    restarts: Option<usize>,
}

enum Failure {
    Config(String),
    Verify(String),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<bdris_crb::Error> for Failure {
    fn from(e: bdris_crb::Error) -> Self {
        match e {
            bdris_crb::Error::Config(m) => Failure::Config(m),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn load(common: &Common) -> Result<(ExperimentConfig, PathBuf), Failure> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(r) = common.restarts {
        if r == 0 {
            return Err(Failure::Config("--restarts must be at least 1".into()));
        }
        config.restarts = r;
    }
    if let Some(s) = &common.schemes {
        if s.is_empty() {
            return Err(Failure::Config("--schemes must not be empty".into()));
        }
        config.schemes = s.clone();
    }
    let out = common.out.clone().unwrap_or_else(|| config.output.clone());
    Ok((config, out))
}

fn configure_workers() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Config(format!("{WORKERS_ENV}={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Run(e.to_string()))
}

fn write_script(out: &Path, name: &str, text: &str) -> Result<(), Failure> {
    std::fs::write(out.join(name), text).map_err(|e| Failure::Run(e.to_string()))
}

fn scheme_names(config: &ExperimentConfig) -> Vec<&'static str> {
    config.schemes.iter().map(|s| s.name()).collect()
}

fn trace_rows(trace: &bdris_crb::OptimizerTrace) -> Vec<TraceRow> {
    trace
        .records
        .iter()
        .map(|r| TraceRow {
            scheme: Scheme::Proposed,
            iter: r.iter,
            g_value: r.g_value,
            crb_theta: r.crb_theta,
            crb_db: bdris_crb::experiment::run::crb_db(r.crb_theta),
            mu: Some(r.mu),
            eta: Some(r.eta),
            unitarity_drift: Some(r.unitarity_drift),
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_workers()?;
    match cli.command {
        Command::Optimize(common) => {
            let (config, out) = load(&common)?;
            let (summaries, trace) = run_optimize(&config)?;
            for s in &summaries {
                println!(
                    "{:<18} g = {:.6e}  crb = {:.6e} rad^2 ({:.2} dB)  iterations = {}",
                    s.scheme.name(),
                    s.g_value,
                    s.crb_theta,
                    s.crb_db,
                    s.iterations
                );
            }
            write_json(&out, OPTIMIZE_FILE, &summaries)?;
            if let Some(t) = trace {
                write_csv(&out, TRACE_FILE, &trace_rows(&t))?;
            }
        }
        Command::Sweep { common, timing } => {
            let (config, out) = load(&common)?;
            let rows = run_sweep(&config, RunOptions { timing })?;
            let path = write_csv(&out, SWEEP_FILE, &rows)?;
            if config.gnuplot {
                let axis = config.sweep.as_ref().expect("sweep ran").axis;
                write_script(&out, "sweep.gp", &sweep_gnuplot(axis, &scheme_names(&config)))?;
            }
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        Command::Converge(common) => {
            let (config, out) = load(&common)?;
            let (rows, status) = run_convergence(&config)?;
            let path = write_csv(&out, TRACE_FILE, &rows)?;
            if config.gnuplot {
                write_script(&out, "trace.gp", &trace_gnuplot(&scheme_names(&config)))?;
            }
            println!("ascent status {status:?}; wrote {}", path.display());
        }
        Command::Verify(common) => {
            let (config, out) = load(&common)?;
            let report = run_verify(&config)?;
            let path = write_json(&out, VERIFY_FILE, &report)?;
            for c in &report.checks {
                println!(
                    "{} {:<20} measured {:.3e} (threshold {:.3e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.threshold
                );
            }
            println!("wrote {}", path.display());
            if !report.passed {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                return Err(Failure::Verify(format!("failed checks: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Verify(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
