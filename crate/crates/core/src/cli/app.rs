use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{classify, critical_frequencies, derive_spectral, ModelParams, Regime, DEFAULT_REL_TOL};
use crate::propagator::select_branch;

use super::config::{ScenarioConfig, SweepConfig};
use super::run::{run_scenario, scan_phase_diagram};
use super::selfcheck::run_checks;
use super::table::{emit, Destination, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cranked", version, about = "Entanglement dynamics of two modes coupled by -omega*l_z")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format: csv or jsonl.
    #[arg(long, global = true, default_value = "csv")]
    pub format: Format,
    /// Output path, `-` for standard output.
    #[arg(long, global = true, default_value = "-")]
    pub out: String,
    /// Worker threads for sweeps and checks (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Relative tolerance for border and point classification.
    #[arg(long, global = true, default_value_t = DEFAULT_REL_TOL)]
    pub tolerance: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time series of one scenario.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Grid sweep over k_y/k_x and omega.
    Scan {
        #[arg(long)]
        config: PathBuf,
    },
    /// Regime and spectral data of one parameter point.
    Classify {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        k_x: f64,
        #[arg(long, allow_hyphen_values = true)]
        k_y: f64,
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
    },
    /// Invariant self-test on random parameter points.
    Check {
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct CriticalPoint {
    omega: f64,
    regime: Regime,
}

#[derive(Serialize)]
struct ClassifyReport {
    k_x: f64,
    k_y: f64,
    omega: f64,
    regime: Regime,
    eps_plus: f64,
    eps_minus: f64,
    delta_sq: f64,
    lambda_plus: [f64; 2],
    lambda_minus: [f64; 2],
    branch: String,
    critical_frequencies: Vec<CriticalPoint>,
}

fn classify_report(k_x: f64, k_y: f64, omega: f64, tol: f64) -> Result<String> {
    let p = ModelParams::new(k_x, k_y, omega)?;
    let sd = derive_spectral(&p);
    let report = ClassifyReport {
        k_x,
        k_y,
        omega: p.omega(),
        regime: classify(&p, tol),
        eps_plus: sd.eps_plus,
        eps_minus: sd.eps_minus,
        delta_sq: sd.delta_sq,
        lambda_plus: [sd.lambda_plus.re, sd.lambda_plus.im],
        lambda_minus: [sd.lambda_minus.re, sd.lambda_minus.im],
        branch: format!("{:?}", select_branch(&p)),
        critical_frequencies: critical_frequencies(k_x, k_y)?
            .into_iter()
            .map(|(omega, regime)| CriticalPoint { omega, regime })
            .collect(),
    };
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start thread pool: {e}")))
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field: "tolerance",
            reason: format!("must be positive and finite, got {tol}"),
        })
    }
}

fn execute(cli: Cli) -> Result<bool> {
    let c = &cli.common;
    check_tolerance(c.tolerance)?;
    let dest = Destination::parse(&c.out);
    match cli.command {
        Command::Run { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            let table = run_scenario(&cfg, c.tolerance)?;
            emit(&table, c.format, &dest, cfg.precision)?;
            Ok(true)
        }
        Command::Scan { config } => {
            let cfg = SweepConfig::load(&config)?;
            let table = pool(c.threads)?.install(|| scan_phase_diagram(&cfg, c.tolerance))?;
            emit(&table, c.format, &dest, cfg.precision)?;
            Ok(true)
        }
        Command::Classify { k_x, k_y, omega } => {
            println!("{}", classify_report(k_x, k_y, omega, c.tolerance)?);
            Ok(true)
        }
        Command::Check { samples, seed } => {
            let results = pool(c.threads)?.install(|| run_checks(samples, seed));
            for r in &results {
                println!("{r}");
            }
            Ok(results.iter().all(|r| r.passed))
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_RUNTIME,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
