//! `rbo-lab`: verify, analyse and integrate Rota-Baxter operators.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rbo_core::group::{DEFAULT_SAMPLES, DEFAULT_SEED};

#[derive(Parser, Debug)]
#[command(
    name = "rbo-lab",
    version,
    about = "Verify, analyse and integrate relative Rota-Baxter operators"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Tolerance for residual checks (default depends on the command)
    #[arg(long, global = true, value_parser = positive)]
    pub tol_abs: Option<f64>,
    /// Relative pivot tolerance for rank computations
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive)]
    pub tol_rel: f64,
    /// Sampling seed (decimal or 0x-prefixed hex)
    #[arg(long, global = true, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    pub seed: u64,
    /// Number of sampled points for group-level checks
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Log-ball radius for sampling, or the integration radius
    /// [default: 0.3, or the radius stored with the operator]
    #[arg(long, global = true, value_parser = positive)]
    pub radius: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run verification suites on algebras, operators, r-matrices and group operators
    Check {
        /// Operator files
        #[arg(long = "rbo")]
        rbos: Vec<PathBuf>,
        /// Algebra files (Jacobi identity)
        #[arg(long = "algebra")]
        algebras: Vec<PathBuf>,
        /// Modified r-matrix files
        #[arg(long = "r")]
        rmats: Vec<PathBuf>,
        /// Registry group operators, e.g. euclidean3, up2, gl_block(1,2)
        #[arg(long = "group")]
        groups: Vec<String>,
    },
    /// Cohomology table of an operator up to degree kmax
    Cohomology {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
    },
    /// Integrate an operator to a local group operator and check it
    Integrate { file: PathBuf },
    /// Van Est commuting-square check on a registry group operator
    Vanest {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
    /// Factorize exp(2tX0) = g+ g-^-1
    Factorize {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        t: f64,
        /// Direction in algebra coordinates, comma separated (default: seeded unit vector)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
    },
    /// Trajectory of the AKS flow on [0, tmax]
    Aks {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 0.2)]
        tmax: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
    },
    /// Matched pairs from an operator file and/or a registry group operator
    Matched {
        #[arg(long = "rbo")]
        rbo: Option<PathBuf>,
        #[arg(long)]
        group: Option<String>,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("invalid seed {s:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // a panic is a bug, but the exit code contract still holds
    std::panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    match std::panic::catch_unwind(|| commands::run(&cli)) {
        Ok(Ok(outcome)) => {
            print!("{}", outcome.rendered);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
        Err(_) => ExitCode::from(2),
    }
}
