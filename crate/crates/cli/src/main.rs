#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "pqgraph",
    version,
    about = "(p,q)-Laplacian Nehari solvers on weighted graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check graph and coefficient invariants.
    Validate(Common),
    /// Evaluate Λ*, X(λ), X₀, S(λ), S₀.
    Constants(Common),
    /// Tabulate the fibering map along one ray.
    Fiber(FiberArgs),
    /// Minimize on the D⁺ branch (0 < λ < Λ*).
    SolvePlus(Common),
    /// Minimize on the D⁻ branch (0 < λ < Λ*).
    SolveMinus(Common),
    /// Global minimization on the positive cone (λ < 0).
    SolveNegative(Common),
    /// Re-check a solution file.
    Verify(VerifyArgs),
    /// Evaluate constants and solvers over a λ or p grid.
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "lambda_ratio")]
    pub lambda: Option<f64>,
    /// λ as a multiple of Λ*.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_ratio: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long)]
    pub energy_tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub step_init: Option<f64>,
    #[arg(long)]
    pub armijo_c: Option<f64>,
    #[arg(long)]
    pub shrink: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; `fiber` and `sweep` default to CSV, everything else writes JSON.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for batch work; 1 runs sequentially.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug)]
pub struct FiberArgs {
    #[command(flatten)]
    pub common: Common,
    /// Random positive direction with this seed instead of u ≡ 1.
    #[arg(long)]
    pub direction_seed: Option<u64>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// JSON file with a `solution` object keyed by vertex id.
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub probes: usize,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated absolute λ values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Option<Vec<f64>>,
    /// Comma-separated multiples of Λ*.
    #[arg(long, value_delimiter = ',')]
    pub lambda_ratios: Option<Vec<f64>>,
    /// Comma-separated p values, at the ratio given by --lambda-ratio (default 0.5).
    #[arg(long, value_delimiter = ',')]
    pub p_values: Option<Vec<f64>>,
    /// Run the solvers at every point, not just the constants.
    #[arg(long)]
    pub solve: bool,
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("PQGRAPH_LOG", "warn");
    env_logger::Builder::from_env(env).format_timestamp(None).init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { commands::EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let code = commands::exit_code(&err);
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
