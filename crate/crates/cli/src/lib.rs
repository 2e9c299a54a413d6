//! Command-line front end for the known-scale Pareto estimators: point
//! estimates, moment engines, oracle adjudication and table reproduction.
//!
//! Exit status: 0 on success, 1 when an operation fails, 2 on usage errors.

mod commands;
mod format;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{ADJUDICATE_HEADER, TABLE_HEADER};
pub use format::Format;

#[derive(Parser)]
#[command(name = "pareto-est", version, about = "MLE and UMVUE estimation of the Pareto density and CDF")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Point estimate from a sample.
    Eval(EvalArgs),
    /// Moments and MSE of an estimator from one engine.
    Mse(MseArgs),
    /// Compare closed-form MSEs with quadrature and Bessel/Kummer on an x grid (CSV).
    Adjudicate(AdjudicateArgs),
    /// Reproduce the MSE tables by averaging per-point MSEs over random x.
    Table(TableArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Alpha,
    Pdf,
    Cdf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mle,
    Umvue,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Path to a file with one value per line, or an inline comma-separated list.
    #[arg(long)]
    pub data: String,
    #[arg(long)]
    pub k: f64,
    #[arg(long, value_enum)]
    pub target: TargetArg,
    #[arg(long, value_enum)]
    pub estimator: MethodArg,
    /// Evaluation point (required for pdf and cdf).
    #[arg(long)]
    pub x: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Closed,
    Quadrature,
    Mc,
    Bessel,
    Kummer,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformArg {
    Rational,
    Exp,
}

#[derive(Args, Clone)]
pub struct QuadArgs {
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Change of variables used for (0, ∞).
    #[arg(long, value_enum, default_value = "rational")]
    pub transform: TransformArg,
}

#[derive(Args)]
pub struct MseArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub k: f64,
    /// Evaluation point; defaults to k, ignored for alpha.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long, value_enum)]
    pub estimator: MethodArg,
    #[arg(long, value_enum)]
    pub target: TargetArg,
    #[arg(long, value_enum, default_value = "closed")]
    pub engine: EngineArg,
    /// Print the r-th raw moment instead of the MSE report.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, default_value_t = 100_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Args)]
pub struct AdjudicateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub k: f64,
    /// Comma-separated list, or start:step:end inclusive.
    #[arg(long)]
    pub x_grid: String,
    /// Append the two α-estimator rows.
    #[arg(long)]
    pub include_alpha: bool,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingArg {
    Product,
    Zip,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PerRepArg {
    Closed,
    Quadrature,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 10, 50, 100])]
    pub n_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5f64])]
    pub alpha_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5f64])]
    pub k_grid: Vec<f64>,
    /// How the α and k grids combine.
    #[arg(long, value_enum, default_value = "product")]
    pub pairing: PairingArg,
    /// The published design: n = 4(1)15(5)100 and six (α, k) pairs; overrides the grids.
    #[arg(long = "paper-grid")]
    pub published_design: bool,
    /// Evaluate at this fixed x instead of the first observation of a fresh sample.
    #[arg(long)]
    pub x: Option<f64>,
    /// Evaluate at the smallest observation of each fresh sample.
    #[arg(long, conflicts_with = "x")]
    pub x_min: bool,
    /// Engine for the per-replication MSE.
    #[arg(long, value_enum, default_value = "quadrature")]
    pub engine: PerRepArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: TableFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write TSV files (n, mse_umvue, mse_mle) per (α, k) pair and target.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
    /// Run replications on one thread.
    #[arg(long)]
    pub serial: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
}

/// Parses `args` (program name first) and runs the command, returning the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Eval(a) => commands::eval(&a),
        Command::Mse(a) => commands::mse(&a),
        Command::Adjudicate(a) => commands::adjudicate(&a),
        Command::Table(a) => commands::table(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
