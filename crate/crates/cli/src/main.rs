//! `arrowmat` command-line driver.

mod bench;
mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "arrowmat", version, about = "Arrow matrix decompositions and simulated distributed SpMM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Size and degree statistics of a matrix.
    Stats(StatsArgs),
    /// Decompose a matrix into arrow matrices and write them to a directory.
    Decompose(DecomposeArgs),
    /// Simulate repeated multiplies and report communication.
    Spmm(SpmmArgs),
    /// Sweep decompose + spmm over parameter lists and write CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct InputArgs {
    /// Matrix Market file, or `gen:<spec>` such as `gen:powerlaw:65536:2.0`.
    #[arg(long)]
    pub input: String,
    /// Seed for generators, arrangements and the feature matrix.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Read all values as 1.
    #[arg(long)]
    pub pattern: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    RandomForest,
    SeparatorTree,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Algorithm {
    #[value(name = "arrow")]
    #[serde(rename = "arrow")]
    Arrow,
    #[value(name = "1.5d")]
    #[serde(rename = "1.5d")]
    OneFiveD,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Arrow width b (>= 2).
    #[arg(long, short = 'w')]
    pub width: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::RandomForest)]
    pub strategy: StrategyArg,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Replace an existing decomposition in `--out`.
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ModelArgs {
    /// Latency per message.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Cost per 64-bit word.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpmmArgs {
    /// Decomposition directory for `arrow`, matrix for `1.5d`.
    #[arg(long)]
    pub input: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub pattern: bool,
    #[arg(long, value_enum, default_value_t = Algorithm::Arrow)]
    pub algorithm: Algorithm,
    /// Feature columns k.
    #[arg(long = "features", short = 'c', default_value_t = 16)]
    pub features: usize,
    /// Iterations; the first is reported as warm-up.
    #[arg(long = "iters", short = 'z', default_value_t = 7)]
    pub iters: usize,
    /// Ranks for `1.5d`.
    #[arg(long = "ranks", short = 'p', default_value_t = 4)]
    pub ranks: usize,
    /// Replication factor c for `1.5d`.
    #[arg(long, default_value_t = 1)]
    pub repl: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Use X = ones instead of seeded uniform values.
    #[arg(long)]
    pub ones: bool,
    /// Compare with the dense reference even above 4096 rows.
    #[arg(long)]
    pub force_oracle: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BenchArgs {
    /// Inputs (files or `gen:` specs), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub input: Vec<String>,
    /// Arrow widths; `auto` means n/p.
    #[arg(long, short = 'w', value_delimiter = ',', default_value = "auto")]
    pub width: Vec<String>,
    #[arg(long = "ranks", short = 'p', value_delimiter = ',', default_value = "4")]
    pub ranks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub repl: Vec<usize>,
    #[arg(long = "features", short = 'c', value_delimiter = ',', default_value = "16")]
    pub features: Vec<usize>,
    #[arg(long = "seed", value_delimiter = ',', default_value = "0")]
    pub seed: Vec<u64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "arrow,1.5d")]
    pub algorithm: Vec<Algorithm>,
    #[arg(long, value_enum, default_value_t = StrategyArg::RandomForest)]
    pub strategy: StrategyArg,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub pattern: bool,
    #[arg(long)]
    pub ones: bool,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Stats(a) => commands::stats(&a),
        Command::Decompose(a) => commands::decompose(&a),
        Command::Spmm(a) => commands::spmm(&a),
        Command::Bench(a) => bench::bench(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("arrowmat: {e}");
            ExitCode::from(e.code())
        }
    }
}
