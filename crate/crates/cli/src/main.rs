mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Learn static fault trees from Boolean observations.
#[derive(Debug, Parser)]
#[command(name = "ftevolve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Learn a fault tree from a CSV dataset.
    Learn(LearnArgs),
    /// Generate a random fault tree.
    GenFt(GenFtArgs),
    /// Generate a dataset from a fault tree.
    GenData(GenDataArgs),
    /// Print the fitness of a tree on a dataset.
    Eval(EvalArgs),
    /// Write the CNF or DNF clauses of a tree.
    Normalize(NormalizeArgs),
    /// Run an experiment suite.
    Bench(BenchArgs),
    /// Per-iteration operator survival counts from a trace.
    Stats(StatsArgs),
}

/// Search parameters shared by `learn` and `bench`. Each may also come from
/// the `--config` file; an explicit flag wins.
#[derive(Debug, Args)]
pub struct EaArgs {
    /// Population size [default: 100]
    #[arg(long)]
    pub pop: Option<usize>,
    /// Maximum iterations [default: 100]
    #[arg(long)]
    pub iters: Option<usize>,
    /// Stop after this many iterations without improvement [default: 10]
    #[arg(long)]
    pub conv: Option<usize>,
    /// Probability of applying each operator to an individual [default: 0.9]
    #[arg(long)]
    pub op_prob: Option<f64>,
    /// elitist, roulette, sus, tournament:K or random [default: elitist]
    #[arg(long)]
    pub selection: Option<String>,
    /// Enable K/N gates and the k-n-change operator
    #[arg(long)]
    pub kn: bool,
    /// Largest gate count an offspring may have [default: 4 x variables]
    #[arg(long)]
    pub max_gates: Option<usize>,
    /// RNG seed; falls back to FTEVOLVE_SEED, then 0
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 1 gives the sequential reference behavior
    #[arg(long)]
    pub threads: Option<usize>,
    /// key=value file with defaults for any flag
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    /// CSV file with one column per variable and an optional count column
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Name of the top-event column
    #[arg(long)]
    pub top: Option<String>,
    /// Galileo file whose structure every individual must keep
    #[arg(long)]
    pub skeleton: Option<PathBuf>,
    /// Training fraction; 1 trains on everything [default: 0.667]
    #[arg(long)]
    pub split: Option<f64>,
    /// Output directory [default: out]
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub ea: EaArgs,
}

#[derive(Debug, Args)]
pub struct GenFtArgs {
    #[arg(long)]
    pub bes: usize,
    #[arg(long)]
    pub gates: usize,
    /// Comma-separated gate kinds: and, or, atleast
    #[arg(long, default_value = "and,or")]
    pub kinds: String,
    #[arg(long, default_value_t = 0.05)]
    pub prob_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub prob_max: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long)]
    pub ft: PathBuf,
    /// Observations sampled from the basic-event probabilities
    #[arg(long, default_value_t = 1000, conflicts_with = "full")]
    pub records: u64,
    /// Emit the complete truth table instead of sampling
    #[arg(long)]
    pub full: bool,
    /// Fraction of observations with one variable flipped
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub ft: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub top: String,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    #[arg(long)]
    pub ft: PathBuf,
    #[arg(long, value_parser = ["cnf", "dnf"], default_value = "cnf")]
    pub form: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// accuracy, noise, selection or benchmark
    #[arg(long)]
    pub suite: Option<String>,
    /// Cases (accuracy, noise) or repeats per strategy (selection) [default: 10]
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Smallest generated tree [default: 6]
    #[arg(long)]
    pub min_bes: Option<usize>,
    /// Largest generated tree [default: 8]
    #[arg(long)]
    pub max_bes: Option<usize>,
    /// Basic events of the selection-suite tree [default: 8]
    #[arg(long)]
    pub bes: Option<usize>,
    /// Gates of the selection-suite tree [default: 4]
    #[arg(long)]
    pub gates: Option<usize>,
    /// Also learn each accuracy case from its two-layer skeleton
    #[arg(long)]
    pub with_skeleton: bool,
    /// Comma-separated noise fractions [default: 0,0.01,0.03,0.05]
    #[arg(long)]
    pub noise_levels: Option<String>,
    /// Sample this many observations instead of using full truth tables;
    /// the benchmark suite always samples [default there: 100000]
    #[arg(long)]
    pub records: Option<u64>,
    /// Training fraction [default: 0.667]
    #[arg(long)]
    pub split: Option<f64>,
    /// Directory of .ft files for the benchmark suite
    #[arg(long)]
    pub ft_dir: Option<PathBuf>,
    /// Reports go to OUT/seed-SEED/ [default: bench-out]
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub ea: EaArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// trace.json written by `learn`
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Learn(a) => commands::learn(a),
        Command::GenFt(a) => commands::gen_ft(a),
        Command::GenData(a) => commands::gen_data(a),
        Command::Eval(a) => commands::eval(a),
        Command::Normalize(a) => commands::normalize(a),
        Command::Bench(a) => commands::bench(a),
        Command::Stats(a) => commands::stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
