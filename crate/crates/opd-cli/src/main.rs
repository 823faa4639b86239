//! `opd`: generate datasets, run sessions and experiments, compare and
//! calibrate.

mod commands;
mod fail;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fail::EXIT_USAGE;

#[derive(Parser)]
#[command(name = "opd", version, about = "Outpatient department queueing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic 368-patient dataset (JSON, schema-versioned).
    Generate(GenerateArgs),
    /// Run one session and print its metrics as JSON.
    Run(RunArgs),
    /// Run a multi-seed experiment per strategy and write summary tables.
    Experiment(ExperimentArgs),
    /// Run the four agentic ablation variants on one seed ladder.
    Ablation(AblationArgs),
    /// Welch's t-test and Cohen's d between two recorded run sets.
    Compare(CompareArgs),
    /// Grid-search the history constants against drift and critical targets.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Dataset seed. Required.
    #[arg(long)]
    seed: u64,
    /// Output file.
    #[arg(long, default_value = "dataset.json")]
    out: PathBuf,
}

/// Inputs shared by every simulating command. Precedence: command-line flag,
/// then config file, then built-in default.
#[derive(Args, Clone)]
struct Inputs {
    /// StrategyConfig JSON. Missing fields take built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset JSON written by `generate`. Default: generated from seed 42.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Roster JSON: a list of {"id", "specialty"}. Default: the six-physician roster.
    #[arg(long)]
    roster: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Fcfs,
    RuleBased,
    Agentic,
}

impl From<StrategyArg> for opd_sim::Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Fcfs => opd_sim::Strategy::Fcfs,
            StrategyArg::RuleBased => opd_sim::Strategy::RuleBased,
            StrategyArg::Agentic => opd_sim::Strategy::Agentic,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategySet {
    Fcfs,
    RuleBased,
    Agentic,
    All,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Metrics JSON destination. Default: stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Disable history escalation (agentic only).
    #[arg(long)]
    no_memory: bool,
    /// Disable the reassessment loop (agentic only).
    #[arg(long)]
    no_drift: bool,
    /// Write the event trace as CSV (time, kind, patient, physician).
    #[arg(long, num_args = 0..=1, default_missing_value = "trace.csv", value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Write the escalation log as CSV (time, patient_id, from, to, cause).
    #[arg(long, value_name = "PATH")]
    escalations: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_enum, default_value = "all")]
    strategy: StrategySet,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    /// Seeds are base-seed, base-seed + 1, ...
    #[arg(long, default_value_t = 1)]
    base_seed: u64,
    /// Receives <strategy>.jsonl, <strategy>.manifest.json, summary.json and CSV tables.
    #[arg(long)]
    out_dir: PathBuf,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Also write Markdown tables and print them.
    #[arg(long)]
    markdown: bool,
    #[arg(long)]
    no_memory: bool,
    #[arg(long)]
    no_drift: bool,
}

#[derive(Args)]
struct AblationArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    base_seed: u64,
    /// Receives <variant>.jsonl, <variant>.manifest.json and ablation.csv.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    markdown: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// A run set: a .jsonl file, or a directory holding exactly one.
    a: PathBuf,
    /// The other run set. Its manifest hash and run count must match.
    b: PathBuf,
    /// Metric to test, or `all`. One of: avg-wait, median-wait, p95-wait,
    /// critical-wait, low-wait, throughput, specialty-match, drifts, critical-count.
    #[arg(long, default_value = "all")]
    metric: String,
    /// Write the table here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    markdown: bool,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Comma-separated history drift multipliers to try.
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,1")]
    kappa: Vec<f64>,
    /// Comma-separated per-check history escalation probabilities to try.
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.5,0.7,1")]
    p_hist: Vec<f64>,
    #[arg(long, default_value_t = 236.0)]
    target_drifts: f64,
    #[arg(long, default_value_t = 24.9)]
    target_crit: f64,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    base_seed: u64,
    /// Config fragment holding the chosen constants.
    #[arg(long, default_value = "calibration.json")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    markdown: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Run(a) => commands::run(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::Ablation(a) => commands::ablation(a),
        Command::Compare(a) => commands::compare(a),
        Command::Calibrate(a) => commands::calibrate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("opd: {f}");
            ExitCode::from(f.code() as u8)
        }
    }
}
