//! `fmec`: generate scenarios, train and evaluate planners, export traces.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fmec_core::experiment::{Algorithm, InitScheme};
use fmec_core::Mode;

#[derive(Parser)]
#[command(name = "fmec", version, about = "Multi-UAV mobile edge computing laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a scenario file.
    Gen(GenArgs),
    /// Train the DDPG agent (prioritized or uniform replay).
    Train(TrainArgs),
    /// Replay a checkpoint over take-off points next to the baselines.
    Eval(EvalArgs),
    /// Run the convex planner from an initial trajectory and write its trace.
    Cat(CatArgs),
    /// Mean and spread of every algorithm's energy on one scenario.
    Compare(CompareArgs),
    /// Per-slot, per-UAV and per-UE logs of one episode.
    Trace(TraceArgs),
}

/// Where a scenario comes from: a file, or a generated profile.
#[derive(Args, Clone)]
pub struct Source {
    /// Scenario file written by `fmec gen`.
    #[arg(long, conflicts_with_all = ["config", "paper_scale", "mode", "seed"])]
    pub scenario: Option<PathBuf>,
    /// Scenario config JSON to generate from.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Full-size profile instead of the desk profile.
    #[arg(long)]
    pub paper_scale: bool,
    /// Channel mode; switches task ranges and bandwidth with it.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: fmec_core::Error| e.to_string())
}

fn parse_init(s: &str) -> Result<InitScheme, String> {
    s.parse().map_err(|e: fmec_core::Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Pool {
    /// Points reserved for evaluation.
    Heldout,
    /// Points cycled through during training.
    Train,
}

#[derive(Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: Source,
    /// Uniform replay (the DDPG baseline).
    #[arg(long)]
    pub uniform: bool,
    /// Overrides the configured epoch count.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Continue from a checkpoint; the replay buffer starts empty.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Receives checkpoint.json, train.csv and logs of a greedy episode.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, value_enum, default_value = "heldout")]
    pub pool: Pool,
    /// Number of take-off points, from the start of the pool.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CatArgs {
    #[command(flatten)]
    pub source: Source,
    /// `cluster` or `circle:<radius>`.
    #[arg(long, default_value = "cluster", value_parser = parse_init)]
    pub init: InitScheme,
    #[arg(long, value_enum, default_value = "heldout")]
    pub pool: Pool,
    #[arg(long, default_value_t = 0)]
    pub takeoff: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: Source,
    /// Trained agent; without one, RAT is trained first.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Training epochs when no checkpoint is given.
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long, value_enum, default_value = "heldout")]
    pub pool: Pool,
    #[arg(long)]
    pub count: Option<usize>,
    /// Summary table, one row per algorithm.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional per-run detail.
    #[arg(long)]
    pub runs_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub source: Source,
    /// rm, cm, cat, rat or ddpg.
    #[arg(long)]
    pub algorithm: Algorithm,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value = "cluster", value_parser = parse_init)]
    pub init: InitScheme,
    #[arg(long, value_enum, default_value = "heldout")]
    pub pool: Pool,
    #[arg(long, default_value_t = 0)]
    pub takeoff: usize,
    /// Receives slots.csv, uavs.csv and ues.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> anyhow::Result<()> {
        commands::init_threads()?;
        match cli.command {
            Command::Gen(a) => commands::gen(a),
            Command::Train(a) => commands::train(a),
            Command::Eval(a) => commands::eval(a),
            Command::Cat(a) => commands::cat(a),
            Command::Compare(a) => commands::compare(a),
            Command::Trace(a) => commands::trace(a),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
