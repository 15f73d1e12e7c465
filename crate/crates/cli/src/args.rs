use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lexiboot_core::{LearningMode, DEFAULT_MAX_EPISODES};

#[derive(Parser, Debug)]
#[command(
    name = "lexiboot",
    version,
    about = "Two-agent lexicon bootstrapping simulator",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Play one game until both lexicons freeze
    Game(GameArgs),
    /// Mean error against the word-to-object ratio (CSV)
    Sweep(SweepArgs),
    /// Mean error against 1/N and a weighted fit to N -> infinity (CSV)
    Extrapolate(ExtrapolateArgs),
    /// Random-assignment baseline: unused-word distribution and expected error
    Occupancy(OccupancyArgs),
    /// Re-run the command recorded in a manifest
    Replay(ReplayArgs),
}

/// Dynamics flags shared by every simulating command.
#[derive(Args, Clone, Debug)]
pub struct DynamicsArgs {
    /// Context size C
    #[arg(long, default_value_t = 2)]
    pub context: usize,
    /// Resolution M (the learning rate is 1/M)
    #[arg(long, default_value_t = 10_000)]
    pub resolution: u32,
    /// Give up on a game after this many episodes
    #[arg(long, default_value_t = DEFAULT_MAX_EPISODES)]
    pub max_episodes: u64,
    /// Seed (master seed for ensembles)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Accepted so it shows in `--help`; the file itself is expanded before
/// parsing.
#[derive(Args, Clone, Debug)]
pub struct ConfigFileArg {
    /// key=value file, one flag per line; command-line flags win
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct EnsembleArgs {
    /// Games per ensemble
    #[arg(long, default_value_t = 100)]
    pub samples: u64,
    /// Worker threads; output does not depend on it
    #[arg(long, env = "LEXIBOOT_WORKERS", default_value_t = 1)]
    pub workers: usize,
    /// Output CSV (stdout if absent); a manifest is written next to it
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script next to the CSV
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct GameArgs {
    /// Number of objects N
    #[arg(long)]
    pub objects: usize,
    /// Number of words H
    #[arg(long, conflicts_with = "alpha", required_unless_present = "alpha")]
    pub words: Option<usize>,
    /// Word-to-object ratio; H = round(alpha N)
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value = "unsupervised")]
    pub mode: LearningMode,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    #[command(flatten)]
    pub config: ConfigFileArg,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    /// Comma-separated word-to-object ratios
    #[arg(long, value_delimiter = ',', required = true)]
    pub alphas: Vec<f64>,
    /// Comma-separated object counts
    #[arg(long, value_delimiter = ',', required = true)]
    pub objects: Vec<usize>,
    /// Comma-separated learning modes
    #[arg(long, value_delimiter = ',', default_value = "unsupervised")]
    pub mode: Vec<LearningMode>,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    #[command(flatten)]
    pub config: ConfigFileArg,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct ExtrapolateArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Comma-separated object counts
    #[arg(long, value_delimiter = ',', default_value = "16,24,32,48,64,96")]
    pub objects: Vec<usize>,
    #[arg(long, default_value = "unsupervised")]
    pub mode: LearningMode,
    /// Fit these `N:mean:se` points instead of simulating
    #[arg(long, value_delimiter = ',', value_name = "N:MEAN:SE")]
    pub points: Vec<String>,
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    #[command(flatten)]
    pub config: ConfigFileArg,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct OccupancyArgs {
    #[arg(long)]
    pub objects: usize,
    #[arg(long, conflicts_with = "alpha", required_unless_present = "alpha")]
    pub words: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Allow sizes beyond the exact bound (Poisson limit only)
    #[arg(long)]
    pub poisson: bool,
    /// Monte Carlo random assignments to average
    #[arg(long, default_value_t = 0)]
    pub mc_samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub config: ConfigFileArg,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run
    pub manifest: PathBuf,
    /// Write the data here instead of the recorded path
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}
