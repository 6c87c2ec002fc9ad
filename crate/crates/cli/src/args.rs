use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "xxchain", version, about = "Bell pairs from engineered XX spin chains")]
#[command(args_override_self = true)]
pub struct Cli {
    /// JSON object of option values for the chosen command; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Write the engineered coupling profile.
    Couplings(CouplingsArgs),
    /// Tabulate the centre-to-end amplitude over a time grid.
    Evolve(EvolveArgs),
    /// Teleport a qubit through a chain-generated or supplied pair.
    Teleport(TeleportArgs),
    /// Longest chain compatible with a coupling ceiling.
    Feasibility(FeasibilityArgs),
    /// Entanglement at t0 under coupling swaps or noise.
    Perturb(PerturbArgs),
    /// Search mirror-symmetric profiles for end-to-end Bell pairs.
    Search(SearchArgs),
}

pub const COMMANDS: [&str; 6] = ["couplings", "evolve", "teleport", "feasibility", "perturb", "search"];

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Enumerate,
    Sample,
}

/// Chain given either as a profile file or as engineered `(N, μ)`.
#[derive(Debug, Args, Serialize)]
pub struct ChainArgs {
    /// Coupling profile JSON (as written by `couplings`).
    #[arg(long, value_name = "FILE", conflicts_with = "n")]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CouplingsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// `lo:hi:step`; each term may use `pi`, e.g. `0:pi:pi/100`.
    #[arg(long, default_value = "0:2*pi:pi/100")]
    pub t_grid: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TeleportArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a_im: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b_im: f64,
    /// Resource JSON `{"alpha01": [re, im], "alpha10": [re, im]}`.
    #[arg(long, value_name = "FILE", conflicts_with = "n")]
    pub resource: Option<PathBuf>,
    /// Build the resource from the engineered chain of this length at t0.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = Mode::Enumerate)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FeasibilityArgs {
    /// Frequency scale in Hz.
    #[arg(long)]
    pub mu: f64,
    /// Largest attainable coupling in Hz.
    #[arg(long)]
    pub gmax: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PerturbArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Swap couplings `D_i` and `D_j` (1-based); repeatable.
    #[arg(long, num_args = 2, value_names = ["I", "J"], action = clap::ArgAction::Append)]
    pub swap: Vec<usize>,
    /// One row per adjacent swap.
    #[arg(long)]
    pub adjacent_swaps: bool,
    /// Relative Gaussian noise on every coupling.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long)]
    pub d_lo: Option<f64>,
    #[arg(long)]
    pub d_hi: Option<f64>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
