use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "fpdc", version, about = "PD-clustering and factor PD-clustering experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Generate a benchmark dataset.
    Simulate(SimulateArgs),
    /// Cluster a dataset, possibly many times.
    Cluster(ClusterArgs),
    /// Score a saved model against a dataset.
    Evaluate(EvaluateArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Preset {
    /// 4 correlated 7-variable clusters, 100 rows each, 20% contamination.
    #[value(name = "mz-paper")]
    #[serde(rename = "mz-paper")]
    MzPaper,
    /// 4 independent 2-variable Gaussian clusters, 450 rows.
    #[value(name = "indep-450x2")]
    #[serde(rename = "indep-450x2")]
    Indep450x2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Pdc,
    Fpdc,
    Kmeans,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn is_on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub preset: Preset,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ClusterArgs {
    /// CSV dataset (header row; optional `label` and `outlier` columns).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub input: Option<PathBuf>,
    /// Generate the dataset from a preset with `--seed`.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum, default_value_t = Algo::Fpdc)]
    pub algo: Algo,
    #[arg(long)]
    pub k: usize,
    /// Number of factors (fpdc only); defaults to k-1.
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Run r uses seed + r; a preset dataset uses seed itself.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for independent runs (default: all cores).
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub standardize: Switch,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvaluateArgs {
    /// `model.json` written by `cluster`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Everything needed to reproduce a command's outputs. Output location and
/// thread count are deliberately absent: neither changes the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Manifest {
    Simulate(SimulateArgs),
    Cluster(ClusterArgs),
    Evaluate(EvaluateArgs),
}
