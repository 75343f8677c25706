use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Tree ensembles for regression with interactions.
#[derive(Debug, Parser)]
#[command(name = "splitforest", version)]
pub struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a forest to a CSV file and save it as JSON.
    Fit(FitArgs),
    /// Predict a CSV file with a saved forest.
    Predict(PredictArgs),
    /// Monte Carlo comparison on a simulated model.
    Simulate(SimulateArgs),
    /// Hyper-parameter search by cross-validation, oracle tuning or nested CV.
    Tune(TuneArgs),
    /// Run one of the fixed benchmark suites.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct SchemaArgs {
    /// Schema file (`target = ...`, `categorical = ...`, `drop = ...`, `target_scale = ...`).
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Target column (when no schema file is given).
    #[arg(long, conflicts_with = "schema")]
    pub target: Option<String>,
    /// Comma-separated categorical columns (when no schema file is given).
    #[arg(long, value_delimiter = ',', conflicts_with = "schema")]
    pub categorical: Vec<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ParamArgs {
    /// Parameter file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Parameter override, e.g. `--set mtry=3`; repeatable, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub num_trees: Option<usize>,
    #[arg(long)]
    pub min_node_size: Option<usize>,
    #[arg(long)]
    pub replace: Option<bool>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// rf, et, intf or rsrf.
    #[arg(long)]
    pub algo: Option<String>,
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output forest JSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub forest: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub schema: SchemaArgs,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// pure_type, hierarchical, additive, pure_2 or pure_3.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    /// rf, et, intf, rsrf, rsrf_af, mean_y, one_nn or all.
    #[arg(long)]
    pub algo: Option<String>,
    /// Start from the tuned settings (`opt`) or the library defaults (`default`).
    #[arg(long)]
    pub params: Option<String>,
    #[command(flatten)]
    pub param_args: ParamArgs,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; a `.json` file is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Suppress the per-replication log.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TuneMethod {
    /// k-fold cross-validation against observed responses.
    Cv,
    /// Average true-function error over fresh simulated data sets.
    Opt,
    /// Nested cross-validation on a data file.
    Nested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceKind {
    /// Random draws from the simulation-study ranges.
    Ranges,
    /// RSRF ranges with coordinate subsets shared among candidates.
    FixedMode,
    /// The grid used for real data sets.
    RealData,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    /// rf, et, intf or rsrf (`all` for nested CV).
    #[arg(long)]
    pub algo: String,
    #[arg(long, value_enum)]
    pub method: Option<TuneMethod>,
    #[arg(long, conflicts_with = "model")]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_enum, default_value_t = SpaceKind::Ranges)]
    pub space: SpaceKind,
    /// A parameter file or `--set` values make the search space that single configuration.
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 200)]
    pub combos: usize,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 30)]
    pub sims: usize,
    #[arg(long, default_value_t = 500)]
    pub n_train: usize,
    #[arg(long, default_value_t = 500)]
    pub n_test: usize,
    #[arg(long, default_value_t = 5)]
    pub inner: usize,
    #[arg(long, default_value_t = 5)]
    pub outer: usize,
    #[arg(long, default_value_t = 2)]
    pub repeats: usize,
    /// Append this many banded-noise covariates to the data before tuning.
    #[arg(long)]
    pub hd: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Best configuration (`key = value`) or, for nested CV, the per-fold CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Tuned forests on pure_3, n = 500.
    Table1,
    /// Random Forest mtry sweep against INTF on pure_3, n = 1000.
    Fig2a,
    /// Root Sample-CART split on large pure_3 samples.
    Blindness,
    /// mean-Y and 1-NN on pure_3.
    Baselines,
    /// Covariance band of the noise covariates.
    Hd,
    /// Every model and dimension with tuned settings (long-running).
    Table3,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Monte Carlo replications (seeds for `blindness`).
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    /// Sample size override (training size, or rows for `blindness` and `hd`).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
}
