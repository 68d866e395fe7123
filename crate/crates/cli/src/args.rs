//! Command-line argument definitions.
//!
//! Every run takes an explicit `--seed`; there is no silent
//! nondeterminism. The split permutation and the forests draw their own
//! seeds from it, so one flag reproduces a whole run.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use skewconf_core::conformal::Method;
use skewconf_core::data::CategoricalPolicy;
use skewconf_core::learners::ForestParams;
use skewconf_core::synth::{MeanFn, Noise, ScaleFn};

#[derive(Debug, Parser)]
#[command(
    name = "skewconf",
    version,
    about = "Split conformal prediction intervals with a skew-adaptive gauge"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Benchmark the interval methods on a CSV dataset.
    Bench(BenchArgs),
    /// Generate a synthetic regression dataset as CSV.
    Synth(SynthArgs),
    /// Fit the skew and scaled methods and print their width-efficiency
    /// report.
    Phi(PhiArgs),
    /// Run the replication-based statistical checks and print pass/fail.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input CSV file with one header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Target column name (default: the last column).
    #[arg(long)]
    pub target: Option<String>,
    /// Encoding for non-numeric feature columns.
    #[arg(long, value_enum, default_value_t = CategoricalArg::OneHot)]
    pub categorical: CategoricalArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CategoricalArg {
    /// One indicator column per level, first level dropped.
    OneHot,
    /// Integer codes in lexicographic level order.
    Ordinal,
}

impl CategoricalArg {
    pub fn policy(self) -> CategoricalPolicy {
        match self {
            CategoricalArg::OneHot => CategoricalPolicy::OneHotDropFirst,
            CategoricalArg::Ordinal => CategoricalPolicy::Ordinal,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CategoricalArg::OneHot => "one-hot",
            CategoricalArg::Ordinal => "ordinal",
        }
    }
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Train, calibration, and test fractions, comma-separated, summing
    /// to 1.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.8, 0.1, 0.1])]
    pub split: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ForestArgs {
    /// Trees per forest.
    #[arg(long, default_value_t = 200)]
    pub trees: usize,
    /// Features tried per split (default: ceil(d / 3)).
    #[arg(long)]
    pub mtry: Option<usize>,
    /// Minimum rows per leaf.
    #[arg(long, default_value_t = 5)]
    pub min_leaf: usize,
    /// Depth cap (default: unlimited).
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Grow every tree on the full training set instead of bootstrap
    /// resamples.
    #[arg(long)]
    pub no_bootstrap: bool,
}

impl ForestArgs {
    pub fn to_params(&self, seed: u64) -> ForestParams {
        ForestParams {
            n_trees: self.trees,
            mtry: self.mtry,
            min_leaf: self.min_leaf,
            max_depth: self.max_depth,
            bootstrap: !self.no_bootstrap,
            seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Miscoverage levels to calibrate at, comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.15, 0.2])]
    pub alphas: Vec<f64>,
    /// Interval methods to run, comma-separated (skew, scaled, cqr).
    #[arg(long, value_delimiter = ',', default_values_t = Method::ALL.to_vec())]
    pub methods: Vec<Method>,
    #[command(flatten)]
    pub forest: ForestArgs,
    /// Force the skew method's tilt to zero (diagnostic: it then matches
    /// the scaled method exactly).
    #[arg(long)]
    pub zero_tilt: bool,
    /// Master seed for the split and the forests.
    #[arg(long)]
    pub seed: u64,
    /// Directory for results.csv, efficiency.csv, and config.json.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Also write results.json.
    #[arg(long)]
    pub json: bool,
    /// Also write report.md with the result tables.
    #[arg(long)]
    pub markdown: bool,
    /// Also write plot_points.csv with one row per test interval.
    #[arg(long)]
    pub plot_data: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Conditional mean function (linear, sine, step).
    #[arg(long, default_value_t = MeanFn::Linear)]
    pub mean: MeanFn,
    /// Conditional scale function (constant, constant:<c>, linear, bump).
    #[arg(long, default_value_t = ScaleFn::Constant(1.0))]
    pub scale: ScaleFn,
    /// Noise distribution (gaussian, uniform, lognormal_std, exp_std,
    /// mirror_lognormal_std, mirror_exp_std).
    #[arg(long, default_value_t = Noise::Gaussian)]
    pub noise: Noise,
    /// Feature dimension.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Number of rows.
    #[arg(long)]
    pub n: usize,
    /// Generator seed.
    #[arg(long)]
    pub seed: u64,
    /// Output CSV path; a .config.json sibling records the generator
    /// settings.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Miscoverage level.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[command(flatten)]
    pub forest: ForestArgs,
    /// Master seed for the split and the forests.
    #[arg(long)]
    pub seed: u64,
    /// Optional directory for efficiency.csv and config.json.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Which check suites to run.
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Master seed for the populations and forests.
    #[arg(long)]
    pub seed: u64,
    /// Miscoverage level under test.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Trees per forest (reduced default keeps the suites quick).
    #[arg(long, default_value_t = 50)]
    pub trees: usize,
    /// Training rows for the once-fitted models.
    #[arg(long, default_value_t = 2000)]
    pub train_size: usize,
    /// Calibration rows per replication in the coverage suite.
    #[arg(long, default_value_t = 999)]
    pub n_calib: usize,
    /// Test rows per replication.
    #[arg(long, default_value_t = 1000)]
    pub test_size: usize,
    /// Replications for the coverage suite.
    #[arg(long, default_value_t = 50)]
    pub coverage_reps: usize,
    /// Replications per grid size for the convergence probe.
    #[arg(long, default_value_t = 10)]
    pub probe_reps: usize,
    /// Calibration sizes for the convergence probe, comma-separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![250, 1000, 4000])]
    pub grid: Vec<usize>,
    /// Optional directory for coverage.csv, convergence.csv, and
    /// config.json.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    /// Marginal-coverage bands only.
    Coverage,
    /// Efficiency-estimator convergence only.
    Convergence,
    /// Both suites.
    All,
}

impl SuiteArg {
    pub fn runs_coverage(self) -> bool {
        matches!(self, SuiteArg::Coverage | SuiteArg::All)
    }

    pub fn runs_convergence(self) -> bool {
        matches!(self, SuiteArg::Convergence | SuiteArg::All)
    }

    pub fn label(self) -> &'static str {
        match self {
            SuiteArg::Coverage => "coverage",
            SuiteArg::Convergence => "convergence",
            SuiteArg::All => "all",
        }
    }
}
