use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use viewmetric::MetricKind;

#[derive(Debug, Parser)]
#[command(name = "viewmetric", version, about = "View-distance metric toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic manifold dataset.
    Gen(GenArgs),
    /// Cluster a CSV dataset with K-Means.
    Kmeans(KmeansArgs),
    /// Evaluate a KNN classifier on a labeled CSV dataset.
    Knn(KnnArgs),
    /// Score predicted labels against true labels.
    Eval(EvalArgs),
    /// Eigen-diagnostics of the view and Euclidean distance matrices.
    Distmat(DistmatArgs),
    /// Sample a norm over a 2-D slice of coordinate space.
    Contour(ContourArgs),
    /// Run the real-dataset benchmark suites.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    pub metric: MetricKind,
    /// Z-score every feature before running.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn parse_metric(s: &str) -> Result<MetricKind, String> {
    s.parse()
        .map_err(|_| format!("expected `euclidean` or `view`, got {s:?}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Manifold {
    SwissRoll,
    SCurve,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub dataset: Manifold,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Input has no header row.
    #[arg(long)]
    pub no_header: bool,
    /// Label column: `last`, a zero-based index or a header name.
    #[arg(long)]
    pub label_column: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    #[value(name = "kmeans++")]
    KMeansPP,
    Random,
}

#[derive(Debug, Args)]
pub struct KmeansArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "kmeans++")]
    pub init: InitArg,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Loo,
    Kfold,
    Holdout,
}

#[derive(Debug, Args)]
pub struct KnnArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "loo")]
    pub protocol: ProtocolArg,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Test fraction for hold-out.
    #[arg(long, default_value_t = 0.3)]
    pub fraction: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, default_value = "label")]
    pub truth_column: String,
    #[arg(long, default_value = "label")]
    pub pred_column: String,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistmatArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Relative threshold for counting positive eigenvalues.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Allow more than the default point cap.
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ContourArgs {
    #[arg(long)]
    pub dim: usize,
    /// Fixed coordinate as `index=value`; repeatable.
    #[arg(long = "fixed", value_parser = parse_fixed)]
    pub fixed: Vec<(usize, f64)>,
    /// The two varying coordinates, as `a,b`.
    #[arg(long, default_value = "0,1", value_parser = parse_axes)]
    pub axes: (usize, usize),
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    #[command(flatten)]
    pub common: Common,
}

fn parse_fixed(s: &str) -> Result<(usize, f64), String> {
    let (i, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected index=value, got {s:?}"))?;
    let i = i
        .trim()
        .parse()
        .map_err(|_| format!("bad coordinate index {i:?}"))?;
    let v = v.trim().parse().map_err(|_| format!("bad value {v:?}"))?;
    Ok((i, v))
}

fn parse_axes(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected a,b, got {s:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad axis {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad axis {b:?}"))?;
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Table2,
    Table3,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Directory holding `<name>.csv` files.
    #[arg(long)]
    pub data_dir: PathBuf,
    /// Restrict to these datasets; repeatable.
    #[arg(long = "dataset")]
    pub datasets: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
