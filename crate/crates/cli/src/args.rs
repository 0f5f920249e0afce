use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "cubature", version, about = "Random convex hull cubature experiments")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Config file: key=value lines with [section] headers, or a previous
    /// JSON/CSV result whose embedded config is replayed. Flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Polynomial cubature for a product distribution on R^d.
    Poly(PipelineCmd),
    /// Cubature on Wiener space from Brownian path signatures.
    Wiener(PipelineCmd),
    /// Kernel quadrature for a periodic Sobolev kernel on [0,1]^d.
    Kernel(PipelineCmd),
    /// Monte Carlo estimate of P{theta in the hull of N samples}.
    EstimateP(EstimatePCmd),
    /// Smallest N with P{theta in the hull} >= 1/2.
    EstimateNx(EstimateNxCmd),
    /// Closed-form sample-size bounds.
    Bounds(BoundsCmd),
    /// Hypercontractivity sufficient conditions.
    HcCheck(HcCmd),
    /// Tukey depth upper bound and directional moment ratios.
    Depth(DepthCmd),
    /// Success rate of a pipeline over a grid of N/D ratios.
    Sweep(SweepCmd),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Poly(_) => "poly",
            Command::Wiener(_) => "wiener",
            Command::Kernel(_) => "kernel",
            Command::EstimateP(_) => "estimate-p",
            Command::EstimateNx(_) => "estimate-nx",
            Command::Bounds(_) => "bounds",
            Command::HcCheck(_) => "hc-check",
            Command::Depth(_) => "depth",
            Command::Sweep(_) => "sweep",
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Poly(c) | Command::Wiener(c) | Command::Kernel(c) => &c.common,
            Command::EstimateP(c) => &c.common,
            Command::EstimateNx(c) => &c.common,
            Command::Bounds(c) => &c.common,
            Command::HcCheck(c) => &c.common,
            Command::Depth(c) => &c.common,
            Command::Sweep(c) => &c.common,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    F64,
    F32,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dist {
    Uniform01,
    Gaussian,
    Rademacher,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Expected signature of Brownian motion.
    Brownian,
    /// Expected signature of the sampled piecewise-linear paths.
    Discretized,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent repetitions; repetition r > 0 uses a seed derived from (seed, r).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    /// Output file (stdout when absent).
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Record wall-clock time (the output is then no longer bit-identical).
    #[arg(long)]
    pub timing: bool,
    /// Exit with status 4 when a membership test fails.
    #[arg(long)]
    pub require_success: bool,
}

/// Model parameters shared by the pipelines and the feature samplers.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ModelArgs {
    /// Coordinate law of the polynomial pipeline.
    #[arg(long, value_enum, default_value = "uniform01")]
    pub dist: Dist,
    /// Dimension of the underlying space (Brownian coordinates for wiener).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Polynomial degree or signature weight.
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 64)]
    pub partitions: usize,
    #[arg(long, value_enum, default_value = "brownian")]
    pub target: Target,
    /// Sobolev smoothness.
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Sobolev scaling in (0, 1); required by kernel models.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Eigenvalue threshold for kernel features.
    #[arg(long, default_value_t = 0.3)]
    pub threshold: f64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PipelineCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Number of samples.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "f64")]
    pub precision: Precision,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    /// Standard Gaussian in R^D.
    Gaussian,
    /// Independent signs in R^D.
    Rademacher,
    /// Uniform on [-1, 1]^D.
    Uniform,
    /// Monomial features of --dist in --d variables up to degree --m.
    Poly,
    /// Signature features of Brownian paths.
    Wiener,
    /// Sobolev eigenfunction features above --threshold.
    Kernel,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SamplerArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    pub sampler: SamplerKind,
    /// Dimension of the gaussian, rademacher and uniform samplers.
    #[arg(long = "D", default_value_t = 2)]
    #[serde(rename = "D")]
    pub big_d: usize,
    /// Target point (defaults: origin, or the exact mean for feature samplers).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EstimatePCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub sampler: SamplerArgs,
    /// Sample sizes, comma separated or as ranges `a-b`.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    #[serde(rename = "N")]
    pub n: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EstimateNxCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long, default_value_t = 400)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    #[arg(long, default_value_t = 4096)]
    pub n_max: usize,
    /// Escalation cap for undecided N (defaults to 16 x trials).
    #[arg(long)]
    pub max_trials: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    #[value(name = "tukey")]
    #[serde(rename = "tukey")]
    Tukey,
    #[value(name = "log_concave")]
    #[serde(rename = "log_concave")]
    LogConcave,
    #[value(name = "moment")]
    #[serde(rename = "moment")]
    Moment,
    #[value(name = "wiener_chaos_K")]
    #[serde(rename = "wiener_chaos_K")]
    WienerChaosK,
    #[value(name = "wiener_N")]
    #[serde(rename = "wiener_N")]
    WienerN,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundsCmd {
    #[arg(long, value_enum)]
    pub name: BoundKind,
    #[arg(long = "D")]
    #[serde(rename = "D")]
    pub big_d: Option<u64>,
    /// Tukey depth alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Moment constant K.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<f64>,
    /// Chaos order.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Signature weight.
    #[arg(long)]
    pub m: Option<u32>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HcKind {
    /// Graded family with explicit eigenvalues and an optional power-law tail.
    Grp,
    /// Kernel operator norm / trace / L4 condition.
    Kernel,
    /// Parameters (s, t) for the periodic Sobolev family.
    Sobolev,
    /// Worst directional L4/L2 ratio of independent coordinates.
    Khintchine,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct HcCmd {
    #[arg(long, value_enum)]
    pub kind: HcKind,
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long)]
    pub tail_scale: Option<f64>,
    #[arg(long)]
    pub tail_exponent: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub op_norm: Option<f64>,
    #[arg(long)]
    pub trace: Option<f64>,
    #[arg(long)]
    pub l4_norm: Option<f64>,
    #[arg(long)]
    pub diag_sup: Option<f64>,
    /// Kernel-condition exponent r, or Sobolev smoothness.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Moments E|X|^1..E|X|^4 of one coordinate (khintchine).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub moments: Option<Vec<f64>>,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<f64>,
    #[arg(long = "D")]
    #[serde(rename = "D")]
    pub big_d: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub directions: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DepthCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub sampler: SamplerArgs,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 200)]
    pub directions: usize,
    /// Also report the largest directional L^p/L^2 ratio for this p > 2.
    #[arg(long)]
    pub p: Option<f64>,
    /// Subtract the empirical mean before the moment ratio.
    #[arg(long)]
    pub center: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepTarget {
    Poly,
    Wiener,
    Kernel,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepCmd {
    #[arg(long = "pipeline", value_enum)]
    #[serde(rename = "pipeline")]
    pub pipeline: SweepTarget,
    /// N/D ratios, comma separated or as ranges `a-b`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ratios: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}
