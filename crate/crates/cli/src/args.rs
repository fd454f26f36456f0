use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ballsketch", version, about = "Ball-subgraph sketches for local graph clustering")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Write results here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Worker threads; falls back to BALLSKETCH_THREADS, then the core count.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the run manifest here instead of stderr.
    #[arg(long, global = true, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    #[arg(long, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a planted-partition graph as an edge list.
    Gen(GenArgs),
    /// Per-node ball cardinality estimates.
    Balls(BallsArgs),
    /// Conductance estimates with error intervals.
    Conductance(EstimateArgs),
    /// Triangle-count estimates with error intervals.
    Triangles(EstimateArgs),
    /// Transitivity estimates with error intervals.
    Transitivity(EstimateArgs),
    /// Evaluate interval formulas for given counts.
    Bounds(BoundsArgs),
    /// Select seed nodes.
    Seeds(SeedsArgs),
    /// Run PageRank-Nibble from seed sets.
    Nibble(NibbleArgs),
    /// Exact ball statistics.
    Exact(ExactArgs),
    /// Dip test for unimodality.
    Diptest(DiptestArgs),
    /// Conductance error against register count on generated graphs.
    SweepRegisters(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub mean_degree: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SketchArgs {
    /// Edge list, one "u v" pair per line.
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    /// log2 of the register count per counter.
    #[arg(long, default_value_t = 10)]
    pub bits: u8,
    /// Hash seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Turn off the linear-counting correction for small cardinalities.
    #[arg(long)]
    pub no_small_range_correction: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Append exact values computed by brute force.
    #[arg(long)]
    pub oracle: bool,
    /// Largest graph (in nodes) accepted for exact computation.
    #[arg(long, default_value_t = 5000)]
    pub oracle_limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Node,
    Edge,
    Outedge,
    Inedge,
    Triangle,
    Wedge,
    Graphlet,
}

#[derive(Debug, Args)]
pub struct BallsArgs {
    #[command(flatten)]
    pub sketch: SketchArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[arg(long, value_enum, default_value_t = KindArg::Node)]
    pub kind: KindArg,
    /// Graphlet ids per node: one "v id id ..." line per node.
    #[arg(long, value_name = "FILE")]
    pub graphlets: Option<PathBuf>,
    /// Write the final counters in snapshot format.
    #[arg(long, value_name = "FILE")]
    pub snapshot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub sketch: SketchArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
    /// Target confidence of the intervals.
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    /// Clamp ratio estimates to [0, 1].
    #[arg(long)]
    pub clamp: bool,
    /// Run a dip test with this many replicates on the estimates and record
    /// whether unimodality is plausible (0 skips the test).
    #[arg(long, default_value_t = 0)]
    pub dip_trials: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Conductance,
    Triangles,
    Transitivity,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub estimator: EstimatorArg,
    /// Edgeball or triangle cardinality.
    #[arg(long)]
    pub num: f64,
    /// Out-edgeball or wedge cardinality (ratio estimators only).
    #[arg(long)]
    pub den: Option<f64>,
    /// Estimate to centre the interval on; defaults to the ratio of the counts.
    #[arg(long)]
    pub value: Option<f64>,
    #[arg(long, default_value_t = 14)]
    pub bits: u8,
    #[arg(long, default_value_t = 0.95, conflicts_with = "width1")]
    pub confidence: f64,
    /// Explicit first width (p1 or lambda1, or a for triangles).
    #[arg(long)]
    pub width1: Option<f64>,
    #[arg(long, requires = "width1")]
    pub width2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SeedsArgs {
    #[command(flatten)]
    pub sketch: SketchArgs,
    /// phi-min, triangle-max, transitivity-max, degree-max or random, with an
    /// optional ":RADIUS" suffix overriding --radius.
    #[arg(long, default_value = "phi-min")]
    pub criterion: String,
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
}

#[derive(Debug, Args)]
pub struct NibbleArgs {
    #[command(flatten)]
    pub sketch: SketchArgs,
    /// Seed file, one node id per line.
    #[arg(long, value_name = "FILE")]
    pub seeds: Option<PathBuf>,
    /// Seed criteria, comma separated (see `seeds`).
    #[arg(long, value_delimiter = ',')]
    pub criterion: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    #[arg(long, default_value_t = 0.85)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 200)]
    pub max_cut: usize,
    /// Admit sweep prefixes holding more than half the total volume.
    #[arg(long)]
    pub no_half_volume: bool,
    /// Per-set summary CSV; defaults to OUT.summary.csv, or stderr without --out.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    #[arg(long, default_value_t = 5000)]
    pub oracle_limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    Conductance,
    Transitivity,
}

#[derive(Debug, Args)]
pub struct DiptestArgs {
    /// Sample file with one number per line.
    #[arg(long, value_name = "FILE", conflicts_with = "graph")]
    pub input: Option<PathBuf>,
    /// Test per-node estimates on this graph instead.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StatisticArg::Conductance)]
    pub statistic: StatisticArg,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    #[arg(long, default_value_t = 10)]
    pub bits: u8,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "8,10,12")]
    pub bits: Vec<u8>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0.3)]
    pub mu: f64,
    #[arg(long, default_value_t = 10.0)]
    pub mean_degree: f64,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    /// Graph seed of the first trial.
    #[arg(long, default_value_t = 1)]
    pub rng_seed: u64,
    /// Hash seed of the first trial.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
