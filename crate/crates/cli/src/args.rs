use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "flakelab", version, about = "Finite-metric embedding laboratory")]
pub struct Cli {
    /// Directory for output documents; defaults to $FLAKELAB_OUT_DIR.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Materialize the Hamming cube H_n with d_p = h^{1/p}.
    Cube(CubeArgs),
    /// Embed an ℓ_p point set so Euclidean distances are ‖x - y‖_p^{p/2}.
    Embed(EmbedArgs),
    /// Bracket the least Euclidean distortion c₂ of a finite metric space.
    Distort(DistortArgs),
    /// Enflo type constant of a map from the sign cube.
    Enflo(EnfloArgs),
    /// Rademacher type constant of a vector sample in ℓ_q.
    Type(TypeArgs),
    /// Check an Austin-type certificate on a cube family in an ℓ_p model.
    Austin(AustinArgs),
    /// Snowflake exponent scan over Hamming cubes.
    Scan(ScanArgs),
    /// Run the acceptance suite.
    Suite(SuiteArgs),
}

#[derive(Debug, Args)]
pub struct CubeArgs {
    /// Cube dimension.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub n: u32,
    /// Metric exponent, p ≥ 1.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Output file; otherwise `cube.json` in the output directory, or stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Point set document (`{"p", "dim", "points"}`) or a bare array of points.
    #[arg(long, conflicts_with = "cube", required_unless_present = "cube")]
    pub points: Option<PathBuf>,
    /// Use the 0/1 vertices of the n-cube as the point set.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub cube: Option<u32>,
    /// ℓ_p exponent; overrides the document's.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistortArgs {
    /// Finite metric space document.
    #[arg(long, conflicts_with = "cube", required_unless_present = "cube")]
    pub space: Option<PathBuf>,
    /// Use the Hamming cube H_n instead of a document.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub cube: Option<u32>,
    /// Metric exponent of the cube.
    #[arg(long, default_value_t = 1.0, requires = "cube")]
    pub p: f64,
    /// Snowflake the space by this exponent first.
    #[arg(long)]
    pub snowflake: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Stop bisecting once upper / lower ≤ 1 + rel-tol.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Relative pair-constraint violation accepted as feasible.
    #[arg(long)]
    pub feasibility_tol: Option<f64>,
    /// Projection sweeps per bisection step.
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnfloTarget {
    /// Identity into (H_n, d_1).
    Cube,
    /// Sign vectors in ℓ_2^n.
    L2,
    /// Identity into the α-snowflake of (H_n, d_1).
    Snowflake,
}

#[derive(Debug, Args)]
pub struct EnfloArgs {
    /// Map document (`{"source", "target", "assignment"}`).
    #[arg(long, conflicts_with_all = ["n", "into"], required_unless_present = "n")]
    pub map: Option<PathBuf>,
    /// Sign cube dimension for a built-in map.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12), requires = "into")]
    pub n: Option<u32>,
    /// Built-in map target.
    #[arg(long, value_enum)]
    pub into: Option<EnfloTarget>,
    /// Snowflake exponent for `--into snowflake`.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Enflo exponent p ≥ 1.
    #[arg(long, default_value_t = 2.0)]
    pub exponent: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TypeArgs {
    /// JSON array of vectors.
    #[arg(long, conflicts_with = "basis", required_unless_present = "basis")]
    pub vectors: Option<PathBuf>,
    /// Use the unit vector basis of ℝ^n.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=20))]
    pub basis: Option<u32>,
    /// Norm parameter of the ambient ℓ_q.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Type exponent.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AustinArgs {
    /// Model parameter p of ℓ_p.
    #[arg(long, default_value_t = 0.5)]
    pub model_p: f64,
    /// Cube dimensions of the family, increasing.
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3, 4])]
    pub dims: Vec<u32>,
    /// Distortion growth exponent η.
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    /// Sandwich exponent γ; defaults to r/p_X.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Common discreteness d.
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Member table; defaults to `austin.csv` beside the document.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
    pub dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.75, 1.0])]
    pub alphas: Vec<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cell table; defaults to `scan.csv` beside the document.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// JSON experiment configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run only these criteria (1-10).
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=10))]
    pub criteria: Option<Vec<u8>>,
    #[command(flatten)]
    pub solver: SolverArgs,
}
