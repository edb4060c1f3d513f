//! `graphgac`: graph generation, image ingestion, segmentation and
//! validation experiments.

mod commands;
mod error;
mod manifest;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "graphgac", version, about = "Geodesic active contours on arbitrary planar graphs")]
#[command(after_help = "Environment: GAC_THREADS caps the worker thread count (0 or unset = all cores).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a random geometric graph or a Delaunay triangulation.
    GenGraph(GenGraphArgs),
    /// Turn a PGM image into graph vertices with intensities.
    IngestImage(IngestArgs),
    /// Write a synthetic disk benchmark with its ground truth.
    GenFixture(FixtureArgs),
    /// Evolve an active contour over per-vertex values.
    Segment(SegmentArgs),
    /// Run a convergence or filter experiment and check its thresholds.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Rgg,
    Delaunay,
}

#[derive(Debug, clap::Args, serde::Serialize)]
pub struct GenGraphArgs {
    /// Graph construction.
    #[arg(long, value_enum)]
    pub mode: GraphKind,
    /// Number of uniformly sampled vertices in the unit square.
    #[arg(long, required_unless_present = "points", conflicts_with = "points")]
    pub n: Option<usize>,
    /// Radius constant: rgg radius is C * n^(-1/3).
    #[arg(long = "C", default_value_t = 0.6)]
    pub radius_const: f64,
    /// Sampling seed.
    #[arg(long, default_value_t = 0, conflicts_with = "points")]
    pub seed: u64,
    /// Use these vertices (CSV `x,y[,value]`) instead of sampling.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementKind {
    /// One vertex per watershed basin of the Sobel gradient, at its centroid.
    Watershed,
    /// `--n` distinct pixels drawn uniformly.
    Random,
}

#[derive(Debug, clap::Args, serde::Serialize)]
pub struct IngestArgs {
    /// Grayscale PGM (P2 or P5).
    #[arg(long)]
    pub image: PathBuf,
    /// Vertex placement.
    #[arg(long, value_enum)]
    pub mode: PlacementKind,
    /// Vertex count for random placement.
    #[arg(long, required_if_eq("mode", "random"))]
    pub n: Option<usize>,
    /// Edge structure over the placed vertices.
    #[arg(long, value_enum, default_value = "delaunay")]
    pub graph: GraphKind,
    /// Radius constant for rgg edges.
    #[arg(long = "C", default_value_t = 0.6)]
    pub radius_const: f64,
    /// Sampling seed for random placement.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureKind {
    /// One disk of radius 0.25, started from a circle of radius 0.45.
    Disk,
    /// Two disks of radius 0.15, started from one rectangle around both.
    TwoDisks,
}

#[derive(Debug, clap::Args, serde::Serialize)]
pub struct FixtureArgs {
    #[arg(long, value_enum)]
    pub kind: FixtureKind,
    /// Graph seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args, serde::Serialize)]
pub struct SegmentArgs {
    /// Directory holding `points.csv` and `edges.csv`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Per-vertex intensity (CSV `vertex,value`); defaults to the value
    /// column of the graph's points.
    #[arg(long)]
    pub values: Option<PathBuf>,
    /// Initial interior: `circle cx cy r`, `rect x0 y0 x1 y1`, or a CSV
    /// file with a `vertex` column.
    #[arg(long)]
    pub seed_region: String,
    /// JSON evolution parameters; unspecified fields keep their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Balloon constant.
    #[arg(long)]
    pub c: Option<f64>,
    /// Smoothing scale of the stopping function.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Edge sensitivity of the stopping function.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Convergence window; 0 runs exactly `max_iters` steps.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Write the embedding every k iterations under `snapshots/`.
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Ground-truth labels (CSV `vertex,interior`) for a Jaccard score.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Fail unless the Jaccard score reaches this value; requires `--truth`.
    #[arg(long, requires = "truth")]
    pub min_jaccard: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Geometric gradient of a Gaussian: error decreases with size and
    /// filtering helps.
    Gradient,
    /// Curvature of a smooth and a non-smooth cone.
    Curvature,
    /// Constant preservation of the normalized Gaussian filter and the
    /// defect of the plain one.
    Filters,
    /// Log-log slope of the raw gradient error.
    Exponent,
}

#[derive(Debug, clap::Args, serde::Serialize)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Ascending graph sizes.
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000")]
    pub sizes: Vec<usize>,
    /// Graphs per size.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "C", default_value_t = 0.6)]
    pub radius_const: f64,
    #[arg(long)]
    pub out: PathBuf,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GAC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("GAC_THREADS must be a non-negative integer, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::GenGraph(a) => commands::gen_graph(a),
        Command::IngestImage(a) => commands::ingest_image(a),
        Command::GenFixture(a) => commands::gen_fixture(a),
        Command::Segment(a) => commands::segment(a),
        Command::Validate(a) => commands::validate(a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
