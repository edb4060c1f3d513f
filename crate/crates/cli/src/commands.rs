use std::fs::File;
use std::path::{Path, PathBuf};

use gac_core::engine::{jaccard, run_with_observer};
use gac_core::graph::{build_delaunay, build_rgg, rgg_radius, sample_uniform_points};
use gac_core::io::{
    read_edges_csv, read_indices_csv, read_labels_csv, read_points_csv, read_scalar_csv, write_edges_csv,
    write_indices_csv, write_labels_csv, write_points_csv, write_scalar_csv,
};
use gac_core::raster::{
    assign_watershed_lines, load_pgm, sample_image_random, segment_centroids, sobel_gradient_magnitude,
    watershed_segments,
};
use gac_core::{DiskFixture, GacConfig, GacError, Point2, Rect, ScalarField, SeedRegion, SpatialGraph};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, IoContext};
use crate::manifest::OutputDir;
use crate::suites;
use crate::{FixtureArgs, FixtureKind, GenGraphArgs, GraphKind, IngestArgs, PlacementKind, SegmentArgs, ValidateArgs};

pub const POINTS: &str = "points.csv";
pub const EDGES: &str = "edges.csv";

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).at(path)
}

fn build(kind: GraphKind, points: Vec<Point2>, radius_const: f64) -> Result<(SpatialGraph, Option<f64>), CliError> {
    Ok(match kind {
        GraphKind::Rgg => {
            let radius = rgg_radius(points.len(), radius_const);
            (build_rgg(points, radius)?, Some(radius))
        }
        GraphKind::Delaunay => (build_delaunay(points)?, None),
    })
}

fn write_graph(out: &mut OutputDir, graph: &SpatialGraph, values: Option<&[f64]>) -> Result<(), CliError> {
    out.write(POINTS, |f| write_points_csv(f, graph.points(), values))?;
    out.write(EDGES, |f| write_edges_csv(f, graph))
}

fn graph_details(graph: &SpatialGraph, radius: Option<f64>) -> serde_json::Value {
    json!({ "vertices": graph.len(), "edges": graph.edge_count(), "rgg_radius": radius })
}

pub fn gen_graph(a: &GenGraphArgs) -> Result<bool, CliError> {
    let mut out = OutputDir::create(&a.out)?;
    let (points, values, seed, inputs) = match (&a.points, a.n) {
        (Some(path), _) => {
            let (p, v) = read_points_csv(open(path)?)?;
            (p, v, None, vec![path.clone()])
        }
        (None, Some(n)) => (sample_uniform_points(n, Rect::UNIT, a.seed)?, None, Some(a.seed), vec![]),
        (None, None) => return Err(CliError::Usage("either --n or --points is required".into())),
    };
    let (graph, radius) = build(a.mode, points, a.radius_const)?;
    write_graph(&mut out, &graph, values.as_deref())?;
    out.finish("gen-graph", a, seed, inputs, graph_details(&graph, radius))?;
    Ok(true)
}

pub fn ingest_image(a: &IngestArgs) -> Result<bool, CliError> {
    let img = load_pgm(&a.image)?;
    let mut out = OutputDir::create(&a.out)?;
    let (samples, basins) = match (a.mode, a.n) {
        (PlacementKind::Watershed, None) => {
            let grad = sobel_gradient_magnitude(&img)?;
            let labels = assign_watershed_lines(&watershed_segments(&grad), &grad);
            (segment_centroids(&labels, &img)?, Some(labels.basin_count()))
        }
        (PlacementKind::Watershed, Some(_)) => {
            return Err(CliError::Usage("--n applies to random placement only".into()));
        }
        (PlacementKind::Random, Some(n)) => (sample_image_random(&img, n, a.seed)?, None),
        (PlacementKind::Random, None) => return Err(CliError::Usage("random placement needs --n".into())),
    };
    let (points, values): (Vec<Point2>, Vec<f64>) = samples.into_iter().unzip();
    let (graph, radius) = build(a.graph, points, a.radius_const)?;
    write_graph(&mut out, &graph, Some(&values))?;
    let mut details = graph_details(&graph, radius);
    details["image_width"] = json!(img.width());
    details["image_height"] = json!(img.height());
    details["basins"] = json!(basins);
    let seed = (a.mode == PlacementKind::Random).then_some(a.seed);
    out.finish("ingest-image", a, seed, vec![a.image.clone()], details)?;
    Ok(true)
}

fn region_spec(region: &SeedRegion) -> String {
    match region {
        SeedRegion::Circle { cx, cy, r } => format!("circle {cx} {cy} {r}"),
        SeedRegion::Rect { x0, y0, x1, y1 } => format!("rect {x0} {y0} {x1} {y1}"),
        SeedRegion::Indices(ix) => format!("{} listed vertices", ix.len()),
    }
}

pub fn gen_fixture(a: &FixtureArgs) -> Result<bool, CliError> {
    let fx = match a.kind {
        FixtureKind::Disk => DiskFixture::disk(a.seed)?,
        FixtureKind::TwoDisks => DiskFixture::two_disks(a.seed)?,
    };
    let mut out = OutputDir::create(&a.out)?;
    write_graph(&mut out, &fx.graph, Some(fx.intensity.values()))?;
    let truth = fx.truth();
    out.write("truth.csv", |f| write_labels_csv(f, &truth))?;
    let inside: Vec<usize> = fx.initial_inside()?.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v).collect();
    out.write("seed.csv", |f| write_indices_csv(f, &inside))?;
    out.write_json("config.json", &fx.config)?;
    let disks: Vec<_> = fx.disks.iter().map(|(c, r)| json!({ "cx": c.x, "cy": c.y, "r": r })).collect();
    let mut details = graph_details(&fx.graph, None);
    details["disks"] = json!(disks);
    details["seed_region"] = json!(region_spec(&fx.seed_region));
    out.finish("gen-fixture", a, Some(a.seed), vec![], details)?;
    Ok(true)
}

/// Reads `points.csv` and `edges.csv` from `dir`.
pub fn load_graph(dir: &Path) -> Result<(SpatialGraph, Option<Vec<f64>>), CliError> {
    let (points, values) = read_points_csv(open(&dir.join(POINTS))?)?;
    let edges = read_edges_csv(open(&dir.join(EDGES))?)?;
    Ok((SpatialGraph::from_edges(points, &edges)?, values))
}

fn parse_region(spec: &str) -> Result<(SeedRegion, Option<PathBuf>), CliError> {
    match spec.split_whitespace().next() {
        Some("circle" | "rect") => Ok((SeedRegion::parse(spec)?, None)),
        _ => {
            let path = PathBuf::from(spec);
            Ok((SeedRegion::Indices(read_indices_csv(open(&path)?)?), Some(path)))
        }
    }
}

fn resolve_config(a: &SegmentArgs) -> Result<GacConfig, CliError> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).at(path)?;
            serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.clone(), source })?
        }
        None => GacConfig::default(),
    };
    cfg.dt = a.dt.unwrap_or(cfg.dt);
    cfg.c = a.c.unwrap_or(cfg.c);
    cfg.sigma = a.sigma.unwrap_or(cfg.sigma);
    cfg.lambda = a.lambda.unwrap_or(cfg.lambda);
    cfg.max_iters = a.max_iters.unwrap_or(cfg.max_iters);
    cfg.patience = a.patience.unwrap_or(cfg.patience);
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct SegmentReport {
    vertices: usize,
    iterations: usize,
    converged: bool,
    terminal_flip_fraction: f64,
    interior_count: usize,
    jaccard: Option<f64>,
    min_jaccard: Option<f64>,
    passed: bool,
    wall_time_secs: f64,
    config: GacConfig,
}

pub fn segment(a: &SegmentArgs) -> Result<bool, CliError> {
    if a.snapshot_every == Some(0) {
        return Err(CliError::Usage("--snapshot-every must be positive".into()));
    }
    let cfg = resolve_config(a)?;
    let (graph, point_values) = load_graph(&a.graph)?;
    let mut inputs = vec![a.graph.clone()];
    let values = match &a.values {
        Some(path) => {
            inputs.push(path.clone());
            read_scalar_csv(open(path)?)?
        }
        None => point_values.ok_or_else(|| {
            CliError::Usage(format!("{} has no value column; pass --values", a.graph.join(POINTS).display()))
        })?,
    };
    let intensity = ScalarField::new(&graph, values)?;
    let (region, region_path) = parse_region(&a.seed_region)?;
    inputs.extend(region_path);
    let inside = region.membership(&graph)?;
    let truth = match &a.truth {
        Some(path) => {
            inputs.push(path.clone());
            let t = read_labels_csv(open(path)?)?;
            if t.len() != graph.len() {
                return Err(GacError::FieldMismatch { expected: graph.len(), found: t.len() }.into());
            }
            Some(t)
        }
        None => None,
    };

    let mut out = OutputDir::create(&a.out)?;
    let mut snapshot_error = None;
    let (labels, summary) = run_with_observer(&graph, &intensity, &inside, &cfg, |state| {
        let due = a.snapshot_every.is_some_and(|k| state.iteration % k == 0);
        if due && snapshot_error.is_none() {
            let name = format!("snapshots/u_{:06}.csv", state.iteration);
            if let Err(e) = out.write(&name, |f| write_scalar_csv(f, &state.u)) {
                snapshot_error = Some(e);
            }
        }
    })?;
    if let Some(e) = snapshot_error {
        return Err(e);
    }
    if !summary.converged && cfg.patience > 0 {
        eprintln!("warning: no convergence within {} iterations", summary.iterations);
    }
    out.write("labels.csv", |f| write_labels_csv(f, &labels))?;
    let score = truth.as_ref().map(|t| jaccard(&labels, t));
    let passed = match (score, a.min_jaccard) {
        (Some(j), Some(min)) => j >= min,
        _ => true,
    };
    let report = SegmentReport {
        vertices: graph.len(),
        iterations: summary.iterations,
        converged: summary.converged,
        terminal_flip_fraction: summary.terminal_flip_fraction,
        interior_count: summary.interior_count,
        jaccard: score,
        min_jaccard: a.min_jaccard,
        passed,
        wall_time_secs: summary.wall_time_secs,
        config: cfg.clone(),
    };
    out.write_json("summary.json", &report)?;
    let details = json!({ "seed_region": region_spec(&region), "config": cfg });
    out.finish("segment", a, None, inputs, details)?;
    if let Some(j) = score {
        println!("jaccard {j:.4} after {} iterations", summary.iterations);
    }
    Ok(passed)
}

pub fn validate(a: &ValidateArgs) -> Result<bool, CliError> {
    let mut out = OutputDir::create(&a.out)?;
    let report = suites::run(a, &mut out)?;
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let passed = report.passed;
    out.write_json("checks.json", &report)?;
    out.finish("validate", a, Some(a.seed), vec![], json!({ "passed": passed }))?;
    Ok(passed)
}
