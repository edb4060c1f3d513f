//! Level-set evolution of a geodesic active contour on a spatial graph.

use std::collections::VecDeque;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{
    curvature_geometric, curvature_gradient_based, gradient_geometric, gradient_magnitude_maxdiff,
    gradient_magnitude_one_sided, unit_field, zero_gradient_mask, NORM_EPS,
};
use crate::error::{GacError, Result};
use crate::field::{ScalarField, VectorField};
use crate::filters::{
    filter_median, filter_vector, gaussian_derivative_normalized, gaussian_normalized, stopping_function,
    GaussianParams, NeighborhoodFilter,
};
use crate::geometry::Point2;
use crate::graph::{GridIndex, SpatialGraph};

/// How the smoothed image gradient magnitude is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothingVariant {
    /// Normalized Gaussian smoothing followed by the max-difference magnitude.
    NormalizedGaussian,
    /// Norm of the half-plane normalized Gaussian derivative.
    GaussianDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurvatureVariant {
    Geometric,
    GradientBased,
}

/// Gradient magnitude used for the normal speed of the contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MagnitudeScheme {
    /// Largest absolute edge difference, whatever the direction of motion.
    MaxDiff,
    /// The filtered max-difference magnitude, capped by the largest drop
    /// where the embedding decreases and by the largest rise where it
    /// increases. A vertex then never moves past its lowest or highest
    /// neighbor while `dt * c * g <= 1`, which keeps the explicit update
    /// stable.
    Upwind,
}

/// Form of the advection term `∇g·∇u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportScheme {
    /// `(∇g·n)` times the normal-speed magnitude. Both factors scale with the
    /// edge length, so this term shrinks faster than the others as the graph
    /// gets denser.
    ScaledNormal,
    /// `∇g` dotted with the median-filtered geometric gradient of the
    /// embedding, which carries the same single power of edge length as the
    /// other terms.
    Gradient,
}

/// Evolution parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GacConfig {
    pub dt: f64,
    /// Balloon constant; positive values shrink the contour.
    pub c: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub smoothing_variant: SmoothingVariant,
    pub curvature_variant: CurvatureVariant,
    pub magnitude_scheme: MagnitudeScheme,
    pub transport_scheme: TransportScheme,
    pub max_iters: usize,
    /// A run converges once fewer than this fraction of vertices changed
    /// sign during the last `patience` iterations.
    pub flip_fraction: f64,
    /// Zero disables convergence detection, so exactly `max_iters` steps run.
    pub patience: usize,
    /// Median-filter the embedding after every update.
    pub smooth_embedding: bool,
}

impl Default for GacConfig {
    fn default() -> Self {
        GacConfig {
            dt: 0.005,
            c: 20.0,
            sigma: 0.02,
            lambda: 0.05,
            smoothing_variant: SmoothingVariant::NormalizedGaussian,
            curvature_variant: CurvatureVariant::Geometric,
            magnitude_scheme: MagnitudeScheme::Upwind,
            transport_scheme: TransportScheme::Gradient,
            max_iters: 2000,
            flip_fraction: 0.001,
            patience: 100,
            smooth_embedding: true,
        }
    }
}

impl GacConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(GacError::InvalidParameter(format!("{what} = {v} is out of range")));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", self.dt);
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return bad("c", self.c);
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma", self.sigma);
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda", self.lambda);
        }
        if !(self.flip_fraction > 0.0 && self.flip_fraction < 1.0) {
            return bad("flip_fraction", self.flip_fraction);
        }
        Ok(())
    }
}

/// Initial contour given as a vertex subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedRegion {
    Circle { cx: f64, cy: f64, r: f64 },
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
    Indices(Vec<usize>),
}

impl SeedRegion {
    /// Parses `circle cx cy r` or `rect x0 y0 x1 y1`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split_whitespace();
        let kind = parts.next().ok_or_else(|| GacError::SeedRegion("empty specification".into()))?;
        let nums: Vec<f64> = parts
            .map(|s| s.parse::<f64>().map_err(|_| GacError::SeedRegion(format!("`{s}` is not a number"))))
            .collect::<Result<_>>()?;
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(GacError::SeedRegion("coordinates must be finite".into()));
        }
        match (kind, nums.as_slice()) {
            ("circle", &[cx, cy, r]) if r > 0.0 => Ok(SeedRegion::Circle { cx, cy, r }),
            ("rect", &[x0, y0, x1, y1]) if x1 > x0 && y1 > y0 => Ok(SeedRegion::Rect { x0, y0, x1, y1 }),
            _ => Err(GacError::SeedRegion(format!(
                "`{spec}` is neither `circle cx cy r` nor `rect x0 y0 x1 y1` with positive extent"
            ))),
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match *self {
            SeedRegion::Circle { cx, cy, r } => p.dist(Point2::new(cx, cy)) <= r,
            SeedRegion::Rect { x0, y0, x1, y1 } => p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1,
            SeedRegion::Indices(_) => false,
        }
    }

    /// Per-vertex membership flags.
    pub fn membership(&self, graph: &SpatialGraph) -> Result<Vec<bool>> {
        match self {
            SeedRegion::Indices(ix) => {
                let mut mask = vec![false; graph.len()];
                for &i in ix {
                    if i >= graph.len() {
                        return Err(GacError::SeedRegion(format!(
                            "vertex {i} does not exist in a graph with {} vertices",
                            graph.len()
                        )));
                    }
                    mask[i] = true;
                }
                Ok(mask)
            }
            region => Ok(graph.points().iter().map(|&p| region.contains(p)).collect()),
        }
    }
}

/// Signed distance to the boundary of `inside`: the distance to the nearest
/// outside vertex for members, minus the distance to the nearest member
/// for the rest.
pub fn init_embedding(graph: &SpatialGraph, inside: &[bool]) -> Result<ScalarField> {
    if inside.len() != graph.len() {
        return Err(GacError::FieldMismatch { expected: graph.len(), found: inside.len() });
    }
    let (ins, outs): (Vec<Point2>, Vec<Point2>) = {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (&p, &m) in graph.points().iter().zip(inside) {
            if m {
                a.push(p);
            } else {
                b.push(p);
            }
        }
        (a, b)
    };
    if ins.is_empty() {
        return Err(GacError::SeedRegion("initial region contains no vertices".into()));
    }
    if outs.is_empty() {
        return Err(GacError::SeedRegion("initial region contains every vertex".into()));
    }
    let spacing = |n: usize| {
        let area = crate::geometry::Rect::bounding(graph.points()).map_or(1.0, |r| r.area().max(1e-12));
        (area / n as f64).sqrt()
    };
    let in_grid = GridIndex::new(&ins, spacing(ins.len()));
    let out_grid = GridIndex::new(&outs, spacing(outs.len()));
    let values = graph
        .points()
        .par_iter()
        .zip(inside.par_iter())
        .map(|(&p, &m)| {
            if m {
                out_grid.nearest(&outs, p).map_or(0.0, |(_, d)| d)
            } else {
                -in_grid.nearest(&ins, p).map_or(0.0, |(_, d)| d)
            }
        })
        .collect();
    ScalarField::new(graph, values)
}

/// Edge-stopping function and its gradient, fixed for a whole run.
#[derive(Debug, Clone)]
pub struct StoppingTerms {
    pub g: ScalarField,
    pub grad_g: VectorField,
}

/// Computes the stopping function from a smoothed image gradient whose
/// magnitude is median-filtered first. The gradient of `g` takes its
/// direction from the geometric gradient and its length from the
/// max-difference magnitude.
pub fn precompute_stopping(graph: &SpatialGraph, intensity: &ScalarField, cfg: &GacConfig) -> Result<StoppingTerms> {
    cfg.validate()?;
    intensity.check(graph)?;
    let params = GaussianParams::new(cfg.sigma)?;
    let magnitude = match cfg.smoothing_variant {
        SmoothingVariant::NormalizedGaussian => {
            let smoothed = gaussian_normalized(graph, intensity, params)?;
            gradient_magnitude_maxdiff(graph, &smoothed)?
        }
        SmoothingVariant::GaussianDerivative => gaussian_derivative_normalized(graph, intensity, params)?.norms(),
    };
    let magnitude = filter_median(graph, &magnitude)?;
    let g = stopping_function(&magnitude, cfg.lambda)?;
    let grad_g = scaled_direction(graph, &g)?;
    Ok(StoppingTerms { g, grad_g })
}

// Unit geometric-gradient direction scaled by the max-difference magnitude.
fn scaled_direction(graph: &SpatialGraph, u: &ScalarField) -> Result<VectorField> {
    let dir = unit_field(&gradient_geometric(graph, u)?, NORM_EPS);
    let mag = gradient_magnitude_maxdiff(graph, u)?;
    let values = dir.values().iter().zip(mag.values()).map(|(d, &m)| [d[0] * m, d[1] * m]).collect();
    VectorField::new(graph, values)
}

/// Per-vertex quantities of one update, all derived from the previous
/// embedding.
#[derive(Debug, Clone)]
pub struct UpdateTerms {
    /// Unit normal of the level sets (zero where undefined).
    pub normal: VectorField,
    /// Magnitude used where the embedding increases.
    pub ascent: ScalarField,
    /// Magnitude used where the embedding decreases.
    pub descent: ScalarField,
    /// Median-filtered level-set curvature.
    pub curvature: ScalarField,
    /// Median-filtered geometric gradient.
    pub gradient: VectorField,
}

pub fn update_terms(graph: &SpatialGraph, u: &ScalarField, cfg: &GacConfig) -> Result<UpdateTerms> {
    u.check(graph)?;
    let gradient = filter_vector(graph, &gradient_geometric(graph, u)?, NeighborhoodFilter::Median)?;
    let normal = unit_field(&gradient, NORM_EPS);
    let (ascent, descent) = match cfg.magnitude_scheme {
        MagnitudeScheme::MaxDiff => {
            let m = filter_median(graph, &gradient_magnitude_maxdiff(graph, u)?)?;
            (m.clone(), m)
        }
        MagnitudeScheme::Upwind => {
            let m = filter_median(graph, &gradient_magnitude_maxdiff(graph, u)?)?;
            let (up, down) = gradient_magnitude_one_sided(graph, u)?;
            (cap(&m, &up), cap(&m, &down))
        }
    };
    let curvature = match cfg.curvature_variant {
        CurvatureVariant::Geometric => curvature_geometric(graph, &normal)?,
        CurvatureVariant::GradientBased => curvature_gradient_based(graph, &normal)?,
    };
    let curvature = filter_median(graph, &curvature)?;
    Ok(UpdateTerms { normal, ascent, descent, curvature, gradient })
}

fn cap(magnitude: &ScalarField, one_sided: &ScalarField) -> ScalarField {
    magnitude.zip_map(one_sided, f64::min)
}

/// Explicit update `u + dt((κ - c)|∇u|g + ∇g·∇u)` before any smoothing. The
/// magnitude is the ascent or descent term according to the sign of the
/// normal speed, which includes the advection term under
/// [`TransportScheme::ScaledNormal`]. Vertices without a defined normal do
/// not move.
pub fn apply_update(u: &ScalarField, terms: &UpdateTerms, stopping: &StoppingTerms, cfg: &GacConfig) -> ScalarField {
    let zero = zero_gradient_mask(&terms.normal);
    let values = (0..u.len())
        .into_par_iter()
        .map(|v| {
            if zero[v] {
                return u[v];
            }
            let n = terms.normal[v];
            let gg = stopping.grad_g[v];
            let balloon = (terms.curvature[v] - cfg.c) * stopping.g[v];
            match cfg.transport_scheme {
                TransportScheme::ScaledNormal => {
                    let speed = balloon + gg[0] * n[0] + gg[1] * n[1];
                    let m = if speed < 0.0 { terms.descent[v] } else { terms.ascent[v] };
                    u[v] + cfg.dt * speed * m
                }
                TransportScheme::Gradient => {
                    let gr = terms.gradient[v];
                    let m = if balloon < 0.0 { terms.descent[v] } else { terms.ascent[v] };
                    u[v] + cfg.dt * (balloon * m + gg[0] * gr[0] + gg[1] * gr[1])
                }
            }
        })
        .collect();
    ScalarField::from_raw(u.graph_id(), values)
}

/// Evolution state after some number of steps.
#[derive(Debug, Clone)]
pub struct GacState {
    pub iteration: usize,
    pub u: ScalarField,
    /// Vertices whose sign changed in each of the most recent steps,
    /// oldest first; at most `patience` entries.
    pub flip_history: VecDeque<Vec<usize>>,
}

impl GacState {
    pub fn new(u: ScalarField) -> Self {
        GacState { iteration: 0, u, flip_history: VecDeque::new() }
    }

    /// Interior flags `u > 0`.
    pub fn labels(&self) -> Vec<bool> {
        self.u.values().iter().map(|&x| x > 0.0).collect()
    }

    /// Fraction of vertices that changed sign in the latest step.
    pub fn last_flip_fraction(&self) -> Option<f64> {
        self.flip_history.back().map(|f| self.fraction(f.len()))
    }

    /// Fraction of vertices that changed sign at least once within the
    /// recorded window.
    pub fn window_flip_fraction(&self) -> f64 {
        let mut seen = vec![false; self.u.len()];
        let mut count = 0;
        for &v in self.flip_history.iter().flatten() {
            if !seen[v] {
                seen[v] = true;
                count += 1;
            }
        }
        self.fraction(count)
    }

    fn fraction(&self, count: usize) -> f64 {
        if self.u.is_empty() {
            0.0
        } else {
            count as f64 / self.u.len() as f64
        }
    }
}

/// One synchronous iteration. Every vertex reads only the previous
/// embedding; sign flips are counted after the optional median smoothing.
pub fn evolve_step(graph: &SpatialGraph, state: &GacState, stopping: &StoppingTerms, cfg: &GacConfig) -> Result<GacState> {
    let terms = update_terms(graph, &state.u, cfg)?;
    let mut next = apply_update(&state.u, &terms, stopping, cfg);
    let iteration = state.iteration + 1;
    if next.values().iter().any(|x| !x.is_finite()) {
        return Err(GacError::Divergence { iteration });
    }
    if cfg.smooth_embedding {
        next = filter_median(graph, &next)?;
    }
    let flips: Vec<usize> = (0..next.len()).filter(|&v| (state.u[v] > 0.0) != (next[v] > 0.0)).collect();
    let mut flip_history = state.flip_history.clone();
    flip_history.push_back(flips);
    while flip_history.len() > cfg.patience.max(1) {
        flip_history.pop_front();
    }
    Ok(GacState { iteration, u: next, flip_history })
}

/// Outcome of a full run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub iterations: usize,
    pub converged: bool,
    pub terminal_flip_fraction: f64,
    pub interior_count: usize,
    pub wall_time_secs: f64,
    pub config: GacConfig,
}

// Converged once fewer than `flip_fraction` of the vertices changed sign at
// any point during the last `patience` steps.
fn converged(state: &GacState, cfg: &GacConfig) -> bool {
    cfg.patience > 0 && state.flip_history.len() == cfg.patience && state.window_flip_fraction() < cfg.flip_fraction
}

/// Runs the full algorithm and returns the interior flags `u > 0`.
pub fn run(graph: &SpatialGraph, intensity: &ScalarField, inside: &[bool], cfg: &GacConfig) -> Result<(Vec<bool>, RunSummary)> {
    run_with_observer(graph, intensity, inside, cfg, |_| {})
}

/// Like [`run`], calling `observer` after every step.
pub fn run_with_observer(
    graph: &SpatialGraph,
    intensity: &ScalarField,
    inside: &[bool],
    cfg: &GacConfig,
    mut observer: impl FnMut(&GacState),
) -> Result<(Vec<bool>, RunSummary)> {
    let start = Instant::now();
    cfg.validate()?;
    let stopping = precompute_stopping(graph, intensity, cfg)?;
    let mut state = GacState::new(init_embedding(graph, inside)?);
    let mut done = false;
    while state.iteration < cfg.max_iters && !done {
        state = evolve_step(graph, &state, &stopping, cfg)?;
        observer(&state);
        done = converged(&state, cfg);
    }
    let labels = state.labels();
    let summary = RunSummary {
        iterations: state.iteration,
        converged: done,
        terminal_flip_fraction: state.window_flip_fraction(),
        interior_count: labels.iter().filter(|&&b| b).count(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
    };
    Ok((labels, summary))
}

/// Intersection over union of two membership masks; 1 when both are empty.
pub fn jaccard(a: &[bool], b: &[bool]) -> f64 {
    let inter = a.iter().zip(b).filter(|(&x, &y)| x && y).count();
    let union = a.iter().zip(b).filter(|(&x, &y)| x || y).count();
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}
