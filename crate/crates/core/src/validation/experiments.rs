use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{relative_error, AnalyticField, ErrorRow, ErrorTable};
use crate::calculus::{curvature_geometric, curvature_gradient_based, gradient_geometric, unit_field, NORM_EPS};
use crate::error::{GacError, Result};
use crate::field::{ScalarField, VectorField};
use crate::filters::{filter_scalar, filter_vector, NeighborhoodFilter};
use crate::geometry::{Point2, Rect};
use crate::graph::{build_rgg, rgg_radius, sample_uniform_points, SpatialGraph};

/// Graph sizes, repetitions and radius constant of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentPlan {
    pub sizes: Vec<usize>,
    pub trials: usize,
    /// Radius constant `C` in `C n^(-1/3)`.
    pub radius_const: f64,
    pub seed: u64,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan { sizes: vec![1000, 2000, 4000, 8000], trials: 10, radius_const: 0.6, seed: 0 }
    }
}

impl ExperimentPlan {
    fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(GacError::InvalidParameter("sizes must be non-empty and positive".into()));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GacError::InvalidParameter("sizes must be strictly ascending".into()));
        }
        if self.trials == 0 {
            return Err(GacError::InvalidParameter("at least one trial is required".into()));
        }
        if !(self.radius_const > 0.0 && self.radius_const.is_finite()) {
            return Err(GacError::InvalidParameter(format!("radius constant {} must be positive", self.radius_const)));
        }
        Ok(())
    }

    fn cases(&self) -> Vec<(usize, usize)> {
        self.sizes.iter().flat_map(|&n| (0..self.trials).map(move |t| (n, t))).collect()
    }

    fn graph(&self, n: usize, trial: usize) -> Result<SpatialGraph> {
        let pts = sample_uniform_points(n, Rect::UNIT, trial_seed(self.seed, n, trial))?;
        build_rgg(pts, rgg_radius(n, self.radius_const))
    }
}

/// Independent RNG stream per (seed, size, trial), so tables do not depend
/// on scheduling.
pub fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    let mut z = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    // SplitMix64 finalizer.
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn filter_name(kind: Option<NeighborhoodFilter>) -> &'static str {
    match kind {
        None => "none",
        Some(NeighborhoodFilter::Average) => "average",
        Some(NeighborhoodFilter::Median) => "median",
    }
}

fn run_cases(plan: &ExperimentPlan, per_graph: impl Fn(&SpatialGraph) -> Result<Vec<(&'static str, &'static str, f64)>> + Sync) -> Result<ErrorTable> {
    plan.validate()?;
    let results: Vec<Result<Vec<ErrorRow>>> = plan
        .cases()
        .into_par_iter()
        .map(|(n, trial)| {
            let g = plan.graph(n, trial)?;
            Ok(per_graph(&g)?
                .into_iter()
                .map(|(op, filter, e_r)| ErrorRow { n, trial, operator: op.into(), filter: filter.into(), e_r })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(ErrorTable { rows })
}

/// Geometric gradient error, raw and after average or median filtering,
/// against the analytic gradient on fresh random geometric graphs.
pub fn gradient_convergence_experiment(field: &AnalyticField, plan: &ExperimentPlan) -> Result<ErrorTable> {
    run_cases(plan, |g| {
        let u = ScalarField::from_fn(g, |p| field.value(p));
        let exact = VectorField::from_fn(g, |p| field.gradient(p));
        let isolated = g.isolated_mask();
        let raw = gradient_geometric(g, &u)?;
        let mut out = vec![("geometric", "none", relative_error(&raw, &exact, &isolated)?)];
        for kind in [NeighborhoodFilter::Average, NeighborhoodFilter::Median] {
            let f = filter_vector(g, &raw, kind)?;
            out.push(("geometric", filter_name(Some(kind)), relative_error(&f, &exact, &isolated)?));
        }
        Ok(out)
    })
}

/// Curvature error of both curvature operators. The same filter is applied
/// to the input gradient and to the curvature estimate.
pub fn curvature_convergence_experiment(field: &AnalyticField, plan: &ExperimentPlan) -> Result<ErrorTable> {
    run_cases(plan, |g| {
        let u = ScalarField::from_fn(g, |p| field.value(p));
        let exact = ScalarField::from_fn(g, |p| field.level_set_curvature(p));
        let isolated = g.isolated_mask();
        let raw = gradient_geometric(g, &u)?;
        let mut out = Vec::new();
        for kind in [NeighborhoodFilter::Average, NeighborhoodFilter::Median] {
            let normal = unit_field(&filter_vector(g, &raw, kind)?, NORM_EPS);
            let geo = filter_scalar(g, &curvature_geometric(g, &normal)?, kind)?;
            let grad = filter_scalar(g, &curvature_gradient_based(g, &normal)?, kind)?;
            out.push(("geometric", filter_name(Some(kind)), relative_error(&geo, &exact, &isolated)?));
            out.push(("gradient-based", filter_name(Some(kind)), relative_error(&grad, &exact, &isolated)?));
        }
        Ok(out)
    })
}

/// Least-squares slope of `log(median e_r)` against `log n`.
pub fn error_exponent_fit(table: &ErrorTable, operator: &str, filter: &str) -> Result<f64> {
    let med = table.medians(operator, filter);
    if med.len() < 3 {
        return Err(GacError::InsufficientData(format!(
            "{operator}/{filter} has {} sizes, at least 3 are needed",
            med.len()
        )));
    }
    if let Some(&(n, e)) = med.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(GacError::InsufficientData(format!("median error {e} at n = {n} has no logarithm")));
    }
    let pts: Vec<(f64, f64)> = med.iter().map(|&(n, e)| ((n as f64).ln(), e.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Riemann sum of `(1/π) ∮ D_φ u(x) e_φ dφ` over `partitions` equal steps,
/// using exact directional derivatives.
pub fn riemann_gradient_oracle(field: &AnalyticField, point: Point2, partitions: usize) -> Result<[f64; 2]> {
    if partitions < 8 {
        return Err(GacError::InvalidParameter(format!("at least 8 partitions are required, got {partitions}")));
    }
    let g = field.gradient(point);
    let step = TAU / partitions as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..partitions {
        let (s, c) = (k as f64 * step).sin_cos();
        let d = g[0] * c + g[1] * s;
        sx += d * c;
        sy += d * s;
    }
    Ok([sx * step / PI, sy * step / PI])
}
