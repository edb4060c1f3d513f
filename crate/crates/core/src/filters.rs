//! Smoothing on graphs: neighborhood average/median, Gaussian convolution
//! variants, and the edge-stopping function.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GacError, Result};
use crate::field::{ScalarField, VectorField};
use crate::graph::{GridIndex, SpatialGraph};

/// Neighborhood filter kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeighborhoodFilter {
    Average,
    Median,
}

/// Mean over the vertex and its neighbors.
pub fn filter_average(graph: &SpatialGraph, u: &ScalarField) -> Result<ScalarField> {
    u.check(graph)?;
    let x = u.values();
    let values = (0..graph.len())
        .into_par_iter()
        .map(|v| {
            let nb = graph.neighbors(v);
            let sum: f64 = x[v] + nb.iter().map(|&w| x[w]).sum::<f64>();
            sum / (nb.len() + 1) as f64
        })
        .collect();
    Ok(ScalarField::from_raw(graph.id(), values))
}

/// Median over the vertex and its neighbors; for an even count, the mean
/// of the two central values.
pub fn filter_median(graph: &SpatialGraph, u: &ScalarField) -> Result<ScalarField> {
    u.check(graph)?;
    let x = u.values();
    let values = (0..graph.len())
        .into_par_iter()
        .map_init(Vec::new, |buf, v| {
            buf.clear();
            buf.push(x[v]);
            buf.extend(graph.neighbors(v).iter().map(|&w| x[w]));
            median_in_place(buf)
        })
        .collect();
    Ok(ScalarField::from_raw(graph.id(), values))
}

pub(crate) fn median_in_place(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    let mid = n / 2;
    let (lower, m, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    let m = *m;
    if n % 2 == 1 {
        m
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (below + m)
    }
}

pub fn filter_scalar(graph: &SpatialGraph, u: &ScalarField, kind: NeighborhoodFilter) -> Result<ScalarField> {
    match kind {
        NeighborhoodFilter::Average => filter_average(graph, u),
        NeighborhoodFilter::Median => filter_median(graph, u),
    }
}

/// Applies the scalar filter to each component separately.
pub fn filter_vector(graph: &SpatialGraph, f: &VectorField, kind: NeighborhoodFilter) -> Result<VectorField> {
    f.check(graph)?;
    let x = filter_scalar(graph, &f.component(0), kind)?;
    let y = filter_scalar(graph, &f.component(1), kind)?;
    VectorField::from_components(&x, &y)
}

/// Isotropic Gaussian kernel scale with support truncated at
/// `cutoff_mult * sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub sigma: f64,
    pub cutoff_mult: f64,
}

impl GaussianParams {
    pub const DEFAULT_CUTOFF: f64 = 4.0;

    pub fn new(sigma: f64) -> Result<Self> {
        Self::with_cutoff(sigma, Self::DEFAULT_CUTOFF)
    }

    pub fn with_cutoff(sigma: f64, cutoff_mult: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(GacError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if !(cutoff_mult >= 2.0) {
            return Err(GacError::InvalidParameter(format!("cutoff multiplier must be >= 2, got {cutoff_mult}")));
        }
        Ok(GaussianParams { sigma, cutoff_mult })
    }

    pub fn cutoff(&self) -> f64 {
        self.sigma * self.cutoff_mult
    }

    /// Kernel value at squared distance `r2`.
    pub fn kernel(&self, r2: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (-r2 / (2.0 * s2)).exp() / (2.0 * PI * s2)
    }
}

const WEIGHT_FLOOR: f64 = 1e-300;

// Visits every vertex within the cutoff of v (including v) in grid order.
fn for_each_in_support(
    graph: &SpatialGraph,
    grid: &GridIndex,
    p: &GaussianParams,
    v: usize,
    mut f: impl FnMut(usize, f64, f64, f64),
) {
    let pts = graph.points();
    let c = pts[v];
    let cut = p.cutoff();
    let cut2 = cut * cut;
    grid.for_each_candidate(c, cut, |w| {
        let dx = c.x - pts[w].x;
        let dy = c.y - pts[w].y;
        let r2 = dx * dx + dy * dy;
        if r2 <= cut2 {
            f(w, dx, dy, r2);
        }
    });
}

/// Unnormalized graph convolution `Σ_w I(w) G(v - w)`.
pub fn gaussian_simple(graph: &SpatialGraph, u: &ScalarField, p: GaussianParams) -> Result<ScalarField> {
    u.check(graph)?;
    let grid = GridIndex::new(graph.points(), p.cutoff());
    let x = u.values();
    let values = (0..graph.len())
        .into_par_iter()
        .map(|v| {
            let mut acc = 0.0;
            for_each_in_support(graph, &grid, &p, v, |w, _, _, r2| acc += x[w] * p.kernel(r2));
            acc
        })
        .collect();
    Ok(ScalarField::from_raw(graph.id(), values))
}

/// Convolution divided by the local kernel mass, so constants are
/// preserved regardless of sampling density.
pub fn gaussian_normalized(graph: &SpatialGraph, u: &ScalarField, p: GaussianParams) -> Result<ScalarField> {
    u.check(graph)?;
    let grid = GridIndex::new(graph.points(), p.cutoff());
    let x = u.values();
    let values = (0..graph.len())
        .into_par_iter()
        .map(|v| {
            let mut num = 0.0;
            let mut den = 0.0;
            for_each_in_support(graph, &grid, &p, v, |w, _, _, r2| {
                let k = p.kernel(r2);
                num += x[w] * k;
                den += k;
            });
            if den < WEIGHT_FLOOR {
                x[v]
            } else {
                num / den
            }
        })
        .collect();
    Ok(ScalarField::from_raw(graph.id(), values))
}

/// Gaussian-derivative gradient with separate normalization of the two
/// half-planes on either side of `v` along each axis.
///
/// Along x, vertices with `w.x >= v.x` and `w.x < v.x` each produce a
/// derivative-weighted mean of `I`; the component is the difference of the
/// two means. A half-plane with no weight (empty or underflowing) falls
/// back to `I(v)`, so constant images give exactly zero everywhere.
pub fn gaussian_derivative_normalized(
    graph: &SpatialGraph,
    u: &ScalarField,
    p: GaussianParams,
) -> Result<VectorField> {
    u.check(graph)?;
    let grid = GridIndex::new(graph.points(), p.cutoff());
    let x = u.values();
    let pts = graph.points();
    let s2 = p.sigma * p.sigma;
    let values = (0..graph.len())
        .into_par_iter()
        .map(|v| {
            // [axis][upper/lower] numerator and denominator.
            let mut num = [[0.0; 2]; 2];
            let mut den = [[0.0; 2]; 2];
            for_each_in_support(graph, &grid, &p, v, |w, dx, dy, r2| {
                let k = p.kernel(r2);
                // dG/dx evaluated at v - w.
                let deriv = [-dx / s2 * k, -dy / s2 * k];
                let upper = [pts[w].x >= pts[v].x, pts[w].y >= pts[v].y];
                for axis in 0..2 {
                    let side = if upper[axis] { 0 } else { 1 };
                    num[axis][side] += x[w] * deriv[axis];
                    den[axis][side] += deriv[axis];
                }
            });
            let mut g = [0.0; 2];
            for axis in 0..2 {
                let upper = if den[axis][0].abs() < WEIGHT_FLOOR { x[v] } else { num[axis][0] / den[axis][0] };
                let lower = if den[axis][1].abs() < WEIGHT_FLOOR { x[v] } else { num[axis][1] / den[axis][1] };
                g[axis] = upper - lower;
            }
            g
        })
        .collect();
    Ok(VectorField::from_raw(graph.id(), values))
}

/// Edge-stopping function `1 / (1 + (m / λ)²)`.
pub fn stopping_function(gradmag: &ScalarField, lambda: f64) -> Result<ScalarField> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(GacError::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(gradmag.map(|m| {
        let q = m / lambda;
        1.0 / (1.0 + q * q)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point2, Rect};
    use crate::graph::{build_rgg, sample_uniform_points};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn star(values: &[f64]) -> (SpatialGraph, ScalarField) {
        let mut pts = vec![Point2::new(0.0, 0.0)];
        for i in 1..values.len() {
            let a = i as f64;
            pts.push(Point2::new(a.cos(), a.sin()));
        }
        let edges: Vec<(usize, usize)> = (1..values.len()).map(|i| (0, i)).collect();
        let g = SpatialGraph::from_edges(pts, &edges).unwrap();
        let u = ScalarField::new(&g, values.to_vec()).unwrap();
        (g, u)
    }

    #[test]
    fn neighborhood_examples() {
        let (g, u) = star(&[0.0, 3.0, 3.0]);
        assert_eq!(filter_average(&g, &u).unwrap()[0], 2.0);
        let (g, u) = star(&[0.0, 1.0, 100.0]);
        assert_eq!(filter_median(&g, &u).unwrap()[0], 1.0);
        let (g, u) = star(&[0.0, 2.0]);
        assert_eq!(filter_median(&g, &u).unwrap()[0], 1.0);
    }

    #[test]
    fn median_helper() {
        assert_eq!(median_in_place(&mut [5.0]), 5.0);
        assert_eq!(median_in_place(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median_in_place(&mut [9.0, -1.0, 3.0]), 3.0);
    }

    #[test]
    fn filters_preserve_constants() {
        let pts = sample_uniform_points(200, Rect::UNIT, 2).unwrap();
        let g = build_rgg(pts, 0.15).unwrap();
        let u = ScalarField::constant(&g, 0.7);
        assert!(filter_median(&g, &u).unwrap().values().iter().all(|&x| x == 0.7));
        assert!(filter_average(&g, &u).unwrap().values().iter().all(|&x| (x - 0.7).abs() < 1e-15));
        let p = GaussianParams::new(0.05).unwrap();
        let n = gaussian_normalized(&g, &u, p).unwrap();
        assert!(n.values().iter().all(|&x| (x - 0.7).abs() < 1e-12));
        let d = gaussian_derivative_normalized(&g, &u, p).unwrap();
        assert!(d.values().iter().all(|x| x[0].abs() < 1e-12 && x[1].abs() < 1e-12));
    }

    #[test]
    fn vector_filter_is_componentwise() {
        let pts = sample_uniform_points(150, Rect::UNIT, 8).unwrap();
        let g = build_rgg(pts, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = VectorField::from_fn(&g, |_| [0.0, 0.0]);
        let f = VectorField::new(&g, f.values().iter().map(|_| [rng.gen(), rng.gen()]).collect()).unwrap();
        for kind in [NeighborhoodFilter::Average, NeighborhoodFilter::Median] {
            let out = filter_vector(&g, &f, kind).unwrap();
            let x = filter_scalar(&g, &f.component(0), kind).unwrap();
            let y = filter_scalar(&g, &f.component(1), kind).unwrap();
            for v in 0..g.len() {
                assert!((out[v][0] - x[v]).abs() <= 1e-15 && (out[v][1] - y[v]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn gaussian_single_vertex() {
        let g = SpatialGraph::from_edges(vec![Point2::new(0.5, 0.5)], &[]).unwrap();
        let u = ScalarField::constant(&g, 2.0);
        let p = GaussianParams::new(0.1).unwrap();
        let out = gaussian_simple(&g, &u, p).unwrap();
        assert!((out[0] - 2.0 / (2.0 * PI * 0.01)).abs() < 1e-9);
    }

    #[test]
    fn gaussian_two_vertices_are_convex_combinations() {
        let pts = vec![Point2::new(0.4, 0.5), Point2::new(0.45, 0.5)];
        let g = SpatialGraph::from_edges(pts, &[(0, 1)]).unwrap();
        let u = ScalarField::new(&g, vec![0.0, 1.0]).unwrap();
        let out = gaussian_normalized(&g, &u, GaussianParams::new(0.05).unwrap()).unwrap();
        assert!(out.values().iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn simple_gaussian_distorts_constants() {
        let pts = sample_uniform_points(1000, Rect::UNIT, 13).unwrap();
        let g = build_rgg(pts, 0.06).unwrap();
        let u = ScalarField::constant(&g, 1.0);
        let out = gaussian_simple(&g, &u, GaussianParams::new(0.02).unwrap()).unwrap();
        let lo = out.values().iter().copied().fold(f64::INFINITY, f64::min);
        let hi = out.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((hi - lo) / hi > 0.01);
    }

    #[test]
    fn stopping_values() {
        let g = SpatialGraph::from_edges(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)], &[]).unwrap();
        let lambda = 0.05;
        let m = ScalarField::new(&g, vec![0.0, lambda, 3.0 * lambda]).unwrap();
        let s = stopping_function(&m, lambda).unwrap();
        assert_eq!(s[0], 1.0);
        assert_eq!(s[1], 0.5);
        assert!((s[2] - 0.1).abs() < 1e-15);
        assert!(stopping_function(&m, 0.0).is_err());
        assert!(stopping_function(&m, -1.0).is_err());
    }

    #[test]
    fn derivative_of_ramp_scales_with_sigma() {
        let g = build_rgg(sample_uniform_points(6000, Rect::UNIT, 21).unwrap(), 0.03).unwrap();
        let u = ScalarField::from_fn(&g, |p| p.x);
        for sigma in [0.01, 0.02, 0.04] {
            let d = gaussian_derivative_normalized(&g, &u, GaussianParams::new(sigma).unwrap()).unwrap();
            let interior: Vec<usize> = (0..g.len())
                .filter(|&v| {
                    let p = g.point(v);
                    p.x.min(p.y).min(1.0 - p.x).min(1.0 - p.y) > 5.0 * sigma
                })
                .collect();
            let mut xs: Vec<f64> = interior.iter().map(|&v| d[v][0]).collect();
            let mut ys: Vec<f64> = interior.iter().map(|&v| d[v][1]).collect();
            xs.sort_by(f64::total_cmp);
            ys.sort_by(f64::total_cmp);
            // Difference of the two half-plane means of a half-normal offset.
            let expect = sigma * (2.0 * PI).sqrt();
            assert!((xs[xs.len() / 2] / expect - 1.0).abs() < 0.15, "sigma {sigma}: {}", xs[xs.len() / 2]);
            assert!(ys[ys.len() / 2].abs() < 0.15 * expect);
        }
    }

    #[test]
    fn derivative_stopping_is_flat_inside_disk() {
        let g = build_rgg(sample_uniform_points(5500, Rect::UNIT, 3).unwrap(), 0.6 * 5500f64.powf(-1.0 / 3.0)).unwrap();
        let c = Point2::new(0.5, 0.5);
        let img = ScalarField::from_fn(&g, |p| if p.dist(c) <= 0.25 { 1.0 } else { 0.0 });
        let d = gaussian_derivative_normalized(&g, &img, GaussianParams::new(0.02).unwrap()).unwrap();
        let s = stopping_function(&d.norms(), 0.05).unwrap();
        let mut inner: Vec<f64> = (0..g.len()).filter(|&v| g.point(v).dist(c) < 0.2).map(|v| s[v]).collect();
        inner.sort_by(f64::total_cmp);
        assert!(inner[inner.len() / 2] >= 0.95);
        let ring = (0..g.len()).filter(|&v| (g.point(v).dist(c) - 0.25).abs() < 0.01);
        assert!(ring.map(|v| s[v]).fold(0.0, f64::max) < 0.5);
    }

    #[test]
    fn params_validation() {
        assert!(GaussianParams::new(0.0).is_err());
        assert!(GaussianParams::with_cutoff(0.1, 1.5).is_err());
        assert_eq!(GaussianParams::new(0.1).unwrap().cutoff(), 0.1 * 4.0);
    }
}
