//! Gradient and curvature estimates on spatial graphs.
//!
//! Every operator works vertex by vertex from the vertex's [`NeighborFan`];
//! isolated vertices always get a zero result.
//!
//! [`NeighborFan`]: crate::graph::NeighborFan

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::Result;
use crate::field::{ScalarField, VectorField};
use crate::graph::SpatialGraph;

/// Norm floor below which a vector is treated as zero.
pub const NORM_EPS: f64 = 1e-12;

fn per_vertex<T: Send>(graph: &SpatialGraph, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..graph.len()).into_par_iter().map(f).collect()
}

/// Angle-weighted gradient: each edge's difference quotient points along
/// the edge and is weighted by the span of directions the neighbor covers,
/// then the sum is divided by π.
pub fn gradient_geometric(graph: &SpatialGraph, u: &ScalarField) -> Result<VectorField> {
    u.check(graph)?;
    let u = u.values();
    let values = per_vertex(graph, |v| {
        let mut g = [0.0, 0.0];
        for e in graph.fan(v) {
            let q = (u[e.neighbor] - u[v]) / e.dist * e.delta_phi;
            g[0] += q * e.dir[0];
            g[1] += q * e.dir[1];
        }
        [g[0] / PI, g[1] / PI]
    });
    Ok(VectorField::from_raw(graph.id(), values))
}

/// Plain average of the edge difference-quotient vectors.
pub fn gradient_weighted_sum(graph: &SpatialGraph, u: &ScalarField) -> Result<VectorField> {
    u.check(graph)?;
    let u = u.values();
    let values = per_vertex(graph, |v| {
        let fan = graph.fan(v);
        if fan.is_empty() {
            return [0.0, 0.0];
        }
        let mut g = [0.0, 0.0];
        for e in fan {
            let q = (u[e.neighbor] - u[v]) / e.dist;
            g[0] += q * e.dir[0];
            g[1] += q * e.dir[1];
        }
        let n = fan.len() as f64;
        [g[0] / n, g[1] / n]
    });
    Ok(VectorField::from_raw(graph.id(), values))
}

/// Gradient magnitude as the largest absolute difference along an edge.
pub fn gradient_magnitude_maxdiff(graph: &SpatialGraph, u: &ScalarField) -> Result<ScalarField> {
    u.check(graph)?;
    let u = u.values();
    let values = per_vertex(graph, |v| {
        graph.neighbors(v).iter().map(|&w| (u[w] - u[v]).abs()).fold(0.0, f64::max)
    });
    Ok(ScalarField::from_raw(graph.id(), values))
}

/// One-sided edge differences `(ascent, descent)`: the largest rise
/// `max(u(w) - u(v), 0)` and the largest drop `max(u(v) - u(w), 0)` over the
/// neighbors of each vertex. Their maximum is the max-difference magnitude.
pub fn gradient_magnitude_one_sided(graph: &SpatialGraph, u: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    u.check(graph)?;
    let u = u.values();
    let pairs = per_vertex(graph, |v| {
        graph.neighbors(v).iter().fold((0.0, 0.0), |(up, down): (f64, f64), &w| {
            let d = u[w] - u[v];
            (up.max(d), down.max(-d))
        })
    });
    let (up, down): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok((ScalarField::from_raw(graph.id(), up), ScalarField::from_raw(graph.id(), down)))
}

/// Normalizes every vector, mapping vectors with norm `<= eps` to zero.
pub fn unit_field(g: &VectorField, eps: f64) -> VectorField {
    let values = g.values().iter().map(|&x| normalize_or_zero(x, eps)).collect();
    VectorField::from_raw(g.graph_id(), values)
}

fn normalize_or_zero(x: [f64; 2], eps: f64) -> [f64; 2] {
    let n = x[0].hypot(x[1]);
    if n > eps {
        [x[0] / n, x[1] / n]
    } else {
        [0.0, 0.0]
    }
}

/// Vertices where the unit field vanishes. Curvature is reported as zero
/// there since the level-set normal is undefined.
pub fn zero_gradient_mask(f: &VectorField) -> Vec<bool> {
    f.values().iter().map(|x| x[0] == 0.0 && x[1] == 0.0).collect()
}

/// Divergence of `F` as boundary flux over area, where the region around
/// `v` is the union of one circular sector per neighbor.
///
/// Along the arc of neighbor `w_i` the field is taken to be `F(w_i)`; along
/// the radial segment joining the arcs of `w_i` and `w_{i+1}` (cyclically)
/// it is the normalized mean of the two, or the plain mean when the two
/// nearly cancel.
pub fn curvature_geometric(graph: &SpatialGraph, f: &VectorField) -> Result<ScalarField> {
    f.check(graph)?;
    let fv = f.values();
    let values = per_vertex(graph, |v| {
        let fan = graph.fan(v).entries();
        let n = fan.len();
        if n == 0 || fv[v] == [0.0, 0.0] {
            return 0.0;
        }
        let mut flux = 0.0;
        for i in 0..n {
            let cur = &fan[i];
            let next = &fan[(i + 1) % n];
            let (s0, c0) = cur.omega.sin_cos();
            let (s1, c1) = next.omega.sin_cos();
            let fi = fv[cur.neighbor];
            let fj = fv[next.neighbor];
            flux += cur.dist * (fi[0] * (s1 - s0) + fi[1] * (c0 - c1));
            let m = segment_value(fi, fj);
            flux += (next.dist - cur.dist) * (m[0] * s1 - m[1] * c1);
        }
        flux / graph.fan(v).sector_area()
    });
    Ok(ScalarField::from_raw(graph.id(), values))
}

fn segment_value(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let s = [a[0] + b[0], a[1] + b[1]];
    let n = s[0].hypot(s[1]);
    if n < NORM_EPS {
        [0.5 * s[0], 0.5 * s[1]]
    } else {
        [s[0] / n, s[1] / n]
    }
}

/// Divergence of `F` from a second application of the geometric gradient:
/// the x-derivative of the first component plus the y-derivative of the
/// second.
pub fn curvature_gradient_based(graph: &SpatialGraph, f: &VectorField) -> Result<ScalarField> {
    f.check(graph)?;
    let fv = f.values();
    let values = per_vertex(graph, |v| {
        if fv[v] == [0.0, 0.0] {
            return 0.0;
        }
        let mut dx = 0.0;
        let mut dy = 0.0;
        for e in graph.fan(v) {
            let w = fv[e.neighbor];
            dx += (w[0] - fv[v][0]) / e.dist * e.delta_phi * e.dir[0];
            dy += (w[1] - fv[v][1]) / e.dist * e.delta_phi * e.dir[1];
        }
        dx / PI + dy / PI
    });
    Ok(ScalarField::from_raw(graph.id(), values))
}
