//! Shared inputs for the benchmarks.

use gac_core::graph::{build_rgg, rgg_radius, sample_uniform_points};
use gac_core::{Rect, ScalarField, SpatialGraph};

/// Random geometric graph on `n` uniform points with radius `0.6 n^(-1/3)`.
pub fn rgg(n: usize, seed: u64) -> SpatialGraph {
    build_rgg(sample_uniform_points(n, Rect::UNIT, seed).expect("n > 0"), rgg_radius(n, 0.6)).expect("valid points")
}

/// Smooth test field with features in both directions.
pub fn wave(graph: &SpatialGraph) -> ScalarField {
    ScalarField::from_fn(graph, |p| (6.0 * p.x).sin() * (4.0 * p.y).cos())
}
