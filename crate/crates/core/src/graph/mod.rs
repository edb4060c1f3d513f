//! Planar graphs with per-vertex neighbor fans.

mod delaunay;
mod fan;
mod grid;
mod rgg;

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{GacError, Result};
use crate::geometry::Point2;

pub use delaunay::{build_delaunay, delaunay_triangles};
pub use fan::{normalize_angle, FanEntry, NeighborFan};
pub use grid::GridIndex;
pub use rgg::{build_rgg, rgg_radius, sample_uniform_points};

/// Identity tag tying fields to the graph they were created for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GraphId(u64);

static NEXT_GRAPH_ID: AtomicU64 = AtomicU64::new(1);

impl GraphId {
    fn fresh() -> Self {
        GraphId(NEXT_GRAPH_ID.fetch_add(1, Ordering::Relaxed))
    }
}

/// An undirected, unweighted graph whose vertices are points in the plane.
///
/// Construction validates the vertex set (finite, pairwise distinct) and
/// the edge set (in range, no self loops), symmetrizes the adjacency and
/// precomputes one [`NeighborFan`] per vertex. A built graph is immutable.
#[derive(Debug, Clone)]
pub struct SpatialGraph {
    id: GraphId,
    points: Vec<Point2>,
    adjacency: Vec<Vec<usize>>,
    fans: Vec<NeighborFan>,
}

impl PartialEq for SpatialGraph {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.adjacency == other.adjacency
    }
}

impl SpatialGraph {
    /// Builds a graph from vertex positions and an undirected edge list.
    /// Edges may be listed in either direction and more than once.
    pub fn from_edges(points: Vec<Point2>, edges: &[(usize, usize)]) -> Result<Self> {
        check_points(&points)?;
        let n = points.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(GacError::InvalidEdge { src: a, dst: b, vertices: n });
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::assemble(points, adjacency))
    }

    // Adjacency must already be symmetric, sorted and loop-free.
    fn assemble(points: Vec<Point2>, adjacency: Vec<Vec<usize>>) -> Self {
        let fans = (0..points.len())
            .into_par_iter()
            .map(|v| NeighborFan::build(points[v], adjacency[v].iter().map(|&w| (w, points[w]))))
            .collect();
        SpatialGraph { id: GraphId::fresh(), points, adjacency, fans }
    }

    pub fn id(&self) -> GraphId {
        self.id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn point(&self, v: usize) -> Point2 {
        self.points[v]
    }

    /// Neighbors of `v` in ascending index order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn fan(&self, v: usize) -> &NeighborFan {
        &self.fans[v]
    }

    pub fn fans(&self) -> &[NeighborFan] {
        &self.fans
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges with `src < dst`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    /// `true` for vertices without neighbors.
    pub fn isolated_mask(&self) -> Vec<bool> {
        self.adjacency.iter().map(Vec::is_empty).collect()
    }

    /// Connected components of the subgraph induced by the vertices with
    /// `mask[v] == true`. Returns one sorted vertex list per component,
    /// ordered by smallest member.
    pub fn components(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if !mask[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.adjacency[v] {
                    if mask[w] && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

fn check_points(points: &[Point2]) -> Result<()> {
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(GacError::NonFinitePoint(i));
    }
    let key = |p: &Point2| {
        // +0.0 and -0.0 are the same position.
        let x = if p.x == 0.0 { 0.0 } else { p.x };
        let y = if p.y == 0.0 { 0.0 } else { p.y };
        (x.to_bits(), y.to_bits())
    };
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_unstable_by_key(|&i| (key(&points[i]), i));
    for w in order.windows(2) {
        if key(&points[w[0]]) == key(&points[w[1]]) {
            return Err(GacError::DuplicatePoints { first: w[0].min(w[1]), second: w[0].max(w[1]) });
        }
    }
    Ok(())
}
