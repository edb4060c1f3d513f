//! Synthetic segmentation benchmarks: binary disks sampled on random
//! geometric graphs in the unit square.

use crate::engine::{GacConfig, SeedRegion};
use crate::error::Result;
use crate::field::ScalarField;
use crate::geometry::{Point2, Rect};
use crate::graph::{build_rgg, rgg_radius, sample_uniform_points, SpatialGraph};

/// A graph, a binary intensity made of disks, the true membership of each
/// disk, an initial contour enclosing all of them and run parameters.
#[derive(Debug, Clone)]
pub struct DiskFixture {
    pub graph: SpatialGraph,
    pub disks: Vec<(Point2, f64)>,
    pub intensity: ScalarField,
    pub seed_region: SeedRegion,
    pub config: GacConfig,
}

impl DiskFixture {
    /// Builds an RGG with `n` vertices and radius `radius_const * n^(-1/3)`;
    /// vertices inside any disk get intensity 1, the rest 0.
    pub fn new(
        n: usize,
        radius_const: f64,
        seed: u64,
        disks: Vec<(Point2, f64)>,
        seed_region: SeedRegion,
        config: GacConfig,
    ) -> Result<Self> {
        let graph = build_rgg(sample_uniform_points(n, Rect::UNIT, seed)?, rgg_radius(n, radius_const))?;
        let intensity =
            ScalarField::from_fn(&graph, |p| if disks.iter().any(|&(c, r)| p.dist(c) <= r) { 1.0 } else { 0.0 });
        Ok(DiskFixture { graph, disks, intensity, seed_region, config })
    }

    /// One centered disk of radius 0.25 on 5500 vertices with `C = 0.6` and
    /// default parameters, started from a circle of radius 0.45.
    pub fn disk(seed: u64) -> Result<Self> {
        Self::new(
            5500,
            0.6,
            seed,
            vec![(Point2::new(0.5, 0.5), 0.25)],
            SeedRegion::Circle { cx: 0.5, cy: 0.5, r: 0.45 },
            GacConfig::default(),
        )
    }

    /// Two disks of radius 0.15 centered at `(0.3, 0.5)` and `(0.7, 0.5)` on
    /// 5500 vertices with `C = 0.45`, `σ = 0.005`, `λ = 0.1` and `c = 40`,
    /// started from a rectangle 0.03 outside their bounding box.
    pub fn two_disks(seed: u64) -> Result<Self> {
        Self::new(
            5500,
            0.45,
            seed,
            vec![(Point2::new(0.3, 0.5), 0.15), (Point2::new(0.7, 0.5), 0.15)],
            SeedRegion::Rect { x0: 0.12, y0: 0.32, x1: 0.88, y1: 0.68 },
            GacConfig { sigma: 0.005, lambda: 0.1, c: 40.0, ..GacConfig::default() },
        )
    }

    /// Membership of each vertex in disk `k`.
    pub fn disk_mask(&self, k: usize) -> Vec<bool> {
        let (c, r) = self.disks[k];
        self.graph.points().iter().map(|p| p.dist(c) <= r).collect()
    }

    /// Membership in the union of all disks.
    pub fn truth(&self) -> Vec<bool> {
        self.intensity.values().iter().map(|&x| x > 0.5).collect()
    }

    pub fn initial_inside(&self) -> Result<Vec<bool>> {
        self.seed_region.membership(&self.graph)
    }
}
