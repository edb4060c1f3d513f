use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_points, GridIndex, SpatialGraph};
use crate::error::{GacError, Result};
use crate::geometry::{Point2, Rect};

/// Draws `n` i.i.d. uniform points over `domain`. The same seed always
/// yields the same list.
pub fn sample_uniform_points(n: usize, domain: Rect, seed: u64) -> Result<Vec<Point2>> {
    if n == 0 {
        return Err(GacError::EmptyInput("point count must be at least 1"));
    }
    if !(domain.area() > 0.0) || !domain.area().is_finite() {
        return Err(GacError::InvalidParameter(format!("domain {domain:?} has no positive area")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let x = domain.x0 + rng.gen::<f64>() * domain.width();
            let y = domain.y0 + rng.gen::<f64>() * domain.height();
            Point2::new(x, y)
        })
        .collect())
}

/// Connection radius `C * n^(-1/3)`, the rate that balances the bias and
/// variance terms of the geometric gradient error.
pub fn rgg_radius(n: usize, c: f64) -> f64 {
    c * (n as f64).powf(-1.0 / 3.0)
}

/// Random geometric graph: `v ~ w` iff `0 < |v - w| <= radius`.
pub fn build_rgg(points: Vec<Point2>, radius: f64) -> Result<SpatialGraph> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(GacError::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    check_points(&points)?;
    let grid = GridIndex::new(&points, radius);
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for (i, &p) in points.iter().enumerate() {
        let list = &mut adjacency[i];
        grid.for_each_candidate(p, radius, |j| {
            if j != i && p.dist(points[j]) <= radius {
                list.push(j);
            }
        });
        list.sort_unstable();
    }
    Ok(SpatialGraph::assemble(points, adjacency))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_values() {
        assert!((rgg_radius(1000, 0.6) - 0.06).abs() < 1e-15);
        assert_eq!(rgg_radius(1, 1.0), 1.0);
        assert!((rgg_radius(5500, 0.45) - 0.45 * 5500f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert!((rgg_radius(5500, 0.45) - 0.025_493_235).abs() < 1e-9);
    }

    #[test]
    fn sampling_contract() {
        let a = sample_uniform_points(4, Rect::UNIT, 7).unwrap();
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|&p| Rect::UNIT.contains(p)));
        assert_eq!(a, sample_uniform_points(4, Rect::UNIT, 7).unwrap());
        assert_ne!(a, sample_uniform_points(4, Rect::UNIT, 8).unwrap());
        assert!(matches!(sample_uniform_points(0, Rect::UNIT, 7), Err(GacError::EmptyInput(_))));
        let flat = Rect::new(0.0, 0.0, 1.0, 0.0);
        assert!(sample_uniform_points(3, flat, 1).is_err());
    }

    #[test]
    fn sampling_mean_is_centered() {
        let pts = sample_uniform_points(10_000, Rect::UNIT, 3).unwrap();
        let mean = pts.iter().map(|p| p.x).sum::<f64>() / pts.len() as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn boundary_distance_is_inclusive() {
        let g = build_rgg(vec![Point2::new(0.0, 0.0), Point2::new(0.5, 0.0)], 0.5).unwrap();
        assert_eq!(g.edge_count(), 1);
        let g = build_rgg(vec![Point2::new(0.0, 0.0), Point2::new(0.5 + 1e-12, 0.0)], 0.5).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn duplicate_points_are_rejected() {
        let pts = vec![Point2::new(0.1, 0.1), Point2::new(0.2, 0.2), Point2::new(0.1, 0.1)];
        assert!(matches!(build_rgg(pts, 0.3), Err(GacError::DuplicatePoints { first: 0, second: 2 })));
    }

    #[test]
    fn matches_all_pairs() {
        let pts = sample_uniform_points(100, Rect::UNIT, 5).unwrap();
        let g = build_rgg(pts.clone(), 0.3).unwrap();
        let mut brute = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pts[i].dist(pts[j]) <= 0.3 {
                    brute.push((i, j));
                }
            }
        }
        assert_eq!(g.edges(), brute);
    }
}
