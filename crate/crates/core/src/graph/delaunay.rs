//! Incremental Bowyer-Watson Delaunay triangulation.
//!
//! The bounding super-triangle is symbolic: a single ghost vertex at
//! infinity closes every hull edge into a ghost triangle, so no super
//! vertices have to be removed afterwards and the hull is never eroded.
//! Orientation and in-circle tests use exact adaptive predicates.

use std::collections::HashMap;

use robust::{incircle, orient2d, Coord};

use super::{check_points, SpatialGraph};
use crate::error::{GacError, Result};
use crate::geometry::{Point2, Rect};

const GHOST: usize = usize::MAX;
const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Tri {
    v: [usize; 3],
    // n[i] is the triangle across the edge (v[i+1], v[i+2]).
    n: [usize; 3],
}

impl Tri {
    fn ghost_slot(&self) -> Option<usize> {
        self.v.iter().position(|&x| x == GHOST)
    }

    fn edge(&self, i: usize) -> (usize, usize) {
        (self.v[(i + 1) % 3], self.v[(i + 2) % 3])
    }
}

struct Builder<'a> {
    pts: &'a [Point2],
    tris: Vec<Tri>,
    alive: Vec<bool>,
    free: Vec<usize>,
    last: usize,
    stamp: Vec<u32>,
    epoch: u32,
}

fn coord(p: Point2) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

impl<'a> Builder<'a> {
    fn orient(&self, a: usize, b: usize, p: Point2) -> f64 {
        orient2d(coord(self.pts[a]), coord(self.pts[b]), coord(p))
    }

    fn in_conflict(&self, t: usize, p: Point2) -> bool {
        let tri = &self.tris[t];
        match tri.ghost_slot() {
            None => {
                let [a, b, c] = tri.v;
                incircle(coord(self.pts[a]), coord(self.pts[b]), coord(self.pts[c]), coord(p)) > 0.0
            }
            Some(g) => {
                let (a, b) = tri.edge(g);
                let o = self.orient(a, b, p);
                if o > 0.0 {
                    return true;
                }
                if o < 0.0 {
                    return false;
                }
                let (pa, pb) = (self.pts[a], self.pts[b]);
                let along_a = (p.x - pa.x) * (pb.x - pa.x) + (p.y - pa.y) * (pb.y - pa.y);
                let along_b = (p.x - pb.x) * (pa.x - pb.x) + (p.y - pb.y) * (pa.y - pb.y);
                along_a > 0.0 && along_b > 0.0
            }
        }
    }

    fn push(&mut self, tri: Tri) -> usize {
        if let Some(t) = self.free.pop() {
            self.tris[t] = tri;
            self.alive[t] = true;
            t
        } else {
            self.tris.push(tri);
            self.alive.push(true);
            self.stamp.push(0);
            self.tris.len() - 1
        }
    }

    fn init(&mut self, a: usize, b: usize, c: usize) {
        let t = self.push(Tri { v: [a, b, c], n: [NONE; 3] });
        // Ghost across edge opposite vertex i of t.
        for i in 0..3 {
            let (x, y) = self.tris[t].edge(i);
            let g = self.push(Tri { v: [y, x, GHOST], n: [NONE, NONE, t] });
            self.tris[t].n[i] = g;
        }
        // Ghosts are (y, x, G); link them around the ghost vertex.
        let ghosts: Vec<usize> = self.tris[t].n.to_vec();
        for &g in &ghosts {
            let [y, x, _] = self.tris[g].v;
            for &h in &ghosts {
                if h == g {
                    continue;
                }
                let [hy, hx, _] = self.tris[h].v;
                // g's edge (x, G) opposite y is shared with h's edge (G, x) opposite hx.
                if hy == x {
                    self.tris[g].n[0] = h;
                }
                // g's edge (G, y) opposite x is shared with h's edge (hx, G), hx == y.
                if hx == y {
                    self.tris[g].n[1] = h;
                }
            }
        }
        self.last = t;
    }

    fn locate(&self, p: Point2) -> usize {
        let mut t = self.last;
        if let Some(g) = self.tris[t].ghost_slot() {
            t = self.tris[t].n[g];
        }
        let max_steps = 4 * self.tris.len() + 16;
        for step in 0..max_steps {
            if self.tris[t].ghost_slot().is_some() {
                return t;
            }
            let mut moved = false;
            for k in 0..3 {
                let i = (k + step) % 3;
                let (a, b) = self.tris[t].edge(i);
                if self.orient(a, b, p) < 0.0 {
                    t = self.tris[t].n[i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return t;
            }
        }
        (0..self.tris.len())
            .find(|&t| self.alive[t] && self.in_conflict(t, p))
            .expect("some triangle conflicts with every new point")
    }

    fn insert(&mut self, pi: usize) {
        let p = self.pts[pi];
        let seed = self.locate(p);
        self.epoch += 1;
        let epoch = self.epoch;

        let mut cavity = vec![seed];
        self.stamp[seed] = epoch;
        let mut k = 0;
        while k < cavity.len() {
            let t = cavity[k];
            k += 1;
            for i in 0..3 {
                let nb = self.tris[t].n[i];
                if self.stamp[nb] != epoch && self.in_conflict(nb, p) {
                    self.stamp[nb] = epoch;
                    cavity.push(nb);
                }
            }
        }

        let mut boundary = Vec::new();
        for &t in &cavity {
            for i in 0..3 {
                let nb = self.tris[t].n[i];
                if self.stamp[nb] != epoch {
                    let (u, w) = self.tris[t].edge(i);
                    boundary.push((u, w, nb));
                }
            }
        }
        for &t in &cavity {
            self.alive[t] = false;
            self.free.push(t);
        }

        let mut by_first = HashMap::with_capacity(boundary.len());
        let mut by_second = HashMap::with_capacity(boundary.len());
        let mut created = Vec::with_capacity(boundary.len());
        for &(u, w, outside) in &boundary {
            let t = self.push(Tri { v: [u, w, pi], n: [NONE, NONE, outside] });
            self.stamp[t] = 0;
            let o = &mut self.tris[outside];
            let j = (0..3)
                .find(|&j| o.edge(j) == (w, u))
                .expect("cavity boundary edge is shared with its outer triangle");
            o.n[j] = t;
            by_first.insert(u, t);
            by_second.insert(w, t);
            created.push(t);
        }
        for &t in &created {
            let [u, w, _] = self.tris[t].v;
            self.tris[t].n[0] = by_first[&w];
            self.tris[t].n[1] = by_second[&u];
        }
        if let Some(&t) = created.iter().find(|&&t| self.tris[t].ghost_slot().is_none()) {
            self.last = t;
        }
    }
}

// Row-by-row snake order over a coarse grid keeps consecutive insertions
// close together, which keeps the walk in `locate` short.
fn insertion_order(points: &[Point2]) -> Vec<usize> {
    let n = points.len();
    let bounds = Rect::bounding(points).unwrap_or(Rect::UNIT);
    let k = ((n as f64 / 2.0).sqrt().ceil() as usize).max(1);
    let cell = |v: f64, lo: f64, extent: f64| {
        if extent > 0.0 {
            (((v - lo) / extent * k as f64) as usize).min(k - 1)
        } else {
            0
        }
    };
    let mut keyed: Vec<(usize, usize, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let row = cell(p.y, bounds.y0, bounds.height());
            let col = cell(p.x, bounds.x0, bounds.width());
            let col = if row % 2 == 1 { k - 1 - col } else { col };
            (row, col, i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, _, i)| i).collect()
}

/// Delaunay triangles as counter-clockwise vertex triples.
pub fn delaunay_triangles(points: &[Point2]) -> Result<Vec<[usize; 3]>> {
    check_points(points)?;
    if points.len() < 3 {
        return Err(GacError::DegenerateInput(format!(
            "Delaunay triangulation needs at least 3 points, got {}",
            points.len()
        )));
    }
    let order = insertion_order(points);
    let (a, b) = (order[0], order[1]);
    let pos = order[2..]
        .iter()
        .position(|&c| orient2d(coord(points[a]), coord(points[b]), coord(points[c])) != 0.0)
        .ok_or_else(|| GacError::DegenerateInput("all points are collinear".into()))?;
    let c = order[2 + pos];

    let mut builder = Builder {
        pts: points,
        tris: Vec::with_capacity(2 * points.len() + 8),
        alive: Vec::new(),
        free: Vec::new(),
        last: 0,
        stamp: Vec::new(),
        epoch: 0,
    };
    if orient2d(coord(points[a]), coord(points[b]), coord(points[c])) > 0.0 {
        builder.init(a, b, c);
    } else {
        builder.init(b, a, c);
    }
    for &i in &order[2..] {
        if i != c {
            builder.insert(i);
        }
    }

    let mut out: Vec<[usize; 3]> = builder
        .tris
        .iter()
        .zip(&builder.alive)
        .filter(|(t, &alive)| alive && t.ghost_slot().is_none())
        .map(|(t, _)| {
            // Rotate so the smallest index comes first; keeps orientation.
            let m = (0..3).min_by_key(|&i| t.v[i]).unwrap_or(0);
            [t.v[m], t.v[(m + 1) % 3], t.v[(m + 2) % 3]]
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Graph of the Delaunay triangulation's edges.
pub fn build_delaunay(points: Vec<Point2>) -> Result<SpatialGraph> {
    let tris = delaunay_triangles(&points)?;
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for t in &tris {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    Ok(SpatialGraph::assemble(points, adjacency))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_uniform_points;

    fn circumcircle_violations(points: &[Point2], tris: &[[usize; 3]]) -> usize {
        let mut bad = 0;
        for t in tris {
            let (a, b, c) = (points[t[0]], points[t[1]], points[t[2]]);
            let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
            let sa = a.x * a.x + a.y * a.y;
            let sb = b.x * b.x + b.y * b.y;
            let sc = c.x * c.x + c.y * c.y;
            let ux = (sa * (b.y - c.y) + sb * (c.y - a.y) + sc * (a.y - b.y)) / d;
            let uy = (sa * (c.x - b.x) + sb * (a.x - c.x) + sc * (b.x - a.x)) / d;
            let center = Point2::new(ux, uy);
            let r = center.dist(a);
            for (i, p) in points.iter().enumerate() {
                if t.contains(&i) {
                    continue;
                }
                if center.dist(*p) < r - 1e-12 {
                    bad += 1;
                }
            }
        }
        bad
    }

    #[test]
    fn triangle_and_square() {
        let tri = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.3, 0.8)];
        assert_eq!(build_delaunay(tri).unwrap().edge_count(), 3);
        let sq = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let g = build_delaunay(sq).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert_eq!(g.fan(0).len() + g.fan(2).len() + g.fan(1).len() + g.fan(3).len(), 10);
    }

    #[test]
    fn degenerate_inputs() {
        let line: Vec<Point2> = (0..5).map(|i| Point2::new(i as f64, 2.0 * i as f64)).collect();
        assert!(matches!(build_delaunay(line), Err(GacError::DegenerateInput(_))));
        let two = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)];
        assert!(matches!(build_delaunay(two), Err(GacError::DegenerateInput(_))));
    }

    #[test]
    fn random_points_have_empty_circumcircles() {
        for seed in 0..5 {
            let pts = sample_uniform_points(50, Rect::UNIT, seed).unwrap();
            let tris = delaunay_triangles(&pts).unwrap();
            assert_eq!(circumcircle_violations(&pts, &tris), 0);
        }
    }

    // A triangulation of n points with h on the hull has 2n - 2 - h
    // triangles; collinear hull points count towards h.
    #[test]
    fn grid_points_triangulate_completely() {
        let mut pts = Vec::new();
        for i in 0..7 {
            for j in 0..6 {
                pts.push(Point2::new(i as f64 * 0.1, j as f64 * 0.1));
            }
        }
        let tris = delaunay_triangles(&pts).unwrap();
        let n = pts.len();
        let h = 2 * (7 + 6) - 4;
        assert_eq!(tris.len(), 2 * n - 2 - h);
        assert_eq!(circumcircle_violations(&pts, &tris), 0);
        let area: f64 = tris
            .iter()
            .map(|t| {
                let (a, b, c) = (pts[t[0]], pts[t[1]], pts[t[2]]);
                0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
            })
            .sum();
        assert!((area - 0.6 * 0.5).abs() < 1e-12);
    }

    #[test]
    fn hull_area_matches_for_random_points() {
        let pts = sample_uniform_points(300, Rect::UNIT, 42).unwrap();
        let tris = delaunay_triangles(&pts).unwrap();
        let area: f64 = tris
            .iter()
            .map(|t| {
                let (a, b, c) = (pts[t[0]], pts[t[1]], pts[t[2]]);
                let s = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
                assert!(s > 0.0);
                s
            })
            .sum();
        assert!((area - convex_hull_area(&pts)).abs() < 1e-12);
    }

    // Monotone chain, used only as an oracle.
    fn convex_hull_area(pts: &[Point2]) -> f64 {
        let mut p: Vec<Point2> = pts.to_vec();
        p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        let cross = |o: Point2, a: Point2, b: Point2| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
        let mut hull: Vec<Point2> = Vec::new();
        for pass in 0..2 {
            let start = hull.len();
            let iter: Box<dyn Iterator<Item = &Point2>> =
                if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
            for &q in iter {
                while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                    hull.pop();
                }
                hull.push(q);
            }
            hull.pop();
        }
        let m = hull.len();
        (0..m)
            .map(|i| {
                let (a, b) = (hull[i], hull[(i + 1) % m]);
                a.x * b.y - b.x * a.y
            })
            .sum::<f64>()
            / 2.0
    }
}
