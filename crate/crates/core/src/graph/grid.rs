use crate::geometry::{Point2, Rect};

/// Uniform bucket grid over a fixed point set, stored in CSR layout.
///
/// Queries visit cells in row-major order and points within a cell in
/// ascending index order, so callers that accumulate over a query get a
/// schedule-independent summation order.
#[derive(Debug, Clone)]
pub struct GridIndex {
    bounds: Rect,
    cell: f64,
    nx: usize,
    ny: usize,
    cell_start: Vec<usize>,
    items: Vec<usize>,
}

// Caps memory when the requested cell size is tiny compared to the extent.
const MAX_CELLS_PER_POINT: usize = 4;

impl GridIndex {
    pub fn new(points: &[Point2], cell: f64) -> Self {
        let bounds = Rect::bounding(points).unwrap_or(Rect::UNIT);
        let extent = bounds.width().max(bounds.height());
        let max_cells = (MAX_CELLS_PER_POINT * points.len().max(1)) as f64;
        let mut cell = if cell.is_finite() && cell > 0.0 { cell } else { extent.max(1.0) };
        let min_cell = extent / max_cells.sqrt();
        if cell < min_cell {
            cell = min_cell;
        }
        if cell <= 0.0 {
            cell = 1.0;
        }
        let nx = ((bounds.width() / cell).floor() as usize + 1).max(1);
        let ny = ((bounds.height() / cell).floor() as usize + 1).max(1);

        let mut index = GridIndex {
            bounds,
            cell,
            nx,
            ny,
            cell_start: vec![0; nx * ny + 1],
            items: vec![0; points.len()],
        };
        let cells: Vec<usize> = points.iter().map(|&p| index.cell_id(p)).collect();
        for &c in &cells {
            index.cell_start[c + 1] += 1;
        }
        for c in 0..nx * ny {
            index.cell_start[c + 1] += index.cell_start[c];
        }
        let mut fill = index.cell_start.clone();
        for (i, &c) in cells.iter().enumerate() {
            index.items[fill[c]] = i;
            fill[c] += 1;
        }
        index
    }

    fn coord(&self, v: f64, origin: f64, n: usize) -> usize {
        let c = ((v - origin) / self.cell).floor();
        if c <= 0.0 {
            0
        } else {
            (c as usize).min(n - 1)
        }
    }

    fn cell_id(&self, p: Point2) -> usize {
        self.coord(p.y, self.bounds.y0, self.ny) * self.nx + self.coord(p.x, self.bounds.x0, self.nx)
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    /// Calls `f(j)` for every indexed point `j` whose cell overlaps the
    /// square of half-width `r` around `p`. Callers filter by exact distance.
    pub fn for_each_candidate(&self, p: Point2, r: f64, mut f: impl FnMut(usize)) {
        let x0 = self.coord(p.x - r, self.bounds.x0, self.nx);
        let x1 = self.coord(p.x + r, self.bounds.x0, self.nx);
        let y0 = self.coord(p.y - r, self.bounds.y0, self.ny);
        let y1 = self.coord(p.y + r, self.bounds.y0, self.ny);
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                let c = cy * self.nx + cx;
                for &j in &self.items[self.cell_start[c]..self.cell_start[c + 1]] {
                    f(j);
                }
            }
        }
    }

    /// Nearest indexed point to `p` by Euclidean distance, ties broken by
    /// the smaller index. `None` when the index is empty.
    pub fn nearest(&self, points: &[Point2], p: Point2) -> Option<(usize, f64)> {
        if self.items.is_empty() {
            return None;
        }
        let cx = self.coord(p.x, self.bounds.x0, self.nx) as isize;
        let cy = self.coord(p.y, self.bounds.y0, self.ny) as isize;
        let mut best: Option<(usize, f64)> = None;
        let max_ring = self.nx.max(self.ny) as isize;
        for ring in 0..=max_ring {
            for gy in (cy - ring)..=(cy + ring) {
                if gy < 0 || gy >= self.ny as isize {
                    continue;
                }
                for gx in (cx - ring)..=(cx + ring) {
                    if gx < 0 || gx >= self.nx as isize {
                        continue;
                    }
                    let on_ring = (gy - cy).abs() == ring || (gx - cx).abs() == ring;
                    if !on_ring {
                        continue;
                    }
                    let c = gy as usize * self.nx + gx as usize;
                    for &j in &self.items[self.cell_start[c]..self.cell_start[c + 1]] {
                        let d = p.dist(points[j]);
                        let better = match best {
                            None => true,
                            Some((bj, bd)) => d < bd || (d == bd && j < bj),
                        };
                        if better {
                            best = Some((j, d));
                        }
                    }
                }
            }
            // Any point in ring k+1 or beyond is at least k*cell away from p
            // (p may sit anywhere inside its own cell).
            if let Some((_, bd)) = best {
                if bd < ring as f64 * self.cell {
                    break;
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_matches_scan() {
        let pts: Vec<Point2> = (0..97)
            .map(|i| {
                let t = i as f64;
                Point2::new((t * 0.618_034).fract(), (t * 0.414_213_5).fract())
            })
            .collect();
        let grid = GridIndex::new(&pts, 0.07);
        for k in 0..50 {
            let q = Point2::new((k as f64 * 0.377).fract() * 1.4 - 0.2, (k as f64 * 0.713).fract());
            let (j, d) = grid.nearest(&pts, q).unwrap();
            let (bj, bd) = pts
                .iter()
                .enumerate()
                .map(|(i, &p)| (i, q.dist(p)))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                .unwrap();
            assert_eq!((j, d), (bj, bd));
        }
    }
}
