use std::f64::consts::{PI, TAU};

use crate::geometry::Point2;

/// One neighbor `w` of a vertex `v` as seen from `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanEntry {
    /// Index of the neighbor in the graph.
    pub neighbor: usize,
    /// Direction of the edge `v -> w`, in `[0, 2π)`.
    pub phi: f64,
    /// Euclidean length of the edge, always positive.
    pub dist: f64,
    /// Unit vector along `v -> w`.
    pub dir: [f64; 2],
    /// Angular span of the circle around `v` assigned to this neighbor.
    pub delta_phi: f64,
    /// Start angle of that span (the bisector with the previous neighbor).
    pub omega: f64,
}

/// The neighbors of one vertex sorted by edge direction, with the
/// bisector-based partition of the circle around the vertex.
///
/// Span `i` covers `[omega_i, omega_i + delta_phi_i]`; consecutive spans
/// meet (`omega_{i+1} = omega_i + delta_phi_i` modulo 2π) and the spans add
/// up to a full turn.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NeighborFan {
    entries: Vec<FanEntry>,
}

impl NeighborFan {
    /// Builds the fan of `center` over the given `(index, position)` pairs.
    pub fn build(center: Point2, neighbors: impl IntoIterator<Item = (usize, Point2)>) -> Self {
        let entries = neighbors
            .into_iter()
            .map(|(neighbor, p)| {
                let dx = p.x - center.x;
                let dy = p.y - center.y;
                let dist = (dx * dx + dy * dy).sqrt();
                FanEntry {
                    neighbor,
                    phi: normalize_angle(dy.atan2(dx)),
                    dist,
                    dir: [dx / dist, dy / dist],
                    delta_phi: 0.0,
                    omega: 0.0,
                }
            })
            .collect();
        Self::from_entries(entries)
    }

    /// Builds a fan from `(index, angle, distance)` triples. Used for
    /// synthetic fans that are not attached to a graph.
    pub fn from_polar(neighbors: impl IntoIterator<Item = (usize, f64, f64)>) -> Self {
        let entries = neighbors
            .into_iter()
            .map(|(neighbor, phi, dist)| {
                let phi = normalize_angle(phi);
                FanEntry {
                    neighbor,
                    phi,
                    dist,
                    dir: [phi.cos(), phi.sin()],
                    delta_phi: 0.0,
                    omega: 0.0,
                }
            })
            .collect();
        Self::from_entries(entries)
    }

    fn from_entries(mut entries: Vec<FanEntry>) -> Self {
        entries.sort_by(|a, b| {
            a.phi
                .total_cmp(&b.phi)
                .then(a.dist.total_cmp(&b.dist))
                .then(a.neighbor.cmp(&b.neighbor))
        });
        assign_spans(&mut entries);
        NeighborFan { entries }
    }

    pub fn entries(&self) -> &[FanEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FanEntry> {
        self.entries.iter()
    }

    /// Area of the union of circular sectors, one per neighbor, with radius
    /// equal to the edge length and opening angle equal to the span.
    pub fn sector_area(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| 0.5 * e.delta_phi * e.dist * e.dist)
            .sum()
    }
}

impl<'a> IntoIterator for &'a NeighborFan {
    type Item = &'a FanEntry;
    type IntoIter = std::slice::Iter<'a, FanEntry>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Maps an angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

// Spans are computed over the distinct directions. Within a group of equal
// directions the nearest neighbor takes the whole span and the others get a
// zero-width span at its end, which keeps the circle tiling intact.
fn assign_spans(entries: &mut [FanEntry]) {
    if entries.is_empty() {
        return;
    }
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=entries.len() {
        if i == entries.len() || entries[i].phi != entries[start].phi {
            groups.push((start, i));
            start = i;
        }
    }
    let m = groups.len();
    for (k, &(lo, hi)) in groups.iter().enumerate() {
        let phi = entries[lo].phi;
        let prev = if k == 0 {
            entries[groups[m - 1].0].phi - TAU
        } else {
            entries[groups[k - 1].0].phi
        };
        let next = if k + 1 == m {
            entries[groups[0].0].phi + TAU
        } else {
            entries[groups[k + 1].0].phi
        };
        let omega = 0.5 * (phi + prev);
        let delta = 0.5 * (next - prev);
        entries[lo].omega = omega;
        entries[lo].delta_phi = delta;
        for e in &mut entries[lo + 1..hi] {
            e.omega = omega + delta;
            e.delta_phi = 0.0;
        }
    }
    debug_assert!(entries.len() != 1 || (entries[0].delta_phi - TAU).abs() < 1e-12);
    debug_assert!(entries.len() != 1 || (entries[0].omega - (entries[0].phi - PI)).abs() < 1e-12);
}
