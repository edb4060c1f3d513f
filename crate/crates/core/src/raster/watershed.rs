use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use super::{LabelMap, RasterImage};

const LINE: u32 = 0;
const UNSET: u32 = u32::MAX;

fn neighbors8(i: usize, w: usize, h: usize) -> impl Iterator<Item = usize> {
    let (x, y) = ((i % w) as isize, (i / w) as isize);
    (-1isize..=1)
        .flat_map(move |dy| (-1isize..=1).map(move |dx| (dx, dy)))
        .filter(|&(dx, dy)| dx != 0 || dy != 0)
        .filter_map(move |(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            (nx >= 0 && ny >= 0 && nx < w as isize && ny < h as isize).then(|| ny as usize * w + nx as usize)
        })
}

#[derive(Debug, PartialEq)]
struct Key(f64, u64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Labels each 8-connected plateau that has no strictly lower neighbor,
/// numbering from 1 in scan order of each plateau's first pixel.
fn regional_minima(img: &RasterImage) -> Vec<u32> {
    let (w, h) = (img.width(), img.height());
    let p = img.pixels();
    let mut labels = vec![UNSET; w * h];
    let mut seen = vec![false; w * h];
    let mut next = 1u32;
    let mut plateau = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if seen[start] {
            continue;
        }
        plateau.clear();
        let mut is_min = true;
        seen[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            plateau.push(i);
            for j in neighbors8(i, w, h) {
                if p[j] < p[i] {
                    is_min = false;
                } else if p[j] == p[i] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if is_min {
            for &i in &plateau {
                labels[i] = next;
            }
            next += 1;
        }
    }
    labels
}

/// Priority-flood watershed of a gradient-magnitude image.
///
/// Regional minima (plateaus merged, 8-connectivity) seed the basins.
/// Pixels are flooded in order of value with FIFO tie-breaking; a pixel
/// reached by two different basins becomes a line pixel (label 0).
pub fn watershed_segments(gradmag: &RasterImage) -> LabelMap {
    let (w, h) = (gradmag.width(), gradmag.height());
    let p = gradmag.pixels();
    let mut labels = regional_minima(gradmag);
    let mut queued: Vec<bool> = labels.iter().map(|&l| l != UNSET).collect();
    let mut heap = BinaryHeap::new();
    let mut counter = 0u64;
    for i in 0..w * h {
        if labels[i] == UNSET {
            continue;
        }
        for j in neighbors8(i, w, h) {
            if !queued[j] {
                queued[j] = true;
                heap.push(Reverse(Key(p[j], counter, j)));
                counter += 1;
            }
        }
    }
    while let Some(Reverse(Key(_, _, i))) = heap.pop() {
        let mut basin = UNSET;
        let mut conflict = false;
        for j in neighbors8(i, w, h) {
            let l = labels[j];
            if l == UNSET || l == LINE {
                continue;
            }
            if basin == UNSET {
                basin = l;
            } else if basin != l {
                conflict = true;
            }
        }
        if conflict || basin == UNSET {
            labels[i] = LINE;
            continue;
        }
        labels[i] = basin;
        for j in neighbors8(i, w, h) {
            if !queued[j] {
                queued[j] = true;
                heap.push(Reverse(Key(p[j], counter, j)));
                counter += 1;
            }
        }
    }
    // Pixels enclosed entirely by lines are never reached.
    for l in &mut labels {
        if *l == UNSET {
            *l = LINE;
        }
    }
    LabelMap { width: w, height: h, labels }
}

/// Hands every line pixel to the adjacent basin whose pixel has the lowest
/// gradient value (ties to the smaller label), repeating until the basins
/// tile the image.
pub fn assign_watershed_lines(labels: &LabelMap, gradmag: &RasterImage) -> LabelMap {
    let (w, h) = (labels.width, labels.height);
    let p = gradmag.pixels();
    let mut cur = labels.labels.clone();
    if cur.iter().all(|&l| l == LINE) {
        return labels.clone();
    }
    loop {
        let prev = cur.clone();
        let mut changed = false;
        for i in 0..w * h {
            if prev[i] != LINE {
                continue;
            }
            let best = neighbors8(i, w, h)
                .filter(|&j| prev[j] != LINE)
                .min_by(|&a, &b| p[a].total_cmp(&p[b]).then(prev[a].cmp(&prev[b])));
            if let Some(j) = best {
                cur[i] = prev[j];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    LabelMap { width: w, height: h, labels: cur }
}
