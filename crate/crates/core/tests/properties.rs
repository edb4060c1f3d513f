use std::f64::consts::TAU;

use gac_core::calculus::{gradient_geometric, unit_field, NORM_EPS};
use gac_core::engine::jaccard;
use gac_core::filters::{filter_average, filter_median, gaussian_normalized};
use gac_core::graph::{build_rgg, sample_uniform_points};
use gac_core::raster::{encode_pgm, parse_pgm, PgmFormat};
use gac_core::validation::relative_error;
use gac_core::{GaussianParams, NeighborFan, RasterImage, Rect, ScalarField, SpatialGraph};
use proptest::prelude::*;

fn graph(n: usize, radius: f64, seed: u64) -> SpatialGraph {
    build_rgg(sample_uniform_points(n, Rect::UNIT, seed).unwrap(), radius).unwrap()
}

fn field(g: &SpatialGraph, values: &[f64]) -> ScalarField {
    ScalarField::new(g, values.iter().cycle().take(g.len()).copied().collect()).unwrap()
}

fn closed_range(g: &SpatialGraph, u: &ScalarField, v: usize) -> (f64, f64) {
    g.neighbors(v).iter().fold((u[v], u[v]), |(lo, hi), &w| (lo.min(u[w]), hi.max(u[w])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fan_spans_tile_circle(polar in prop::collection::vec((0.0..TAU, 0.01f64..1.0), 1..30)) {
        let fan = NeighborFan::from_polar(polar.iter().enumerate().map(|(i, &(a, d))| (i, a, d)));
        let total: f64 = fan.iter().map(|e| e.delta_phi).sum();
        prop_assert!((total - TAU).abs() <= 1e-9);
        let entries = fan.entries();
        for i in 0..entries.len() {
            let next = &entries[(i + 1) % entries.len()];
            let end = entries[i].omega + entries[i].delta_phi;
            let gap = (next.omega - end).rem_euclid(TAU);
            prop_assert!(gap.min(TAU - gap) <= 1e-9);
            prop_assert!(entries[i].delta_phi >= 0.0);
        }
    }

    #[test]
    fn rgg_equals_all_pairs(n in 2usize..150, radius in 0.02f64..0.4, seed in any::<u64>()) {
        let g = graph(n, radius, seed);
        let pts = g.points();
        for v in 0..n {
            let mut expect: Vec<usize> = (0..n).filter(|&w| w != v && pts[v].dist(pts[w]) <= radius).collect();
            let mut got = g.neighbors(v).to_vec();
            expect.sort_unstable();
            got.sort_unstable();
            prop_assert_eq!(got, expect);
        }
        prop_assert_eq!(g.edges(), graph(n, radius, seed).edges());
    }

    #[test]
    fn neighborhood_filters_stay_in_closed_range(
        seed in any::<u64>(),
        values in prop::collection::vec(-5.0f64..5.0, 1..64),
    ) {
        let g = graph(300, 0.1, seed);
        let u = field(&g, &values);
        let avg = filter_average(&g, &u).unwrap();
        let med = filter_median(&g, &u).unwrap();
        for v in 0..g.len() {
            let (lo, hi) = closed_range(&g, &u, v);
            prop_assert!(avg[v] >= lo - 1e-12 && avg[v] <= hi + 1e-12);
            prop_assert!(med[v] >= lo && med[v] <= hi);
        }
    }

    #[test]
    fn normalized_gaussian_is_a_convex_combination(
        seed in any::<u64>(),
        sigma in 0.01f64..0.2,
        values in prop::collection::vec(-5.0f64..5.0, 1..64),
    ) {
        let g = graph(200, 0.1, seed);
        let u = field(&g, &values);
        let (lo, hi) = u.values().iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        let out = gaussian_normalized(&g, &u, GaussianParams::new(sigma).unwrap()).unwrap();
        prop_assert!(out.values().iter().all(|&x| x >= lo - 1e-12 && x <= hi + 1e-12));
    }

    #[test]
    fn unit_field_norms_are_zero_or_one(seed in any::<u64>(), values in prop::collection::vec(-5.0f64..5.0, 1..64)) {
        let g = graph(200, 0.12, seed);
        let n = unit_field(&gradient_geometric(&g, &field(&g, &values)).unwrap(), NORM_EPS);
        for x in n.values() {
            let norm = x[0].hypot(x[1]);
            prop_assert!(norm == 0.0 || (norm - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn gradient_ignores_constant_offsets(seed in any::<u64>(), shift in -10.0f64..10.0) {
        let g = graph(200, 0.12, seed);
        let u = ScalarField::from_fn(&g, |p| (5.0 * p.x).sin() * p.y);
        let a = gradient_geometric(&g, &u).unwrap();
        let b = gradient_geometric(&g, &u.map(|x| x + shift)).unwrap();
        for (p, q) in a.values().iter().zip(b.values()) {
            prop_assert!((p[0] - q[0]).abs() <= 1e-9 && (p[1] - q[1]).abs() <= 1e-9);
        }
    }

    #[test]
    fn relative_error_is_scale_covariant(
        seed in any::<u64>(),
        scale in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
    ) {
        let g = graph(150, 0.12, seed);
        let exact = ScalarField::from_fn(&g, |p| 1.0 + p.x * p.y);
        let approx = ScalarField::from_fn(&g, |p| 1.0 + p.x * p.y + 0.1 * (9.0 * p.x).cos());
        let skip = g.isolated_mask();
        let base = relative_error(&approx, &exact, &skip).unwrap();
        let scaled = relative_error(&approx.map(|x| x * scale), &exact.map(|x| x * scale), &skip).unwrap();
        prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1.0));
    }

    #[test]
    fn jaccard_is_symmetric_and_bounded(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..200)) {
        let (a, b): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
        let j = jaccard(&a, &b);
        prop_assert!((0.0..=1.0).contains(&j));
        prop_assert_eq!(j, jaccard(&b, &a));
        prop_assert_eq!(jaccard(&a, &a), 1.0);
    }

    #[test]
    fn binary_pgm_round_trip_quantizes(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
        let img = RasterImage::from_fn(w, h, |x, y| {
            let t = (seed as f64 * 1e-9 + (x * 31 + y * 17) as f64 * 0.618).fract();
            t.abs()
        }).unwrap();
        let back = parse_pgm(&encode_pgm(&img, PgmFormat::Binary, 255).unwrap()).unwrap();
        prop_assert_eq!((back.width(), back.height()), (w, h));
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            prop_assert!((a - b).abs() <= 1.0 / 255.0);
        }
    }
}
