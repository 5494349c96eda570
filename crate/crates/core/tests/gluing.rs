//! The polar reflection between the two genus-2 charts and the matching
//! conditions built from it.

mod common;

use std::f64::consts::{PI, TAU};

use common::{GlobalNeck, DELTA};
use willmore::driver::{evaluate, glue_jets};
use willmore::losses::{gluing_terms, LossWeights};
use willmore::sampling::{glue_map, sample_glue_pairs, GluePair, SamplerConfig};

#[test]
fn reflection_jacobian_by_finite_differences() {
    let h = 1e-6;
    for &(r, th) in &[(0.6f64, 0.3f64), (0.65, 2.0), (0.7, 4.0), (0.59, 5.9)] {
        let local = |x: f64, y: f64| {
            let (r, t) = ((x * x + y * y).sqrt(), y.atan2(x));
            let (a, b) = glue_map(r, t, DELTA);
            [a - PI, b]
        };
        let (x, y) = (r * th.cos(), r * th.sin());
        let (er, et) = ([th.cos(), th.sin()], [-th.sin(), th.cos()]);
        let dir = |d: [f64; 2]| {
            let p = local(x + h * d[0], y + h * d[1]);
            let m = local(x - h * d[0], y - h * d[1]);
            [(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)]
        };
        let k = (2.0 * DELTA - r) / r;
        let (a, b) = (dir(er), dir(et));
        for i in 0..2 {
            assert!((a[i] + er[i]).abs() < 1e-6, "e_r image {a:?}");
            assert!((b[i] - k * et[i]).abs() < 1e-6, "e_theta image {b:?}");
        }
    }
}

#[test]
fn glue_pairs_sit_in_the_band_and_reduce_mod_2pi() {
    let cfg = SamplerConfig::default();
    for p in sample_glue_pairs(&cfg, 500, 4, 0).unwrap() {
        assert!(p.r >= DELTA * 0.9 && p.r <= DELTA * 1.1);
        for c in [p.p1.0, p.p1.1, p.p2.0, p.p2.1] {
            assert!((0.0..TAU).contains(&c));
        }
        let (a, b) = glue_map(p.r, p.theta, DELTA);
        assert!((a.rem_euclid(TAU) - p.p2.0).abs() < 1e-12 && (b.rem_euclid(TAU) - p.p2.1).abs() < 1e-12);
    }
}

#[test]
fn one_global_immersion_glues_exactly() {
    let cfg = SamplerConfig::default();
    let pairs = sample_glue_pairs(&cfg, 400, 9, 0).unwrap();
    let neck = GlobalNeck { reflect_second: true };
    let (j1, j2) = glue_jets(&neck, &pairs).unwrap();
    let g = gluing_terms(&pairs, &j1, &j2).unwrap();
    assert!(g.c0 < 1e-10 && g.c1 < 1e-10 && g.c2 < 1e-10, "{g:?}");

    let mut lw = LossWeights::for_genus(2);
    lw.huber = false;
    let e = evaluate(&neck, &cfg, &lw, 200, 3).unwrap();
    let g = e.glue.unwrap();
    assert!(g.c0 + g.c1 + g.c2 < 1e-10);
    assert!(e.mean_glue_gap.unwrap() < 1e-12);
}

#[test]
fn an_unreflected_chart_fails_the_derivative_conditions() {
    let pairs: Vec<_> = (0..64)
        .map(|k| GluePair::new(DELTA * 1.05, TAU * k as f64 / 64.0, DELTA))
        .collect();
    let neck = GlobalNeck { reflect_second: false };
    let (j1, j2) = glue_jets(&neck, &pairs).unwrap();
    let g = gluing_terms(&pairs, &j1, &j2).unwrap();
    assert!(g.c0 > 1e-4 && g.c1 > 1e-2 && g.c2 > 1e-2, "{g:?}");
}

#[test]
fn on_the_circle_the_conditions_reduce_to_the_plain_reflection() {
    // at r = δ the reflection only flips e_r, so C1 compares J1 e_r with
    // -J2 e_r and J1 e_θ with J2 e_θ
    let p = GluePair::new(DELTA, 1.1, DELTA);
    assert!((p.r2() - DELTA).abs() < 1e-15);
    let neck = GlobalNeck { reflect_second: true };
    let (j1, j2) = glue_jets(&neck, &[p]).unwrap();
    let (a, b) = (j1[0], j2[0]);
    let (er, et) = (p.e_r(), p.e_theta());
    for k in 0..3 {
        let d1 = [a.d_u()[k], a.d_v()[k]];
        let d2 = [b.d_u()[k], b.d_v()[k]];
        let dot = |d: [f64; 2], e: [f64; 2]| d[0] * e[0] + d[1] * e[1];
        assert!((dot(d1, er) + dot(d2, er)).abs() < 1e-12);
        assert!((dot(d1, et) - dot(d2, et)).abs() < 1e-12);
    }
}
