//! Property tests for invariants that hold for every input.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use willmore::config::TrainConfig;
use willmore::driver::domain_color;
use willmore::features::FeatureMap;
use willmore::geometry::{fundamental_forms, huber_h2, willmore_integrand, Immersion, ReferenceSurface};
use willmore::jet::Jet2;
use willmore::losses::{regularity_terms, LossWeights};
use willmore::net::{decode_state, encode_state, Chart, SurfaceJet, SurfaceModel};
use willmore::optim::{clip_gradient, lr_at, AdamW, LrSchedule, Ramp};
use willmore::sampling::{glue_map, periodic_disc_distance, GluePair};

fn small(genus: u8, seed: u64) -> SurfaceModel {
    let f = FeatureMap::for_genus(genus, 2, 2).unwrap();
    SurfaceModel::new(genus, f, &[6, 5], seed).unwrap()
}

fn close(a: &SurfaceJet<f64>, b: &SurfaceJet<f64>, tol: f64) -> bool {
    a.flat().iter().zip(b.flat()).all(|(x, y)| (x - y).abs() <= tol * x.abs().max(1.0))
}

/// A planar map with constant metric `E = a² + c²`, `F = c b`, `G = b²`.
fn shear_plane(a: f64, b: f64, c: f64) -> SurfaceJet<f64> {
    let (u, v) = Jet2::seed(0.3, 0.4).unwrap();
    SurfaceJet {
        x: u * a,
        y: v * b + u * c,
        z: Jet2::constant(0.0),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poles_collapse(seed in 0u64..1000, u1 in 0.0..TAU, u2 in 0.0..TAU) {
        let m = small(0, seed);
        for v in [0.0, PI] {
            let a = m.forward_jet(Chart::Main, u1, v).unwrap().point();
            let b = m.forward_jet(Chart::Main, u2, v).unwrap().point();
            for k in 0..3 {
                prop_assert!((a[k] - b[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn torus_charts_are_doubly_periodic(seed in 0u64..1000, genus in 1u8..=2, u in 0.0..TAU, v in 0.0..TAU) {
        let m = small(genus, seed);
        for &chart in m.charts() {
            let base = m.forward_jet(chart, u, v).unwrap();
            for (du, dv) in [(TAU, 0.0), (0.0, TAU), (-TAU, TAU)] {
                let moved = m.forward_jet(chart, u + du, v + dv).unwrap();
                prop_assert!(close(&base, &moved, 1e-10));
            }
        }
    }

    #[test]
    fn batched_forward_matches_single_points(seed in 0u64..1000, pts in prop::collection::vec((0.0..TAU, 0.0..TAU), 1..12)) {
        let m = small(1, seed);
        let batch = m.forward_batch(Chart::Main, &pts).unwrap();
        for (i, &(u, v)) in pts.iter().enumerate() {
            prop_assert!(close(&batch.output(i), &m.forward_jet(Chart::Main, u, v).unwrap(), 1e-12));
        }
    }

    #[test]
    fn integrand_ignores_scale(a in 0.5..3.0, b in 0.5..3.0, c in 0.5..3.0, u in 0.0..TAU, v in 0.2..3.0, lambda in 0.01..100.0) {
        let s = ReferenceSurface::Ellipsoid { a, b, c };
        let sj = s.jet(Chart::Main, u, v).unwrap();
        let w0 = willmore_integrand(&fundamental_forms(&sj).unwrap(), None);
        let w1 = willmore_integrand(&fundamental_forms(&sj.scale(lambda)).unwrap(), None);
        prop_assert!((w0 - w1).abs() <= 1e-11 * w0.abs().max(1.0));
    }

    #[test]
    fn huber_never_exceeds_the_square(h in -1e3..1e3, c in 1e-3..1e3) {
        let t = huber_h2(h, c);
        prop_assert!(t <= h * h + 1e-9 * h * h);
        if h * h <= c {
            prop_assert_eq!(t, h * h);
        } else {
            prop_assert!(t < h * h);
        }
    }

    #[test]
    fn gates_are_silent_inside_the_band(a in 0.2..2.0, b in 0.2..2.0, c in -0.5..0.5) {
        let w = LossWeights::for_genus(0);
        let sj = shear_plane(a, b, c);
        let r = regularity_terms(&[sj], &w).unwrap();
        prop_assert_eq!((r.area, r.pos, r.smooth), (0.0, 0.0, 0.0));
    }

    #[test]
    fn gates_fire_outside_the_band(big in 2.3..10.0) {
        let w = LossWeights::for_genus(0);
        let r = regularity_terms(&[shear_plane(big, 1.0, 0.0)], &w).unwrap();
        prop_assert!(r.smooth > 0.0);
        let r = regularity_terms(&[shear_plane(1.0 / (big * 100.0), 1.0, 0.0)], &w).unwrap();
        prop_assert!(r.area > 0.0 && r.pos > 0.0);
    }

    #[test]
    fn reflection_is_an_involution(r in 0.4..0.9, theta in 0.0..TAU) {
        let delta = 0.65;
        let (u2, v2) = glue_map(r, theta, delta);
        let (x, y) = (u2 - PI, v2);
        let back = glue_map((x * x + y * y).sqrt(), y.atan2(x), delta);
        prop_assert!((back.0 - PI - r * theta.cos()).abs() < 1e-12);
        prop_assert!((back.1 - r * theta.sin()).abs() < 1e-12);
        let p = GluePair::new(r, theta, delta);
        prop_assert!((periodic_disc_distance(p.p1.0, p.p1.1, (0.0, 0.0)) - r).abs() < 1e-12);
        prop_assert!((periodic_disc_distance(p.p2.0, p.p2.1, (PI, 0.0)) - (2.0 * delta - r)).abs() < 1e-12);
    }

    #[test]
    fn clipping_bounds_the_norm(g in prop::collection::vec(-100.0..100.0f64, 1..50), max in 0.1..10.0) {
        let mut c = g.clone();
        let before = clip_gradient(&mut c, max).unwrap();
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(norm <= max * (1.0 + 1e-12));
        if before <= max {
            prop_assert_eq!(&c, &g);
        } else {
            for (a, b) in c.iter().zip(&g) {
                prop_assert!((a * before / max - b).abs() < 1e-9 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn decay_alone_shrinks_weights(p in prop::collection::vec(-5.0..5.0f64, 1..20), lr in 1e-4..1e-1) {
        let mut opt = AdamW::new(p.len(), 1e-2);
        let mut q = p.clone();
        opt.step(&mut q, &vec![0.0; p.len()], lr);
        for (a, b) in q.iter().zip(&p) {
            prop_assert!((a - b * (1.0 - lr * 1e-2)).abs() < 1e-15);
        }
    }

    #[test]
    fn cosine_stays_between_its_ends(max in 1e-6..1e-2, frac in 0.0..1.0, e1 in 0.0..300.0f64, e2 in 0.0..300.0f64) {
        let s = LrSchedule::Cosine { max, min: max * frac, epochs: 250.0 };
        let (a, b) = (lr_at(&s, e1.min(e2)), lr_at(&s, e1.max(e2)));
        prop_assert!(a >= b - 1e-18);
        prop_assert!(b >= max * frac - 1e-18 && a <= max + 1e-18);
    }

    #[test]
    fn ramps_are_monotone_and_clamped(start in 0.0..100.0, width in 0.0..50.0, to in -5.0..5.0, e1 in -10.0..200.0f64, e2 in -10.0..200.0f64) {
        let r = Ramp { start, width, from: 1.0, to };
        let (a, b) = (r.at(e1.min(e2)), r.at(e1.max(e2)));
        let (lo, hi) = (to.min(1.0), to.max(1.0));
        prop_assert!(a >= lo - 1e-12 && a <= hi + 1e-12);
        let monotone = if to >= 1.0 { b >= a - 1e-12 } else { b <= a + 1e-12 };
        prop_assert!(monotone);
    }

    #[test]
    fn genus2_colours_keep_charts_apart(u in 0.0..TAU, v in 0.0..TAU) {
        // different charts never share a colour at the same domain point
        prop_assert_ne!(domain_color(Chart::T1, u, v, 2), domain_color(Chart::T2, u, v, 2));
    }

    #[test]
    fn checkpoints_roundtrip(genus in 0u8..=2, h1 in 1usize..6, h2 in 1usize..6, seed in 0u64..1000, steps in 0usize..3) {
        let f = FeatureMap::for_genus(genus, 1, 1).unwrap();
        let mut m = SurfaceModel::new(genus, f, &[h1, h2], seed).unwrap();
        let mut opt = AdamW::new(m.param_count(), 1e-5);
        for k in 0..steps {
            let g: Vec<f64> = (0..m.param_count()).map(|i| ((i + k) as f64).cos()).collect();
            opt.step(m.params_mut(), &g, 1e-3);
        }
        let (back, o) = decode_state(&encode_state(&m, Some(&opt))).unwrap();
        prop_assert_eq!(back, m);
        prop_assert_eq!(o, Some(opt));
    }

    #[test]
    fn config_text_roundtrips(genus in 0u8..=2, seed in 0u64..u64::MAX, lr in 1e-6..1e-2, delta in 0.1..1.0, re in -0.5..0.5, im in 0.05..1.0) {
        let mut c = TrainConfig::for_genus(genus).unwrap();
        c.seed = seed;
        c.lr_value = lr;
        c.sampler.delta = delta;
        c.set("tau", &format!("{re}{im:+}i")).unwrap();
        let back = TrainConfig::from_text(&c.to_string(), None).unwrap();
        prop_assert_eq!(back.to_string(), c.to_string());
        prop_assert_eq!(back.seed, seed);
    }
}
