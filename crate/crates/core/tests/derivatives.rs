//! Jet slots and loss gradients against central finite differences.

mod common;

use common::model;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use willmore::jet::Tape;
use willmore::losses::{BatchGradient, ChartBatch, EffectiveWeights, GenusBatch, LossWeights};
use willmore::net::{Chart, SurfaceJet};

#[test]
fn jet_slots_match_finite_differences_every_genus() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for genus in 0..=2u8 {
        for trial in 0..100u64 {
            let m = model(genus, &[16, 16], 1000 * genus as u64 + trial);
            let chart = Chart::for_genus(genus)[trial as usize % Chart::for_genus(genus).len()];
            let u = rng.random_range(0.1..6.1);
            let v = if genus == 0 { rng.random_range(0.1..3.0) } else { rng.random_range(0.1..6.1) };
            let err = common::check_slots(&m, chart, u, v, 1e-4);
            assert!(err < 1e-5, "genus {genus} trial {trial}: rel err {err:e}");
        }
    }
}

#[test]
fn tape_route_matches_scalar_and_batched_routes() {
    let m = model(1, &[7, 5], 3);
    let pts = [(0.3, 1.2), (4.0, 5.5), (2.2, 0.1)];
    let batch = m.forward_batch(Chart::Main, &pts).unwrap();
    for (i, &(u, v)) in pts.iter().enumerate() {
        let scalar = m.forward_jet(Chart::Main, u, v).unwrap();
        let tape = Tape::new();
        let w: Vec<_> = m.params().iter().map(|&p| tape.param(p)).collect();
        let taped = m.forward_on_tape(&w, u, v).unwrap().values();
        for ((a, b), c) in scalar.flat().iter().zip(taped.flat()).zip(batch.output(i).flat()) {
            assert!((a - b).abs() < 1e-13 && (a - c).abs() < 1e-12, "{a} {b} {c}");
        }
    }
}

/// Scalar-route loss on the tape, differentiated directly with respect to
/// the weights: an oracle for the batched adjoint.
#[test]
fn batched_adjoint_matches_full_tape_gradient() {
    let m = model(0, &[6, 5], 8);
    let pts = [(0.4, 0.9), (2.5, 2.0), (5.0, 1.4), (1.0, 0.3)];
    let tape = Tape::new();
    let w: Vec<_> = m.params().iter().map(|&p| tape.param(p)).collect();
    let jets: Vec<SurfaceJet<_>> = pts.iter().map(|&(u, v)| m.forward_on_tape(&w, u, v).unwrap()).collect();
    let lw = LossWeights::for_genus(0);
    let wt = willmore::losses::willmore_loss(&jets, 1.0, None).unwrap();
    let reg = willmore::losses::regularity_loss(&jets, None, &lw).unwrap();
    let loss = willmore::losses::total_loss(wt.plain, reg, None, &EffectiveWeights::constant(&lw), &lw);
    let oracle = tape.gradient(loss).unwrap();

    let batch = GenusBatch {
        genus: 0,
        delta: 0.65,
        charts: vec![ChartBatch {
            bulk: pts.to_vec(),
            ..ChartBatch::default()
        }],
        pairs: vec![],
    };
    // domain area 2π² instead of 1 rescales only the Willmore part
    let mut lw_unit = lw;
    lw_unit.lambda_w = 1.0;
    let g = BatchGradient::training(&m, &batch, &lw_unit, &EffectiveWeights::constant(&lw_unit)).unwrap();
    let area = 2.0 * std::f64::consts::PI.powi(2);
    let tape2 = Tape::new();
    let w2: Vec<_> = m.params().iter().map(|&p| tape2.param(p)).collect();
    let jets2: Vec<_> = pts.iter().map(|&(u, v)| m.forward_on_tape(&w2, u, v).unwrap()).collect();
    let wt2 = willmore::losses::willmore_loss(&jets2, area, None).unwrap();
    let reg2 = willmore::losses::regularity_loss(&jets2, None, &lw).unwrap();
    let loss2 = willmore::losses::total_loss(wt2.plain, reg2, None, &EffectiveWeights::constant(&lw), &lw);
    let oracle2 = tape2.gradient(loss2).unwrap();
    assert_eq!(oracle.len(), g.gradient.len());
    for (a, b) in g.gradient.iter().zip(&oracle2) {
        assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn full_loss_gradient_matches_finite_differences() {
    let worst = common::full_loss_gradient_error();
    assert!(worst < 1e-4, "worst relative error {worst:e}");
}

#[test]
fn gradient_is_linear_in_the_loss() {
    let m = model(1, &[4], 2);
    let tape = Tape::new();
    let w: Vec<_> = m.params().iter().map(|&p| tape.param(p)).collect();
    let a = m.forward_on_tape(&w, 0.3, 0.8).unwrap();
    let b = m.forward_on_tape(&w, 2.0, 4.0).unwrap();
    let l1 = a.x.duv * a.y.f;
    let l2 = b.z.dvv + b.x.du * b.x.du;
    let combo = l1 * 2.5 + l2 * -0.75;
    let adj = tape.backward(combo).unwrap();
    let (g1, g2): (Vec<f64>, Vec<f64>) = {
        let t1 = Tape::new();
        let w1: Vec<_> = m.params().iter().map(|&p| t1.param(p)).collect();
        let a1 = m.forward_on_tape(&w1, 0.3, 0.8).unwrap();
        let g1 = t1.gradient(a1.x.duv * a1.y.f).unwrap();
        let t2 = Tape::new();
        let w2: Vec<_> = m.params().iter().map(|&p| t2.param(p)).collect();
        let b2 = m.forward_on_tape(&w2, 2.0, 4.0).unwrap();
        let g2 = t2.gradient(b2.z.dvv + b2.x.du * b2.x.du).unwrap();
        (g1, g2)
    };
    for ((c, x), y) in adj.gradient().iter().zip(&g1).zip(&g2) {
        assert!((c - (2.5 * x - 0.75 * y)).abs() < 1e-12 * c.abs().max(1.0));
    }
}
