//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use willmore::features::FeatureMap;
use willmore::geometry::Immersion;
use willmore::jet::Jet2;
use willmore::losses::{evaluate_batch, BatchGradient, ChartBatch, EffectiveWeights, GenusBatch, LossWeights};
use willmore::net::{Chart, SurfaceJet, SurfaceModel};
use willmore::sampling::GluePair;
use willmore::Result;

pub const DELTA: f64 = 0.65;

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

pub fn model(genus: u8, hidden: &[usize], seed: u64) -> SurfaceModel {
    let f = FeatureMap::for_genus(genus, 2, 2).unwrap();
    SurfaceModel::new(genus, f, hidden, seed).unwrap()
}

/// All 18 slots of `sj` against differences of the plain values.
pub fn check_slots(m: &SurfaceModel, chart: Chart, u: f64, v: f64, h: f64) -> f64 {
    let f = |du: f64, dv: f64| m.forward_jet(chart, u + du, v + dv).unwrap().point();
    let sj = m.forward_jet(chart, u, v).unwrap();
    let c = f(0.0, 0.0);
    let (pu, mu, pv, mv) = (f(h, 0.0), f(-h, 0.0), f(0.0, h), f(0.0, -h));
    let (pp, pm, mp, mm) = (f(h, h), f(h, -h), f(-h, h), f(-h, -h));
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let fd = [
            c[k],
            (pu[k] - mu[k]) / (2.0 * h),
            (pv[k] - mv[k]) / (2.0 * h),
            (pu[k] - 2.0 * c[k] + mu[k]) / (h * h),
            (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h),
            (pv[k] - 2.0 * c[k] + mv[k]) / (h * h),
        ];
        let jet = [sj.x, sj.y, sj.z][k].slots();
        for s in 0..6 {
            worst = worst.max(rel(jet[s], fd[s]));
        }
    }
    worst
}

pub fn genus2_batch(m: &SurfaceModel) -> GenusBatch {
    let pairs = vec![
        GluePair::new(0.62, 0.3, 0.65),
        GluePair::new(0.68, 2.1, 0.65),
        GluePair::new(0.7, 4.4, 0.65),
    ];
    let chart = |bulk: Vec<(f64, f64)>, annulus: Vec<(f64, f64)>, first: bool| ChartBatch {
        bulk,
        annulus,
        glue: pairs.iter().map(|p| if first { p.p1 } else { p.p2 }).collect(),
    };
    assert_eq!(m.genus(), 2);
    GenusBatch {
        genus: 2,
        delta: 0.65,
        charts: vec![
            chart(vec![(2.0, 3.0), (4.0, 1.0), (3.3, 5.1)], vec![(1.0, 0.2)], true),
            chart(vec![(0.5, 3.0), (5.0, 2.0)], vec![(2.0, 0.9), (4.1, 6.0)], false),
        ],
        pairs,
    }
}

/// Worst relative error of the full-loss weight gradient against central
/// differences, on a toy genus-2 net where every term is active.
pub fn full_loss_gradient_error() -> f64 {
    let f = FeatureMap::fourier(2).unwrap();
    let mut m = SurfaceModel::new(2, f, &[6, 5], 21).unwrap();
    let batch = genus2_batch(&m);
    let mut lw = LossWeights::for_genus(2);
    // a detached Huber threshold is invisible to differences; keep it off
    lw.huber = false;
    // small thresholds so every gated term is active somewhere
    lw.g_max = 0.05;
    lw.a_min = 0.5;
    lw.eps_pos = 0.2;
    let eff = EffectiveWeights {
        lambda_w: 0.7,
        lambda_r: 10.0,
        lambda_g: 150.0,
        alpha_glue: [200.0, 30.0, 12.0],
    };
    let g = BatchGradient::training(&m, &batch, &lw, &eff).unwrap();
    let r = g.report;
    assert!(r.reg_area > 0.0 && r.reg_pos > 0.0 && r.reg_smooth > 0.0 && r.reg_log > 0.0, "{r:?}");
    assert!(r.glue_c0 > 0.0 && r.glue_c1 > 0.0 && r.glue_c2 > 0.0);
    let base = evaluate_batch(&m, &batch, &lw, &eff).unwrap();
    assert!((base.total - r.total).abs() < 1e-12 * r.total.abs().max(1.0));
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for i in 0..m.param_count() {
        let p0 = m.params()[i];
        m.params_mut()[i] = p0 + h;
        let up = evaluate_batch(&m, &batch, &lw, &eff).unwrap().total;
        m.params_mut()[i] = p0 - h;
        let dn = evaluate_batch(&m, &batch, &lw, &eff).unwrap().total;
        m.params_mut()[i] = p0;
        let fd = (up - dn) / (2.0 * h);
        worst = worst.max((g.gradient[i] - fd).abs() / fd.abs().max(1e-2));
    }
    worst
}

/// One smooth map `F` on the plane around the neck, read through each
/// chart's local polar coordinates: the second chart sees it through the
/// reflection, so the two charts agree on the glued surface exactly.
pub struct GlobalNeck {
    pub reflect_second: bool,
}

fn offset(j: Jet2<f64>, c: f64) -> Jet2<f64> {
    let shift = ((j.f - c + PI).rem_euclid(TAU) - PI) - j.f;
    j + shift
}

fn field(x: Jet2<f64>, y: Jet2<f64>) -> SurfaceJet<f64> {
    let (sy, _) = y.sin_cos();
    let (_, cx) = x.sin_cos();
    SurfaceJet {
        x: x + y * y * 0.3,
        y: sy + x * y,
        z: x * x * 0.5 - y + cx,
    }
}

impl Immersion for GlobalNeck {
    fn genus(&self) -> u8 {
        2
    }

    fn jet(&self, chart: Chart, u: f64, v: f64) -> Result<SurfaceJet<f64>> {
        let (ju, jv) = Jet2::seed(u, v)?;
        Ok(match chart {
            Chart::T2 => {
                let (qx, qy) = (offset(ju, PI), offset(jv, 0.0));
                if !self.reflect_second {
                    return Ok(field(qx, qy));
                }
                let s = (qx * qx + qy * qy).sqrt();
                let k = (s * -1.0 + 2.0 * DELTA) * s.recip();
                field(qx * k, qy * k)
            }
            _ => field(offset(ju, 0.0), offset(jv, 0.0)),
        })
    }
}

