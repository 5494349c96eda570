//! Training objectives. Every term is generic over [`Real`] so the same
//! code runs on plain floats for evaluation and on the tape for training.

mod objective;

pub use objective::{evaluate_batch, BatchGradient, ChartBatch, GenusBatch};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{fundamental_forms, huber_h2, Metric, DET_EPS};
use crate::jet::Real;
use crate::net::SurfaceJet;
use crate::sampling::GluePair;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossWeights {
    pub lambda_w: f64,
    pub lambda_r: f64,
    pub lambda_g: f64,
    pub alpha_area: f64,
    pub alpha_pos: f64,
    pub alpha_smooth: f64,
    pub alpha_log: f64,
    pub alpha_c0: f64,
    pub alpha_c1: f64,
    pub alpha_c2: f64,
    pub a_min: f64,
    pub eps_pos: f64,
    pub g_max: f64,
    pub annulus_weight: f64,
    pub huber_factor: f64,
    pub huber: bool,
    pub log_barrier: bool,
}

impl LossWeights {
    pub fn for_genus(genus: u8) -> Self {
        let g2 = genus == 2;
        LossWeights {
            lambda_w: 1.0,
            lambda_r: 10.0,
            lambda_g: if g2 { 200.0 } else { 0.0 },
            alpha_area: 1.0,
            alpha_pos: 0.5,
            alpha_smooth: 0.5,
            alpha_log: 2.0,
            alpha_c0: 200.0,
            alpha_c1: 50.0,
            alpha_c2: 20.0,
            a_min: 0.01,
            eps_pos: 0.001,
            g_max: 5.0,
            annulus_weight: 20.0,
            huber_factor: 50.0,
            huber: g2,
            log_barrier: g2,
        }
    }

    pub fn normalizer(&self) -> f64 {
        self.lambda_w + self.lambda_r + self.lambda_g
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.lambda_w,
            self.lambda_r,
            self.lambda_g,
            self.alpha_area,
            self.alpha_pos,
            self.alpha_smooth,
            self.alpha_log,
            self.alpha_c0,
            self.alpha_c1,
            self.alpha_c2,
            self.a_min,
            self.eps_pos,
            self.g_max,
            self.annulus_weight,
            self.huber_factor,
        ];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Config(format!("loss weights must be finite and >= 0: {self:?}")));
        }
        if !(self.normalizer() > 0.0 && self.alpha_area + self.alpha_pos + self.alpha_smooth > 0.0) {
            return Err(Error::Config("loss normalizers must be positive".into()));
        }
        Ok(())
    }
}

/// Weights in effect at one epoch after annealing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveWeights {
    pub lambda_w: f64,
    pub lambda_r: f64,
    pub lambda_g: f64,
    /// `(α_C0, α_C1, α_C2)`.
    pub alpha_glue: [f64; 3],
}

impl EffectiveWeights {
    pub fn constant(w: &LossWeights) -> Self {
        EffectiveWeights {
            lambda_w: w.lambda_w,
            lambda_r: w.lambda_r,
            lambda_g: w.lambda_g,
            alpha_glue: [w.alpha_c0, w.alpha_c1, w.alpha_c2],
        }
    }
}

/// Per-epoch or per-batch loss components as plain numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LossReport {
    pub willmore: f64,
    pub willmore_huber: f64,
    pub reg_area: f64,
    pub reg_pos: f64,
    pub reg_smooth: f64,
    pub reg_log: f64,
    /// The combined regularity loss including any annulus copy.
    pub regularity: f64,
    pub glue_c0: f64,
    pub glue_c1: f64,
    pub glue_c2: f64,
    /// The combined gluing loss at the weights in effect.
    pub gluing: f64,
    pub total: f64,
    pub degenerate: usize,
}

impl LossReport {
    /// Running mean helper: adds `other` scaled by `w`. Counts are summed.
    pub fn accumulate(&mut self, other: &LossReport, w: f64) {
        self.willmore += w * other.willmore;
        self.willmore_huber += w * other.willmore_huber;
        self.reg_area += w * other.reg_area;
        self.reg_pos += w * other.reg_pos;
        self.reg_smooth += w * other.reg_smooth;
        self.reg_log += w * other.reg_log;
        self.regularity += w * other.regularity;
        self.glue_c0 += w * other.glue_c0;
        self.glue_c1 += w * other.glue_c1;
        self.glue_c2 += w * other.glue_c2;
        self.gluing += w * other.gluing;
        self.total += w * other.total;
        self.degenerate += other.degenerate;
    }
}

fn sum<T: Real>(mut it: impl Iterator<Item = T>) -> Option<T> {
    let first = it.next()?;
    Some(it.fold(first, |a, b| a + b))
}

fn norm2<T: Real>(a: [T; 3]) -> T {
    a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
}

/// Parameter-domain area of one chart for the Monte Carlo weight.
pub fn domain_area(genus: u8, delta: f64) -> f64 {
    match genus {
        0 => 2.0 * PI * PI,
        1 => 4.0 * PI * PI,
        _ => 4.0 * PI * PI - PI * delta * delta,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WillmoreTerm<T> {
    pub plain: T,
    /// Equal to `plain` when no Huber threshold was requested.
    pub huber: T,
    pub degenerate: usize,
    /// Mean raw `H^2` over the valid samples, detached.
    pub mean_h2: f64,
}

/// `|Ω| · mean(H^2 dA)` over the non-degenerate samples of one chart.
///
/// With `huber_factor = Some(f)` the threshold is `f` times the batch mean
/// of `H^2`, held fixed for differentiation.
pub fn willmore_loss<T: Real>(
    jets: &[SurfaceJet<T>],
    domain_area: f64,
    huber_factor: Option<f64>,
) -> Result<WillmoreTerm<T>> {
    if jets.is_empty() {
        return Err(Error::Config("Willmore loss needs a nonempty batch".into()));
    }
    let forms: Vec<_> = jets.iter().filter_map(|sj| fundamental_forms(sj).ok()).collect();
    let degenerate = jets.len() - forms.len();
    if forms.is_empty() {
        return Err(Error::AllDegenerate(jets.len()));
    }
    let n = forms.len() as f64;
    let mean_h2 = forms.iter().map(|ff| ff.h.value().powi(2)).sum::<f64>() / n;
    let scale = domain_area / n;
    let plain = sum(forms.iter().map(|ff| ff.h * ff.h * ff.sqrt_det)).unwrap() * scale;
    let huber = match huber_factor {
        Some(f) => {
            let c = f * mean_h2;
            sum(forms.iter().map(|ff| huber_h2(ff.h, c) * ff.sqrt_det)).unwrap() * scale
        }
        None => plain,
    };
    Ok(WillmoreTerm {
        plain,
        huber,
        degenerate,
        mean_h2,
    })
}

/// `sqrt(det)` extended below `DET_EPS` by its tangent line, so collapsed
/// samples still get a finite gradient pushing the area element up.
fn safe_sqrt_det<T: Real>(det: T) -> T {
    if det.value() >= DET_EPS {
        det.sqrt()
    } else {
        let s = DET_EPS.sqrt();
        (det - DET_EPS) * (0.5 / s) + s
    }
}

/// `ln(sqrt(det))` with the same tangent extension.
fn safe_log_sqrt_det<T: Real>(det: T) -> T {
    if det.value() >= DET_EPS {
        det.ln() * 0.5
    } else {
        (det - DET_EPS) * (0.5 / DET_EPS) + 0.5 * DET_EPS.ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularityTerms<T> {
    pub area: T,
    pub pos: T,
    pub smooth: T,
    pub log: T,
}

impl<T: Real> RegularityTerms<T> {
    /// Weighted three-part sum over the three-part normalizer, plus the
    /// log barrier when enabled.
    pub fn combine(&self, w: &LossWeights) -> T {
        let norm = w.alpha_area + w.alpha_pos + w.alpha_smooth;
        let base = (self.area * w.alpha_area + self.pos * w.alpha_area + self.smooth * w.alpha_smooth)
            / norm;
        if w.log_barrier {
            base + self.log * w.alpha_log
        } else {
            base
        }
    }

    pub fn values(&self) -> RegularityTerms<f64> {
        RegularityTerms {
            area: self.area.value(),
            pos: self.pos.value(),
            smooth: self.smooth.value(),
            log: self.log.value(),
        }
    }
}

/// Batch means of the hinge penalties on the metric and of the log barrier.
pub fn regularity_terms<T: Real>(jets: &[SurfaceJet<T>], w: &LossWeights) -> Result<RegularityTerms<T>> {
    if jets.is_empty() {
        return Err(Error::Config("regularity loss needs a nonempty batch".into()));
    }
    let inv = 1.0 / jets.len() as f64;
    let metrics: Vec<Metric<T>> = jets.iter().map(Metric::of).collect();
    let area = sum(metrics.iter().map(|m| (safe_sqrt_det(m.det) * -1.0 + w.a_min).relu().square()));
    let pos = sum(metrics.iter().map(|m| {
        (m.e * -1.0 + w.eps_pos).relu().square() + (m.g * -1.0 + w.eps_pos).relu().square()
    }));
    let smooth = sum(metrics.iter().map(|m| {
        (m.e - w.g_max).relu().square() + (m.g - w.g_max).relu().square()
    }));
    let log = sum(metrics.iter().map(|m| (safe_log_sqrt_det(m.det) * -1.0).relu()));
    Ok(RegularityTerms {
        area: area.unwrap() * inv,
        pos: pos.unwrap() * inv,
        smooth: smooth.unwrap() * inv,
        log: log.unwrap() * inv,
    })
}

/// Combined regularity of one chart, with the weighted annulus copy when
/// annulus jets are supplied.
pub fn regularity_loss<T: Real>(
    jets: &[SurfaceJet<T>],
    annulus: Option<&[SurfaceJet<T>]>,
    w: &LossWeights,
) -> Result<T> {
    let mut total = regularity_terms(jets, w)?.combine(w);
    if let Some(a) = annulus.filter(|a| !a.is_empty()) {
        total = total + regularity_terms(a, w)?.combine(w) * w.annulus_weight;
    }
    Ok(total)
}

fn jac<T: Real>(sj: &SurfaceJet<T>, e: [f64; 2]) -> [T; 3] {
    let (pu, pv) = (sj.d_u(), sj.d_v());
    std::array::from_fn(|k| pu[k] * e[0] + pv[k] * e[1])
}

fn hess<T: Real>(sj: &SurfaceJet<T>, a: [f64; 2], b: [f64; 2]) -> [T; 3] {
    let (uu, uv, vv) = (sj.d_uu(), sj.d_uv(), sj.d_vv());
    let cross = a[0] * b[1] + a[1] * b[0];
    std::array::from_fn(|k| uu[k] * (a[0] * b[0]) + uv[k] * cross + vv[k] * (a[1] * b[1]))
}

fn lin<T: Real>(terms: &[([T; 3], f64)]) -> [T; 3] {
    std::array::from_fn(|k| {
        let mut acc = terms[0].0[k] * terms[0].1;
        for (v, c) in &terms[1..] {
            acc = acc + v[k] * *c;
        }
        acc
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlueTerms<T> {
    pub c0: T,
    pub c1: T,
    pub c2: T,
}

impl<T: Real> GlueTerms<T> {
    /// `Σ α_k L_Ck / Σ α_k`; zero when every α is zero.
    pub fn combine(&self, alpha: [f64; 3]) -> T {
        let norm: f64 = alpha.iter().sum();
        if norm <= 0.0 {
            return self.c0.zero();
        }
        (self.c0 * alpha[0] + self.c1 * alpha[1] + self.c2 * alpha[2]) / norm
    }
}

/// Squared residuals of the matching conditions across the glue annulus,
/// averaged over the pairs. `j1[i]` is the first chart at `pairs[i].p1`,
/// `j2[i]` the second chart at `pairs[i].p2`.
pub fn gluing_terms<T: Real>(
    pairs: &[GluePair],
    j1: &[SurfaceJet<T>],
    j2: &[SurfaceJet<T>],
) -> Result<GlueTerms<T>> {
    if pairs.is_empty() || pairs.len() != j1.len() || pairs.len() != j2.len() {
        return Err(Error::Config(format!(
            "gluing needs matched nonempty batches, got {} pairs, {} and {} jets",
            pairs.len(),
            j1.len(),
            j2.len()
        )));
    }
    let inv = 1.0 / pairs.len() as f64;
    let mut c0 = Vec::with_capacity(pairs.len());
    let mut c1 = Vec::with_capacity(pairs.len());
    let mut c2 = Vec::with_capacity(pairs.len());
    for ((p, a), b) in pairs.iter().zip(j1).zip(j2) {
        let (er, et) = (p.e_r(), p.e_theta());
        let (r, r2) = (p.r, p.r2());
        let (a_r, a_t) = (jac(a, er), jac(a, et));
        let (b_r, b_t) = (jac(b, er), jac(b, et));
        let (pa, pb) = (a.point(), b.point());
        c0.push(norm2(lin(&[(pa, 1.0), (pb, -1.0)])));
        c1.push(norm2(lin(&[(a_r, 1.0), (b_r, 1.0)])) + norm2(lin(&[(a_t, r), (b_t, -r2)])));
        let rr = lin(&[(hess(a, er, er), 1.0), (hess(b, er, er), -1.0)]);
        let rt = lin(&[
            (hess(a, er, et), r),
            (hess(b, er, et), r2),
            (a_t, 1.0),
            (b_t, 1.0),
        ]);
        let tt = lin(&[
            (hess(a, et, et), r * r),
            (hess(b, et, et), -r2 * r2),
            (a_r, -2.0 * p.delta),
        ]);
        c2.push(norm2(rr) + norm2(rt) + norm2(tt));
    }
    Ok(GlueTerms {
        c0: sum(c0.into_iter()).unwrap() * inv,
        c1: sum(c1.into_iter()).unwrap() * inv,
        c2: sum(c2.into_iter()).unwrap() * inv,
    })
}

/// Position plus first-derivative matching against a reference.
pub fn pretrain_loss<T: Real>(
    pred: &[SurfaceJet<T>],
    reference: &[SurfaceJet<f64>],
    beta1: f64,
    beta2: f64,
) -> Result<T> {
    if pred.is_empty() || pred.len() != reference.len() {
        return Err(Error::Config(format!(
            "pretraining needs matched nonempty batches, got {} and {}",
            pred.len(),
            reference.len()
        )));
    }
    let diff = |a: [T; 3], b: [f64; 3]| norm2(std::array::from_fn(|k| a[k] - b[k]));
    let terms = pred.iter().zip(reference).map(|(p, r)| {
        diff(p.point(), r.point()) * beta1
            + (diff(p.d_u(), r.d_u()) + diff(p.d_v(), r.d_v())) * beta2
    });
    Ok(sum(terms).unwrap() / pred.len() as f64)
}

/// `(λ_W L_W + λ_R L_R + λ_G L_G) / (λ_W^0 + λ_R^0 + λ_G^0)`.
pub fn total_loss<T: Real>(
    willmore: T,
    regularity: T,
    gluing: Option<T>,
    eff: &EffectiveWeights,
    initial: &LossWeights,
) -> T {
    let mut acc = willmore * eff.lambda_w + regularity * eff.lambda_r;
    if let Some(g) = gluing {
        acc = acc + g * eff.lambda_g;
    }
    acc / initial.normalizer()
}
