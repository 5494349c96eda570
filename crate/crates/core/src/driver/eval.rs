use std::f64::consts::TAU;

use crate::config::TrainConfig;
use crate::error::Result;
use crate::geometry::{euler_characteristic, fundamental_forms, Immersion};
use crate::losses::{domain_area, gluing_terms, regularity_terms, GlueTerms, RegularityTerms};
use crate::net::{Chart, SurfaceJet};
use crate::sampling::{sample_bulk_stream, substream_rng, GluePair, SamplerConfig, Stream};

/// Fresh-sample diagnostics of an immersion, always with the plain
/// integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// Monte Carlo Willmore energy, summed over charts.
    pub willmore: f64,
    pub per_chart: Vec<f64>,
    /// Monte Carlo `∫K dA`, summed over charts.
    pub integral_k: f64,
    /// `W - 2πχ`.
    pub conformal_willmore: f64,
    /// Regularity components summed over charts.
    pub regularity: RegularityTerms<f64>,
    /// Gluing residuals on fresh pairs, genus 2 only.
    pub glue: Option<GlueTerms<f64>>,
    /// Mean `|φ1(p1) - φ2(p2)|` over the glue pairs, genus 2 only.
    pub mean_glue_gap: Option<f64>,
    pub degenerate: usize,
}

fn chart_points(samples: &[crate::sampling::DomainSample], chart: Chart) -> Vec<(f64, f64)> {
    samples
        .iter()
        .filter(|s| s.chart == chart)
        .map(|s| (s.u, s.v))
        .collect()
}

/// Evaluates `imm` on `n` fresh bulk samples drawn from `seed`; for genus 2
/// also on `n / 4` fresh glue pairs.
pub fn evaluate<I: Immersion + ?Sized>(
    imm: &I,
    sampler: &SamplerConfig,
    cfg_weights: &crate::losses::LossWeights,
    n: usize,
    seed: u64,
) -> Result<Evaluation> {
    let genus = imm.genus();
    let samples = sample_bulk_stream(genus, sampler, n, substream_rng(seed, 0, Stream::Eval, 0))?;
    let area = domain_area(genus, sampler.delta);
    let mut out = Evaluation {
        willmore: 0.0,
        per_chart: Vec::new(),
        integral_k: 0.0,
        conformal_willmore: 0.0,
        regularity: RegularityTerms {
            area: 0.0,
            pos: 0.0,
            smooth: 0.0,
            log: 0.0,
        },
        glue: None,
        mean_glue_gap: None,
        degenerate: 0,
    };
    for &chart in Chart::for_genus(genus) {
        let pts = chart_points(&samples, chart);
        if pts.is_empty() {
            out.per_chart.push(0.0);
            continue;
        }
        let jets = imm.jets(chart, &pts)?;
        let (mut w, mut k, mut valid) = (0.0, 0.0, 0usize);
        for sj in &jets {
            if let Ok(ff) = fundamental_forms(sj) {
                w += ff.h * ff.h * ff.sqrt_det;
                k += ff.k * ff.sqrt_det;
                valid += 1;
            }
        }
        out.degenerate += jets.len() - valid;
        let scale = if valid > 0 { area / valid as f64 } else { 0.0 };
        out.per_chart.push(w * scale);
        out.willmore += w * scale;
        out.integral_k += k * scale;
        let r = regularity_terms(&jets, cfg_weights)?;
        out.regularity.area += r.area;
        out.regularity.pos += r.pos;
        out.regularity.smooth += r.smooth;
        out.regularity.log += r.log;
    }
    out.conformal_willmore = out.willmore - TAU * euler_characteristic(genus);
    if genus == 2 {
        let pairs = fresh_glue_pairs(sampler, (n / 4).max(1), seed);
        let (j1, j2) = glue_jets(imm, &pairs)?;
        out.glue = Some(gluing_terms(&pairs, &j1, &j2)?);
        let gap: f64 = j1
            .iter()
            .zip(&j2)
            .map(|(a, b)| {
                let (p, q) = (a.point(), b.point());
                ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
            })
            .sum();
        out.mean_glue_gap = Some(gap / pairs.len() as f64);
    }
    Ok(out)
}

fn fresh_glue_pairs(sampler: &SamplerConfig, n: usize, seed: u64) -> Vec<GluePair> {
    use rand::distr::{Distribution, Uniform};
    let mut rng = substream_rng(seed, 0, Stream::Eval, 1);
    let d = Uniform::new(0.0, 1.0).expect("unit interval");
    let lo = sampler.delta * (1.0 - sampler.glue_width);
    let width = 2.0 * sampler.delta * sampler.glue_width;
    (0..n)
        .map(|_| {
            let r = lo + width * d.sample(&mut rng);
            GluePair::new(r, TAU * d.sample(&mut rng), sampler.delta)
        })
        .collect()
}

/// Jets of both charts at the two ends of each pair.
pub fn glue_jets<I: Immersion + ?Sized>(
    imm: &I,
    pairs: &[GluePair],
) -> Result<(Vec<SurfaceJet<f64>>, Vec<SurfaceJet<f64>>)> {
    let p1: Vec<_> = pairs.iter().map(|p| p.p1).collect();
    let p2: Vec<_> = pairs.iter().map(|p| p.p2).collect();
    Ok((imm.jets(Chart::T1, &p1)?, imm.jets(Chart::T2, &p2)?))
}

/// Evaluation with the sampler, weights and sample count of `cfg`.
pub fn evaluate_with<I: Immersion + ?Sized>(imm: &I, cfg: &TrainConfig, seed: u64) -> Result<Evaluation> {
    evaluate(imm, &cfg.sampler, &cfg.weights, cfg.eval_samples, seed)
}

fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

/// Median over `cloud` of the distance to the nearest other point.
pub fn median_nn_spacing(cloud: &[[f64; 3]]) -> f64 {
    let mut d: Vec<f64> = cloud
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            cloud
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &q)| dist2(p, q))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .collect();
    d.sort_by(f64::total_cmp);
    d[d.len() / 2]
}

/// Connectivity across the glue circle of a genus-2 immersion: the largest
/// distance from a point on the first chart's disc boundary to the nearest
/// point on the second chart's disc boundary, over the median
/// nearest-neighbour spacing of an `n`-point bulk cloud.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlueConnectivity {
    pub max_gap: f64,
    pub median_spacing: f64,
}

impl GlueConnectivity {
    pub fn ratio(&self) -> f64 {
        self.max_gap / self.median_spacing
    }
}

pub fn glue_connectivity<I: Immersion + ?Sized>(
    imm: &I,
    sampler: &SamplerConfig,
    n: usize,
    circle: usize,
    seed: u64,
) -> Result<GlueConnectivity> {
    let cloud = crate::driver::export::sample_cloud(imm, sampler, n, seed)?;
    let pts: Vec<[f64; 3]> = cloud.iter().map(|v| v.xyz).collect();
    let median_spacing = median_nn_spacing(&pts);
    let on_circle = |center: (f64, f64)| -> Vec<(f64, f64)> {
        (0..circle)
            .map(|k| {
                let th = TAU * k as f64 / circle as f64;
                (
                    (center.0 + sampler.delta * th.cos()).rem_euclid(TAU),
                    (center.1 + sampler.delta * th.sin()).rem_euclid(TAU),
                )
            })
            .collect()
    };
    let c1: Vec<[f64; 3]> = imm
        .jets(Chart::T1, &on_circle((0.0, 0.0)))?
        .iter()
        .map(|j| j.point())
        .collect();
    let c2: Vec<[f64; 3]> = imm
        .jets(Chart::T2, &on_circle((std::f64::consts::PI, 0.0)))?
        .iter()
        .map(|j| j.point())
        .collect();
    let max_gap = c1
        .iter()
        .map(|&p| c2.iter().map(|&q| dist2(p, q)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
        .sqrt();
    Ok(GlueConnectivity {
        max_gap,
        median_spacing,
    })
}

