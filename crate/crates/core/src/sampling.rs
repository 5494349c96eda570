//! Seeded samplers for each fundamental domain.
//!
//! Every stream is a pure function of `(seed, epoch, tag)`: the words fill
//! the ChaCha key, so draws never depend on what was sampled before.

use std::f64::consts::{PI, TAU};

use rand::distr::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::net::Chart;

/// Purpose tags separating the random streams of one epoch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Bulk = 1,
    Annulus = 2,
    Glue = 3,
    Shuffle = 4,
    Eval = 5,
    Pretrain = 6,
    Export = 7,
}

pub fn stream_rng(seed: u64, epoch: u64, tag: Stream) -> ChaCha8Rng {
    substream_rng(seed, epoch, tag, 0)
}

/// A further split of one stream, e.g. per chart.
pub fn substream_rng(seed: u64, epoch: u64, tag: Stream, sub: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[24..].copy_from_slice(&sub.to_le_bytes());
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&epoch.to_le_bytes());
    key[16..24].copy_from_slice(&(tag as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    /// Radius of the excluded disc on each genus-2 chart.
    pub delta: f64,
    /// The annulus spans `delta ..= alpha * delta`.
    pub alpha: f64,
    /// Relative half-width of the glue band around the disc boundary.
    pub glue_width: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            delta: 0.65,
            alpha: 2.5,
            glue_width: 0.1,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let SamplerConfig {
            delta,
            alpha,
            glue_width,
        } = *self;
        if !(delta > 0.0 && alpha >= 1.0 && alpha * delta < PI) {
            return Err(Error::Config(format!(
                "need 0 < delta and 1 <= alpha with alpha*delta < π, got delta={delta} alpha={alpha}"
            )));
        }
        if !(glue_width > 0.0 && glue_width < 1.0) {
            return Err(Error::Config(format!("glue width {glue_width} outside (0, 1)")));
        }
        Ok(())
    }

    /// Parameter area of a punctured chart, `(2π)^2 - π δ^2`.
    pub fn punctured_area(&self) -> f64 {
        TAU * TAU - PI * self.delta * self.delta
    }
}

/// Centre of the excluded disc of a genus-2 chart.
pub fn disc_center(chart: Chart) -> (f64, f64) {
    match chart {
        Chart::T2 => (PI, 0.0),
        _ => (0.0, 0.0),
    }
}

/// Distance on the flat square torus, taking the nearest periodic image.
pub fn periodic_disc_distance(u: f64, v: f64, center: (f64, f64)) -> f64 {
    let (du, dv) = (u - center.0, v - center.1);
    let mut best = f64::INFINITY;
    for nu in [-1.0, 0.0, 1.0] {
        for nv in [-1.0, 0.0, 1.0] {
            best = best.min((du - TAU * nu).hypot(dv - TAU * nv));
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Zone {
    Bulk,
    Annulus,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainSample {
    pub chart: Chart,
    pub u: f64,
    pub v: f64,
    pub zone: Zone,
}

fn unit() -> Uniform<f64> {
    Uniform::new(0.0, 1.0).expect("unit interval")
}

fn uniform_chart(rng: &mut ChaCha8Rng, genus: u8) -> (f64, f64) {
    let d = unit();
    let u = TAU * d.sample(rng);
    let v = if genus == 0 { PI } else { TAU } * d.sample(rng);
    (u, v)
}

/// Uniform samples over the parameter domain. Genus 2 splits `n` between
/// the charts (first chart takes the odd one) and rejects the discs.
pub fn sample_bulk(
    genus: u8,
    cfg: &SamplerConfig,
    n: usize,
    seed: u64,
    epoch: u64,
) -> Result<Vec<DomainSample>> {
    sample_bulk_stream(genus, cfg, n, stream_rng(seed, epoch, Stream::Bulk))
}

/// [`sample_bulk`] drawing from a caller-supplied stream.
pub fn sample_bulk_stream(
    genus: u8,
    cfg: &SamplerConfig,
    n: usize,
    mut rng: ChaCha8Rng,
) -> Result<Vec<DomainSample>> {
    let mut out = Vec::with_capacity(n);
    if genus < 2 {
        for _ in 0..n {
            let (u, v) = uniform_chart(&mut rng, genus);
            out.push(DomainSample {
                chart: Chart::Main,
                u,
                v,
                zone: Zone::Bulk,
            });
        }
        return Ok(out);
    }
    cfg.validate()?;
    let quota = [n - n / 2, n / 2];
    for (&chart, &want) in [Chart::T1, Chart::T2].iter().zip(&quota) {
        let center = disc_center(chart);
        let (mut accepted, mut tried) = (0usize, 0usize);
        while accepted < want {
            let (u, v) = uniform_chart(&mut rng, genus);
            tried += 1;
            if periodic_disc_distance(u, v, center) > cfg.delta {
                accepted += 1;
                out.push(DomainSample {
                    chart,
                    u,
                    v,
                    zone: Zone::Bulk,
                });
            } else if tried >= 64 && 2 * accepted < tried {
                return Err(Error::Config(format!(
                    "rejection sampler accepted only {accepted} of {tried} draws"
                )));
            }
        }
    }
    Ok(out)
}

/// Uniform in `(r, θ)` over `delta <= r <= alpha * delta` around the
/// chart's disc centre.
pub fn sample_annulus(
    chart: Chart,
    cfg: &SamplerConfig,
    n: usize,
    seed: u64,
    epoch: u64,
) -> Result<Vec<DomainSample>> {
    if chart == Chart::Main {
        return Err(Error::Config("annulus samples exist only on genus-2 charts".into()));
    }
    cfg.validate()?;
    let mut rng = substream_rng(seed, epoch, Stream::Annulus, chart.tag() as u64);
    let d = unit();
    let (cu, cv) = disc_center(chart);
    let span = (cfg.alpha - 1.0) * cfg.delta;
    Ok((0..n)
        .map(|_| {
            let r = cfg.delta + span * d.sample(&mut rng);
            let th = TAU * d.sample(&mut rng);
            DomainSample {
                chart,
                u: (cu + r * th.cos()).rem_euclid(TAU),
                v: (cv + r * th.sin()).rem_euclid(TAU),
                zone: Zone::Annulus,
            }
        })
        .collect())
}

/// Matched points on the two genus-2 charts under the radial reflection
/// `r -> 2δ - r` that swaps the glue annuli.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GluePair {
    pub r: f64,
    pub theta: f64,
    pub delta: f64,
    pub p1: (f64, f64),
    pub p2: (f64, f64),
}

impl GluePair {
    pub fn new(r: f64, theta: f64, delta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let r2 = 2.0 * delta - r;
        GluePair {
            r,
            theta,
            delta,
            p1: ((r * c).rem_euclid(TAU), (r * s).rem_euclid(TAU)),
            p2: ((PI + r2 * c).rem_euclid(TAU), (r2 * s).rem_euclid(TAU)),
        }
    }

    /// Radius of the matched point on the second chart.
    pub fn r2(&self) -> f64 {
        2.0 * self.delta - self.r
    }

    pub fn e_r(&self) -> [f64; 2] {
        [self.theta.cos(), self.theta.sin()]
    }

    pub fn e_theta(&self) -> [f64; 2] {
        [-self.theta.sin(), self.theta.cos()]
    }
}

/// The reflection in polar coordinates about the first chart's disc,
/// returned unreduced in the second chart's coordinates.
pub fn glue_map(r: f64, theta: f64, delta: f64) -> (f64, f64) {
    let r2 = 2.0 * delta - r;
    (PI + r2 * theta.cos(), r2 * theta.sin())
}

pub fn sample_glue_pairs(cfg: &SamplerConfig, n: usize, seed: u64, epoch: u64) -> Result<Vec<GluePair>> {
    cfg.validate()?;
    let mut rng = stream_rng(seed, epoch, Stream::Glue);
    let d = unit();
    let lo = cfg.delta * (1.0 - cfg.glue_width);
    let width = 2.0 * cfg.delta * cfg.glue_width;
    Ok((0..n)
        .map(|_| {
            let r = lo + width * d.sample(&mut rng);
            let theta = TAU * d.sample(&mut rng);
            GluePair::new(r, theta, cfg.delta)
        })
        .collect())
}

/// A seeded permutation of `0..n`.
pub fn shuffled_indices(n: usize, seed: u64, epoch: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream_rng(seed, epoch, Stream::Shuffle));
    idx
}
