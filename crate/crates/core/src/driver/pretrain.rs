use log::info;
use rand::seq::SliceRandom;

use crate::config::TrainConfig;
use crate::error::Result;
use crate::losses::BatchGradient;
use crate::net::{Chart, SurfaceJet, SurfaceModel};
use crate::optim::{clip_gradient, lr_at, AdamW, LrSchedule};
use crate::sampling::{sample_bulk_stream, substream_rng, Stream};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PretrainReport {
    pub epochs: usize,
    /// Mean pretraining loss over the last epoch.
    pub final_loss: f64,
    /// Positional RMSE against the reference on fresh points.
    pub rmse: f64,
}

/// Uniform points over each whole chart, discs included: the reference
/// is defined everywhere and fitting it there keeps the neck region tame.
fn pretrain_points(cfg: &TrainConfig, n: usize, rng: rand_chacha::ChaCha8Rng) -> Result<Vec<Vec<(f64, f64)>>> {
    let g = cfg.genus.min(1);
    let pts: Vec<(f64, f64)> = sample_bulk_stream(g, &cfg.sampler, n, rng)?
        .iter()
        .map(|s| (s.u, s.v))
        .collect();
    Ok(if cfg.genus == 2 {
        let half = n - n / 2;
        vec![pts[..half].to_vec(), pts[half..].to_vec()]
    } else {
        vec![pts]
    })
}

fn reference_jets(cfg: &TrainConfig, chart: Chart, pts: &[(f64, f64)]) -> Result<Vec<SurfaceJet<f64>>> {
    let r = cfg.reference();
    pts.iter().map(|&(u, v)| r.reference_jet(chart, u, v)).collect()
}

/// Positional RMSE of `model` against the configured reference.
pub fn reference_rmse(model: &SurfaceModel, cfg: &TrainConfig, n: usize, seed: u64) -> Result<f64> {
    let charts = pretrain_points(cfg, n, substream_rng(seed, 0, Stream::Eval, 3))?;
    let (mut sum, mut count) = (0.0, 0usize);
    for (&chart, pts) in model.charts().iter().zip(&charts) {
        let refs = reference_jets(cfg, chart, pts)?;
        let pred = model.forward_batch(chart, pts)?.outputs();
        for (p, r) in pred.iter().zip(&refs) {
            let (a, b) = (p.point(), r.point());
            sum += (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>();
            count += 1;
        }
    }
    Ok((sum / count as f64).sqrt())
}

#[derive(Clone, Debug)]
pub struct Pretrained {
    pub model: SurfaceModel,
    /// Carried into the main training so its first steps start from
    /// settled moment estimates.
    pub optimizer: AdamW,
    pub report: PretrainReport,
}

/// Fits a fresh model to the closed-form reference of `cfg`.
pub fn pretrain(cfg: &TrainConfig) -> Result<Pretrained> {
    cfg.validate()?;
    let mut model = SurfaceModel::new(cfg.genus, cfg.features()?, &cfg.layers, cfg.seed)?;
    let mut optimizer = AdamW::new(model.param_count(), cfg.weight_decay);
    let report = pretrain_with(&mut model, cfg, &mut optimizer)?;
    Ok(Pretrained {
        model,
        optimizer,
        report,
    })
}

/// Runs the pretraining epochs on an existing model.
pub fn pretrain_model(model: &mut SurfaceModel, cfg: &TrainConfig) -> Result<PretrainReport> {
    let mut opt = AdamW::new(model.param_count(), cfg.weight_decay);
    pretrain_with(model, cfg, &mut opt)
}

/// As [`pretrain_model`], stepping the given optimizer.
pub fn pretrain_with(model: &mut SurfaceModel, cfg: &TrainConfig, opt: &mut AdamW) -> Result<PretrainReport> {
    let schedule = LrSchedule::Cosine {
        max: cfg.pretrain_lr,
        min: 0.01 * cfg.pretrain_lr,
        epochs: cfg.pretrain_epochs as f64,
    };
    let mut final_loss = f64::NAN;
    for epoch in 0..cfg.pretrain_epochs {
        let e = epoch as u64;
        let lr = lr_at(&schedule, epoch as f64);
        let beta2 = if cfg.beta2_ramp > 0 {
            cfg.beta2 * (epoch as f64 / cfg.beta2_ramp as f64).min(1.0)
        } else {
            cfg.beta2
        };
        let charts = pretrain_points(cfg, cfg.pretrain_points, substream_rng(cfg.seed, e, Stream::Pretrain, 0))?;
        let mut rng = substream_rng(cfg.seed, e, Stream::Shuffle, 1);
        let mut shuffled = charts;
        for c in &mut shuffled {
            c.shuffle(&mut rng);
        }
        let nc = shuffled.len();
        let per_chart = cfg.pretrain_batch.div_ceil(nc);
        let n_batches = shuffled[0].len().div_ceil(per_chart);
        let mut epoch_loss = 0.0;
        for b in 0..n_batches {
            let mut pts = Vec::with_capacity(nc);
            let mut refs = Vec::with_capacity(nc);
            for (&chart, c) in model.charts().iter().zip(&shuffled) {
                let lo = (b * per_chart).min(c.len());
                let hi = ((b + 1) * per_chart).min(c.len());
                refs.push(reference_jets(cfg, chart, &c[lo..hi])?);
                pts.push(c[lo..hi].to_vec());
            }
            if pts.iter().any(|p| p.is_empty()) {
                continue;
            }
            let (loss, mut grad) = BatchGradient::pretraining(model, &pts, &refs, cfg.beta1, beta2)?;
            clip_gradient(&mut grad, cfg.clip)?;
            opt.step(model.params_mut(), &grad, lr);
            epoch_loss += loss / n_batches as f64;
        }
        info!("pretrain epoch {epoch}: loss {epoch_loss:.6e} lr {lr:.3e}");
        final_loss = epoch_loss;
    }
    let rmse = reference_rmse(model, cfg, 2000, cfg.seed)?;
    info!("pretraining done: positional RMSE {rmse:.4e}");
    Ok(PretrainReport {
        epochs: cfg.pretrain_epochs,
        final_loss,
        rmse,
    })
}
