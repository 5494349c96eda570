use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use log::{info, warn};

use super::eval::evaluate_with;
use crate::config::TrainConfig;
use crate::error::{Error, Result};
use crate::losses::{BatchGradient, ChartBatch, EffectiveWeights, GenusBatch, LossReport};
use crate::net::{save_state, Chart, SurfaceModel};
use crate::optim::{clip_gradient, lr_at, weights_at, AdamW};
use crate::sampling::{sample_annulus, sample_bulk, sample_glue_pairs, shuffled_indices};

#[derive(Clone, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub lr: f64,
    pub weights: EffectiveWeights,
    /// Means over the epoch's minibatches.
    pub report: LossReport,
    /// Plain-integrand Willmore estimate on the evaluation sample.
    pub eval_w: Option<f64>,
    pub seconds: f64,
    /// The epoch's update was discarded and the last snapshot restored.
    pub rolled_back: bool,
}

impl EpochLog {
    pub const CSV_HEADER: &'static str = "epoch,lr,lambda_w,lambda_r,lambda_g,willmore,willmore_huber,reg_area,reg_pos,reg_smooth,reg_log,glue_c0,glue_c1,glue_c2,total,eval_w,degenerate,seconds";

    /// One CSV row; `seconds` is left empty unless `with_seconds`.
    pub fn csv_row(&self, with_seconds: bool) -> String {
        let r = &self.report;
        let eval = self.eval_w.map(|w| w.to_string()).unwrap_or_default();
        let secs = if with_seconds {
            format!("{:.3}", self.seconds)
        } else {
            String::new()
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.epoch,
            self.lr,
            self.weights.lambda_w,
            self.weights.lambda_r,
            self.weights.lambda_g,
            r.willmore,
            r.willmore_huber,
            r.reg_area,
            r.reg_pos,
            r.reg_smooth,
            r.reg_log,
            r.glue_c0,
            r.glue_c1,
            r.glue_c2,
            r.total,
            eval,
            r.degenerate,
            secs
        )
    }
}

#[derive(Default)]
pub struct TrainOptions<'a> {
    /// Directory for periodic and crash checkpoints.
    pub out_dir: Option<PathBuf>,
    /// Receives the CSV header and one row per epoch as training runs.
    pub csv: Option<&'a mut dyn Write>,
    /// Optimizer state to continue from, usually the one left by
    /// pretraining. A fresh AdamW when absent.
    pub optimizer: Option<AdamW>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: SurfaceModel,
    pub logs: Vec<EpochLog>,
    pub rollbacks: usize,
    pub optimizer: AdamW,
}

impl TrainOutcome {
    /// The last logged evaluation, if any.
    pub fn final_eval(&self) -> Option<f64> {
        self.logs.iter().rev().find_map(|l| l.eval_w)
    }
}

fn crash_worthy(e: &Error) -> bool {
    matches!(
        e,
        Error::AllDegenerate(_) | Error::NonFiniteGradient { .. } | Error::NonFiniteValue(_)
    )
}

fn csv_err(e: std::io::Error) -> Error {
    Error::io("<training log>", e)
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Splits the epoch's samples into per-batch chart groups.
struct EpochData {
    bulk: Vec<crate::sampling::DomainSample>,
    order: Vec<usize>,
    annulus: Vec<Vec<(f64, f64)>>,
    pairs: Vec<crate::sampling::GluePair>,
}

impl EpochData {
    fn draw(cfg: &TrainConfig, epoch: u64, n_batches: usize) -> Result<Self> {
        let bulk = sample_bulk(cfg.genus, &cfg.sampler, cfg.points, cfg.seed, epoch)?;
        let order = shuffled_indices(bulk.len(), cfg.seed, epoch);
        let (ann, glue) = cfg.side_counts(cfg.batch);
        let mut annulus = Vec::new();
        let mut pairs = Vec::new();
        if cfg.genus == 2 {
            for chart in [Chart::T1, Chart::T2] {
                annulus.push(
                    sample_annulus(chart, &cfg.sampler, ann * n_batches, cfg.seed, epoch)?
                        .iter()
                        .map(|s| (s.u, s.v))
                        .collect(),
                );
            }
            pairs = sample_glue_pairs(&cfg.sampler, glue * n_batches, cfg.seed, epoch)?;
        }
        Ok(EpochData {
            bulk,
            order,
            annulus,
            pairs,
        })
    }

    fn batch(&self, cfg: &TrainConfig, b: usize) -> GenusBatch {
        let lo = b * cfg.batch;
        let hi = ((b + 1) * cfg.batch).min(self.order.len());
        let charts = Chart::for_genus(cfg.genus);
        let (ann, glue) = cfg.side_counts(cfg.batch);
        let pairs = if cfg.genus == 2 {
            self.pairs[b * glue..(b + 1) * glue].to_vec()
        } else {
            Vec::new()
        };
        let batches = charts
            .iter()
            .enumerate()
            .map(|(k, &chart)| {
                let bulk = self.order[lo..hi]
                    .iter()
                    .map(|&i| self.bulk[i])
                    .filter(|s| s.chart == chart)
                    .map(|s| (s.u, s.v))
                    .collect();
                if cfg.genus != 2 {
                    return ChartBatch {
                        bulk,
                        ..ChartBatch::default()
                    };
                }
                ChartBatch {
                    bulk,
                    annulus: self.annulus[k][b * ann..(b + 1) * ann].to_vec(),
                    glue: pairs
                        .iter()
                        .map(|p| if chart == Chart::T1 { p.p1 } else { p.p2 })
                        .collect(),
                }
            })
            .collect();
        GenusBatch {
            genus: cfg.genus,
            delta: cfg.sampler.delta,
            charts: batches,
            pairs,
        }
    }
}

/// Runs the main training loop on `model`.
pub fn train(cfg: &TrainConfig, model: SurfaceModel, mut opts: TrainOptions<'_>) -> Result<TrainOutcome> {
    cfg.validate()?;
    if model.genus() != cfg.genus {
        return Err(Error::Config(format!(
            "checkpoint is genus {}, config is genus {}",
            model.genus(),
            cfg.genus
        )));
    }
    if let Some(dir) = &opts.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    if let Some(w) = opts.csv.as_deref_mut() {
        writeln!(w, "{}", EpochLog::CSV_HEADER).map_err(csv_err)?;
    }
    let schedule = cfg.schedule();
    let mut model = model;
    let mut opt = match opts.optimizer.take() {
        Some(o) if o.len() != model.param_count() => {
            return Err(Error::Config(format!(
                "optimizer state has {} entries, model has {} parameters",
                o.len(),
                model.param_count()
            )))
        }
        Some(o) => o,
        None => AdamW::new(model.param_count(), cfg.weight_decay),
    };
    let mut snapshot = (model.clone(), opt.clone());
    let mut reg_history: Vec<f64> = Vec::new();
    let mut logs = Vec::with_capacity(cfg.epochs);
    let mut rollbacks = 0;
    let n_batches = cfg.points.div_ceil(cfg.batch);
    for epoch in 0..cfg.epochs {
        let start = Instant::now();
        let eff = weights_at(&schedule, &cfg.weights, epoch as f64);
        let lr = lr_at(&schedule.lr, epoch as f64);
        let data = EpochData::draw(cfg, epoch as u64, n_batches)?;
        let mut report = LossReport::default();
        for b in 0..n_batches {
            let batch = data.batch(cfg, b);
            let step = BatchGradient::training(&model, &batch, &cfg.weights, &eff).and_then(|mut g| {
                clip_gradient(&mut g.gradient, cfg.clip)?;
                Ok(g)
            });
            let g = match step {
                Ok(g) => g,
                Err(e) => {
                    if crash_worthy(&e) {
                        if let Some(dir) = &opts.out_dir {
                            let path = dir.join("crash.wfnn");
                            save_state(&model, &opt, &path)?;
                            warn!("epoch {epoch} batch {b}: {e}; crash checkpoint at {}", path.display());
                        }
                    }
                    return Err(e);
                }
            };
            opt.step(model.params_mut(), &g.gradient, lr);
            report.accumulate(&g.report, 1.0 / n_batches as f64);
        }
        let mut rolled_back = false;
        if cfg.rollback && reg_history.len() >= 10 {
            let tail = &reg_history[reg_history.len().saturating_sub(cfg.rollback_window)..];
            let ceiling = cfg.rollback_factor * median(tail);
            if report.regularity > ceiling && report.regularity > 1e-12 {
                warn!(
                    "epoch {epoch}: regularity {:.3e} above ceiling {ceiling:.3e}, restoring snapshot",
                    report.regularity
                );
                model = snapshot.0.clone();
                opt = snapshot.1.clone();
                rolled_back = true;
                rollbacks += 1;
            }
        }
        if !rolled_back {
            reg_history.push(report.regularity);
            let every = cfg.checkpoint_every;
            if every == 0 || (epoch + 1) % every == 0 {
                snapshot = (model.clone(), opt.clone());
                if let (Some(dir), true) = (&opts.out_dir, every > 0) {
                    save_state(&model, &opt, dir.join(format!("epoch_{:05}.wfnn", epoch + 1)))?;
                }
            }
        }
        let last = epoch + 1 == cfg.epochs;
        let eval_w = if (epoch + 1) % cfg.eval_every == 0 || last {
            Some(evaluate_with(&model, cfg, cfg.seed)?.willmore)
        } else {
            None
        };
        let log = EpochLog {
            epoch,
            lr,
            weights: eff,
            report,
            eval_w,
            seconds: start.elapsed().as_secs_f64(),
            rolled_back,
        };
        info!(
            "epoch {epoch}: W {:.4} reg {:.3e} glue {:.3e} total {:.4e}{}",
            report.willmore,
            report.regularity,
            report.gluing,
            report.total,
            eval_w.map(|w| format!(" eval {w:.4}")).unwrap_or_default()
        );
        if let Some(w) = opts.csv.as_deref_mut() {
            writeln!(w, "{}", log.csv_row(cfg.log_seconds)).map_err(csv_err)?;
        }
        logs.push(log);
    }
    Ok(TrainOutcome {
        model,
        logs,
        rollbacks,
        optimizer: opt,
    })
}
