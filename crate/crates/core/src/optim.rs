//! AdamW, global-norm clipping and the epoch schedules.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::losses::{EffectiveWeights, LossWeights};

/// Rescales `g` in place so its Euclidean norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_gradient(g: &mut [f64], max_norm: f64) -> Result<f64> {
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() {
        let node = g.iter().position(|x| !x.is_finite()).unwrap_or(0);
        return Err(Error::NonFiniteGradient {
            node,
            detail: format!("gradient norm {norm}"),
        });
    }
    if norm > max_norm {
        let s = max_norm / norm;
        g.iter_mut().for_each(|x| *x *= s);
    }
    Ok(norm)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdamW {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    pub step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamW {
    pub fn new(n: usize, weight_decay: f64) -> Self {
        AdamW {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay,
            step: 0,
            m: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    /// Restores a saved state; both moment vectors must have equal length.
    pub fn from_moments(m: Vec<f64>, v: Vec<f64>, step: u64, weight_decay: f64) -> Result<Self> {
        if m.len() != v.len() {
            return Err(Error::Config(format!(
                "moment lengths differ: {} and {}",
                m.len(),
                v.len()
            )));
        }
        Ok(AdamW {
            step,
            m,
            v,
            ..AdamW::new(0, weight_decay)
        })
    }

    pub fn moments(&self) -> (&[f64], &[f64]) {
        (&self.m, &self.v)
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// One bias-corrected step; decay is applied to the weights directly,
    /// not through the moments.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grad.len(), self.m.len());
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - self.beta1.powi(t);
        let bc2 = 1.0 - self.beta2.powi(t);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let mh = self.m[i] / bc1;
            let vh = self.v[i] / bc2;
            params[i] -= lr * self.weight_decay * params[i];
            params[i] -= lr * mh / (vh.sqrt() + self.eps);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LrSchedule {
    Fixed(f64),
    /// Cosine from `max` at epoch 0 to `min` at `epochs`.
    Cosine { max: f64, min: f64, epochs: f64 },
}

pub fn lr_at(s: &LrSchedule, epoch: f64) -> f64 {
    match *s {
        LrSchedule::Fixed(lr) => lr,
        LrSchedule::Cosine { max, min, epochs } => {
            let t = (epoch / epochs).clamp(0.0, 1.0);
            min + 0.5 * (max - min) * (1.0 + (PI * t).cos())
        }
    }
}

/// Linear interpolation from `from` to `to` over `[start, start + width]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ramp {
    pub start: f64,
    pub width: f64,
    pub from: f64,
    pub to: f64,
}

impl Ramp {
    pub fn at(&self, epoch: f64) -> f64 {
        if epoch <= self.start {
            self.from
        } else if self.width <= 0.0 || epoch >= self.start + self.width {
            self.to
        } else {
            self.from + (self.to - self.from) * (epoch - self.start) / self.width
        }
    }
}

/// Annealing of the loss weights. Absent ramps leave the base weight fixed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleConfig {
    pub lr: LrSchedule,
    pub epochs: usize,
    /// `λ_W(t)`.
    pub willmore_warmup: Option<Ramp>,
    /// `α_C1(t)`.
    pub c1_ramp: Option<Ramp>,
    /// `α_C2(t)`.
    pub c2_ramp: Option<Ramp>,
    /// `λ_G(t)`.
    pub glue_decay: Option<Ramp>,
}

impl ScheduleConfig {
    pub fn constant(lr: LrSchedule, epochs: usize) -> Self {
        ScheduleConfig {
            lr,
            epochs,
            willmore_warmup: None,
            c1_ramp: None,
            c2_ramp: None,
            glue_decay: None,
        }
    }

    /// The genus-2 annealing: Willmore warm-up 0.01 -> 1 over `[0, 200]`,
    /// C1 ramp over `[50, 60]`, C2 over `[150, 170]`, then `λ_G` halves by
    /// the final epoch. `scale` compresses every epoch anchor.
    pub fn annealed(lr: LrSchedule, epochs: usize, w: &LossWeights, scale: f64) -> Self {
        let c2_end = 170.0 * scale;
        ScheduleConfig {
            lr,
            epochs,
            willmore_warmup: Some(Ramp {
                start: 0.0,
                width: 200.0 * scale,
                from: 0.01,
                to: w.lambda_w,
            }),
            c1_ramp: Some(Ramp {
                start: 50.0 * scale,
                width: 10.0 * scale,
                from: 0.0,
                to: w.alpha_c1,
            }),
            c2_ramp: Some(Ramp {
                start: 150.0 * scale,
                width: 20.0 * scale,
                from: 0.0,
                to: w.alpha_c2,
            }),
            glue_decay: Some(Ramp {
                start: c2_end,
                width: (epochs as f64 - c2_end).max(0.0),
                from: w.lambda_g,
                to: 0.5 * w.lambda_g,
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("schedule needs at least one epoch".into()));
        }
        if let LrSchedule::Cosine { max, min, epochs } = self.lr {
            if !(min <= max && min >= 0.0 && epochs > 0.0) {
                return Err(Error::Config(format!(
                    "cosine schedule needs 0 <= min <= max and a positive length, got {:?}",
                    self.lr
                )));
            }
        }
        for r in [self.c1_ramp, self.c2_ramp].into_iter().flatten() {
            if r.start >= self.epochs as f64 {
                return Err(Error::Config(format!(
                    "ramp starting at epoch {} never runs in {} epochs",
                    r.start, self.epochs
                )));
            }
        }
        Ok(())
    }
}

pub fn weights_at(s: &ScheduleConfig, w: &LossWeights, epoch: f64) -> EffectiveWeights {
    let at = |r: Option<Ramp>, base: f64| r.map_or(base, |r| r.at(epoch));
    EffectiveWeights {
        lambda_w: at(s.willmore_warmup, w.lambda_w),
        lambda_r: w.lambda_r,
        lambda_g: at(s.glue_decay, w.lambda_g),
        alpha_glue: [w.alpha_c0, at(s.c1_ramp, w.alpha_c1), at(s.c2_ramp, w.alpha_c2)],
    }
}
