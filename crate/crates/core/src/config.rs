//! Run configuration and its flat `key=value` text form.
//!
//! Blank lines and `#` comments are ignored. `genus` picks the defaults and
//! is applied before any other key, wherever it appears.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::features::FeatureMap;
use crate::geometry::ReferenceSurface;
use crate::losses::LossWeights;
use crate::optim::{LrSchedule, ScheduleConfig};
use crate::sampling::SamplerConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LrMode {
    Fixed,
    Cosine,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub genus: u8,
    pub seed: u64,
    pub sh_degree: usize,
    pub fourier_modes: usize,
    /// Hidden layer widths.
    pub layers: Vec<usize>,
    pub ellipsoid: [f64; 3],
    pub tau: Complex64,
    pub tau1: Complex64,
    pub tau2: Complex64,
    pub shift: f64,
    pub sampler: SamplerConfig,
    pub weights: LossWeights,
    pub lr_mode: LrMode,
    pub lr_value: f64,
    pub lr_max: f64,
    pub lr_min: f64,
    /// Genus-2 weight annealing on or off.
    pub anneal: bool,
    /// Multiplies every annealing epoch anchor.
    pub anneal_scale: f64,
    pub epochs: usize,
    pub points: usize,
    pub batch: usize,
    /// Annulus and glue sample counts relative to the bulk batch.
    pub annulus_fraction: f64,
    pub glue_fraction: f64,
    pub pretrain_epochs: usize,
    pub pretrain_points: usize,
    pub pretrain_batch: usize,
    pub pretrain_lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Epochs over which `β2` ramps up from zero; 0 keeps it constant.
    pub beta2_ramp: usize,
    pub eval_samples: usize,
    pub eval_every: usize,
    pub clip: f64,
    pub weight_decay: f64,
    pub rollback: bool,
    pub rollback_factor: f64,
    pub rollback_window: usize,
    pub checkpoint_every: usize,
    /// Whether the CSV log carries wall-clock seconds (which breaks
    /// byte-identical reruns).
    pub log_seconds: bool,
}

impl TrainConfig {
    pub fn for_genus(genus: u8) -> Result<Self> {
        if genus > 2 {
            return Err(Error::Config(format!("genus must be 0, 1 or 2, got {genus}")));
        }
        let (epochs, points, batch) = match genus {
            0 => (30, 1000, 100),
            1 => (200, 4000, 400),
            _ => (2000, 5000, 1000),
        };
        let (lr_mode, lr_max, lr_min) = match genus {
            0 => (LrMode::Fixed, 0.003, 0.003),
            1 => (LrMode::Cosine, 3e-5, 1e-8),
            _ => (LrMode::Cosine, 2e-4, 1e-6),
        };
        Ok(TrainConfig {
            genus,
            seed: 0,
            sh_degree: 2,
            fourier_modes: if genus == 2 { 6 } else { 2 },
            layers: if genus == 2 {
                vec![128, 256, 512, 256, 128]
            } else {
                vec![64, 128, 128, 64]
            },
            ellipsoid: [2.0, 1.0, 0.5],
            tau: Complex64::new(0.0, 0.1),
            tau1: Complex64::new(0.0, 0.7),
            tau2: Complex64::new(0.0, 0.7),
            shift: 1.0,
            sampler: SamplerConfig::default(),
            weights: LossWeights::for_genus(genus),
            lr_mode,
            lr_value: lr_max,
            lr_max,
            lr_min,
            anneal: genus == 2,
            anneal_scale: 1.0,
            epochs,
            points,
            batch,
            annulus_fraction: 0.25,
            glue_fraction: 0.25,
            pretrain_epochs: if genus == 2 { 200 } else { 20 },
            pretrain_points: 4096,
            pretrain_batch: 512,
            pretrain_lr: 1e-2,
            beta1: 1.0,
            beta2: 1.0,
            beta2_ramp: 0,
            eval_samples: 5000,
            eval_every: if genus == 2 { 25 } else { 1 },
            clip: 1.0,
            weight_decay: 1e-5,
            rollback: false,
            rollback_factor: 10.0,
            rollback_window: 100,
            checkpoint_every: 0,
            log_seconds: false,
        })
    }

    pub fn features(&self) -> Result<FeatureMap> {
        FeatureMap::for_genus(self.genus, self.sh_degree, self.fourier_modes)
    }

    pub fn reference(&self) -> ReferenceSurface {
        match self.genus {
            0 => {
                let [a, b, c] = self.ellipsoid;
                ReferenceSurface::Ellipsoid { a, b, c }
            }
            1 => ReferenceSurface::Torus { tau: self.tau },
            _ => ReferenceSurface::TwoTori {
                tau1: self.tau1,
                tau2: self.tau2,
                delta: self.sampler.delta,
                shift: self.shift,
            },
        }
    }

    pub fn lr_schedule(&self) -> LrSchedule {
        match self.lr_mode {
            LrMode::Fixed => LrSchedule::Fixed(self.lr_value),
            LrMode::Cosine => LrSchedule::Cosine {
                max: self.lr_max,
                min: self.lr_min,
                epochs: self.epochs as f64,
            },
        }
    }

    pub fn schedule(&self) -> ScheduleConfig {
        if self.anneal {
            ScheduleConfig::annealed(self.lr_schedule(), self.epochs, &self.weights, self.anneal_scale)
        } else {
            ScheduleConfig::constant(self.lr_schedule(), self.epochs)
        }
    }

    /// Annulus samples per chart and glue pairs for one bulk batch.
    pub fn side_counts(&self, bulk: usize) -> (usize, usize) {
        if self.genus != 2 {
            return (0, 0);
        }
        let per_chart = bulk.div_ceil(2);
        (
            (self.annulus_fraction * per_chart as f64).round() as usize,
            (self.glue_fraction * bulk as f64).round() as usize,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.features()?;
        self.reference().validate()?;
        self.sampler.validate()?;
        self.weights.validate()?;
        self.schedule().validate()?;
        if self.layers.is_empty() || self.layers.contains(&0) {
            return bad(format!("hidden layers must be nonempty and positive: {:?}", self.layers));
        }
        for (name, n) in [
            ("train.epochs", self.epochs),
            ("train.points", self.points),
            ("train.batch", self.batch),
            ("pretrain.epochs", self.pretrain_epochs),
            ("pretrain.points", self.pretrain_points),
            ("pretrain.batch", self.pretrain_batch),
            ("eval.samples", self.eval_samples),
            ("eval.every", self.eval_every),
        ] {
            if n == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.batch > self.points || self.pretrain_batch > self.pretrain_points {
            return bad("batch size exceeds the points per epoch".into());
        }
        if self.genus == 2 && self.batch < 2 {
            return bad("genus 2 needs at least one bulk point per chart".into());
        }
        if !(self.clip > 0.0) || !(self.weight_decay >= 0.0) || !(self.pretrain_lr > 0.0) {
            return bad("clip, weight decay and pretraining lr must be positive".into());
        }
        if !(self.annulus_fraction >= 0.0 && self.glue_fraction >= 0.0) {
            return bad("sample fractions must be nonnegative".into());
        }
        Ok(())
    }

    pub fn from_text(text: &str, genus_override: Option<u8>) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut genus = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got {raw:?}", lineno + 1))
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k == "genus" {
                genus = Some(parse::<u8>(k, v)?);
            } else {
                pairs.push((k.to_string(), v.to_string()));
            }
        }
        let genus = genus_override.or(genus).unwrap_or(0);
        let mut cfg = TrainConfig::for_genus(genus)?;
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>, genus_override: Option<u8>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, genus_override)
    }

    /// Sets one key. `genus` cannot be changed this way since it selects
    /// every other default.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let w = &mut self.weights;
        match key {
            "seed" => self.seed = parse(key, v)?,
            "features.sh_degree" => self.sh_degree = parse(key, v)?,
            "features.fourier_modes" => self.fourier_modes = parse(key, v)?,
            "layers" => {
                self.layers = v
                    .split(',')
                    .map(|s| parse(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "ref.a" => self.ellipsoid[0] = parse(key, v)?,
            "ref.b" => self.ellipsoid[1] = parse(key, v)?,
            "ref.c" => self.ellipsoid[2] = parse(key, v)?,
            "tau" => self.tau = parse(key, v)?,
            "tau1" => self.tau1 = parse(key, v)?,
            "tau2" => self.tau2 = parse(key, v)?,
            "ref.shift" => self.shift = parse(key, v)?,
            "glue.delta" => self.sampler.delta = parse(key, v)?,
            "glue.alpha" => self.sampler.alpha = parse(key, v)?,
            "glue.width" => self.sampler.glue_width = parse(key, v)?,
            "lambda.w" => w.lambda_w = parse(key, v)?,
            "lambda.r" => w.lambda_r = parse(key, v)?,
            "lambda.g" => w.lambda_g = parse(key, v)?,
            "alpha.area" => w.alpha_area = parse(key, v)?,
            "alpha.pos" => w.alpha_pos = parse(key, v)?,
            "alpha.smooth" => w.alpha_smooth = parse(key, v)?,
            "alpha.log" => w.alpha_log = parse(key, v)?,
            "alpha.c0" => w.alpha_c0 = parse(key, v)?,
            "alpha.c1" => w.alpha_c1 = parse(key, v)?,
            "alpha.c2" => w.alpha_c2 = parse(key, v)?,
            "reg.a_min" => w.a_min = parse(key, v)?,
            "reg.eps_pos" => w.eps_pos = parse(key, v)?,
            "reg.g_max" => w.g_max = parse(key, v)?,
            "reg.annulus_weight" => w.annulus_weight = parse(key, v)?,
            "reg.log_barrier" => w.log_barrier = parse(key, v)?,
            "huber" => w.huber = parse(key, v)?,
            "huber.factor" => w.huber_factor = parse(key, v)?,
            "lr.mode" => {
                self.lr_mode = match v {
                    "fixed" => LrMode::Fixed,
                    "cosine" => LrMode::Cosine,
                    _ => return Err(Error::Config(format!("lr.mode must be fixed or cosine, got {v:?}"))),
                }
            }
            "lr.value" => self.lr_value = parse(key, v)?,
            "lr.max" => self.lr_max = parse(key, v)?,
            "lr.min" => self.lr_min = parse(key, v)?,
            "anneal" => self.anneal = parse(key, v)?,
            "anneal.scale" => self.anneal_scale = parse(key, v)?,
            "train.epochs" => self.epochs = parse(key, v)?,
            "train.points" => self.points = parse(key, v)?,
            "train.batch" => self.batch = parse(key, v)?,
            "train.annulus_fraction" => self.annulus_fraction = parse(key, v)?,
            "train.glue_fraction" => self.glue_fraction = parse(key, v)?,
            "pretrain.epochs" => self.pretrain_epochs = parse(key, v)?,
            "pretrain.points" => self.pretrain_points = parse(key, v)?,
            "pretrain.batch" => self.pretrain_batch = parse(key, v)?,
            "pretrain.lr" => self.pretrain_lr = parse(key, v)?,
            "pretrain.beta1" => self.beta1 = parse(key, v)?,
            "pretrain.beta2" => self.beta2 = parse(key, v)?,
            "pretrain.beta2_ramp" => self.beta2_ramp = parse(key, v)?,
            "eval.samples" => self.eval_samples = parse(key, v)?,
            "eval.every" => self.eval_every = parse(key, v)?,
            "optim.clip" => self.clip = parse(key, v)?,
            "optim.weight_decay" => self.weight_decay = parse(key, v)?,
            "rollback" => self.rollback = parse(key, v)?,
            "rollback.factor" => self.rollback_factor = parse(key, v)?,
            "rollback.window" => self.rollback_window = parse(key, v)?,
            "checkpoint.every" => self.checkpoint_every = parse(key, v)?,
            "log.seconds" => self.log_seconds = parse(key, v)?,
            "genus" => {
                return Err(Error::Config("genus selects the defaults and cannot be set here".into()))
            }
            _ => return Err(Error::Config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse()
        .map_err(|e| Error::Config(format!("{key}: cannot parse {v:?}: {e}")))
}

impl fmt::Display for TrainConfig {
    /// Every key, in a form [`TrainConfig::from_text`] reads back exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = &self.weights;
        let layers: Vec<String> = self.layers.iter().map(|l| l.to_string()).collect();
        let mode = match self.lr_mode {
            LrMode::Fixed => "fixed",
            LrMode::Cosine => "cosine",
        };
        let c = |z: Complex64| format!("{}{:+}i", z.re, z.im);
        writeln!(f, "genus={}", self.genus)?;
        writeln!(f, "seed={}", self.seed)?;
        writeln!(f, "features.sh_degree={}", self.sh_degree)?;
        writeln!(f, "features.fourier_modes={}", self.fourier_modes)?;
        writeln!(f, "layers={}", layers.join(","))?;
        writeln!(f, "ref.a={}", self.ellipsoid[0])?;
        writeln!(f, "ref.b={}", self.ellipsoid[1])?;
        writeln!(f, "ref.c={}", self.ellipsoid[2])?;
        writeln!(f, "tau={}", c(self.tau))?;
        writeln!(f, "tau1={}", c(self.tau1))?;
        writeln!(f, "tau2={}", c(self.tau2))?;
        writeln!(f, "ref.shift={}", self.shift)?;
        writeln!(f, "glue.delta={}", self.sampler.delta)?;
        writeln!(f, "glue.alpha={}", self.sampler.alpha)?;
        writeln!(f, "glue.width={}", self.sampler.glue_width)?;
        writeln!(f, "lambda.w={}", w.lambda_w)?;
        writeln!(f, "lambda.r={}", w.lambda_r)?;
        writeln!(f, "lambda.g={}", w.lambda_g)?;
        writeln!(f, "alpha.area={}", w.alpha_area)?;
        writeln!(f, "alpha.pos={}", w.alpha_pos)?;
        writeln!(f, "alpha.smooth={}", w.alpha_smooth)?;
        writeln!(f, "alpha.log={}", w.alpha_log)?;
        writeln!(f, "alpha.c0={}", w.alpha_c0)?;
        writeln!(f, "alpha.c1={}", w.alpha_c1)?;
        writeln!(f, "alpha.c2={}", w.alpha_c2)?;
        writeln!(f, "reg.a_min={}", w.a_min)?;
        writeln!(f, "reg.eps_pos={}", w.eps_pos)?;
        writeln!(f, "reg.g_max={}", w.g_max)?;
        writeln!(f, "reg.annulus_weight={}", w.annulus_weight)?;
        writeln!(f, "reg.log_barrier={}", w.log_barrier)?;
        writeln!(f, "huber={}", w.huber)?;
        writeln!(f, "huber.factor={}", w.huber_factor)?;
        writeln!(f, "lr.mode={mode}")?;
        writeln!(f, "lr.value={}", self.lr_value)?;
        writeln!(f, "lr.max={}", self.lr_max)?;
        writeln!(f, "lr.min={}", self.lr_min)?;
        writeln!(f, "anneal={}", self.anneal)?;
        writeln!(f, "anneal.scale={}", self.anneal_scale)?;
        writeln!(f, "train.epochs={}", self.epochs)?;
        writeln!(f, "train.points={}", self.points)?;
        writeln!(f, "train.batch={}", self.batch)?;
        writeln!(f, "train.annulus_fraction={}", self.annulus_fraction)?;
        writeln!(f, "train.glue_fraction={}", self.glue_fraction)?;
        writeln!(f, "pretrain.epochs={}", self.pretrain_epochs)?;
        writeln!(f, "pretrain.points={}", self.pretrain_points)?;
        writeln!(f, "pretrain.batch={}", self.pretrain_batch)?;
        writeln!(f, "pretrain.lr={}", self.pretrain_lr)?;
        writeln!(f, "pretrain.beta1={}", self.beta1)?;
        writeln!(f, "pretrain.beta2={}", self.beta2)?;
        writeln!(f, "pretrain.beta2_ramp={}", self.beta2_ramp)?;
        writeln!(f, "eval.samples={}", self.eval_samples)?;
        writeln!(f, "eval.every={}", self.eval_every)?;
        writeln!(f, "optim.clip={}", self.clip)?;
        writeln!(f, "optim.weight_decay={}", self.weight_decay)?;
        writeln!(f, "rollback={}", self.rollback)?;
        writeln!(f, "rollback.factor={}", self.rollback_factor)?;
        writeln!(f, "rollback.window={}", self.rollback_window)?;
        writeln!(f, "checkpoint.every={}", self.checkpoint_every)?;
        writeln!(f, "log.seconds={}", self.log_seconds)
    }
}
