//! The trainable immersion: feature jets in, embedding 2-jet out.

mod checkpoint;
pub mod mlp;

use std::fmt;

use ndarray::Array2;

pub use checkpoint::{
    decode, decode_state, encode, encode_state, load_checkpoint, load_state, save_checkpoint, save_state, CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
};
pub use mlp::{forward_generic, init_params, JetBatch, MlpLayout, MlpParams};

use crate::error::{Error, Result};
use crate::features::FeatureMap;
use crate::jet::{Jet2, Real, Tape, Var};

/// An embedding point with its Jacobian and Hessian in `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceJet<T> {
    pub x: Jet2<T>,
    pub y: Jet2<T>,
    pub z: Jet2<T>,
}

impl<T: Real> SurfaceJet<T> {
    fn pick(&self, f: impl Fn(&Jet2<T>) -> T) -> [T; 3] {
        [f(&self.x), f(&self.y), f(&self.z)]
    }

    pub fn point(&self) -> [T; 3] {
        self.pick(|j| j.f)
    }
    pub fn d_u(&self) -> [T; 3] {
        self.pick(|j| j.du)
    }
    pub fn d_v(&self) -> [T; 3] {
        self.pick(|j| j.dv)
    }
    pub fn d_uu(&self) -> [T; 3] {
        self.pick(|j| j.duu)
    }
    pub fn d_uv(&self) -> [T; 3] {
        self.pick(|j| j.duv)
    }
    pub fn d_vv(&self) -> [T; 3] {
        self.pick(|j| j.dvv)
    }

    /// Component-major: `[x slots, y slots, z slots]`, each in
    /// `(f, du, dv, duu, duv, dvv)` order.
    pub fn flat(&self) -> [T; 18] {
        let (x, y, z) = (self.x.slots(), self.y.slots(), self.z.slots());
        std::array::from_fn(|k| match k / 6 {
            0 => x[k % 6],
            1 => y[k % 6],
            _ => z[k % 6],
        })
    }

    pub fn from_flat(v: [T; 18]) -> Self {
        let jet = |c: usize| Jet2::from_slots(std::array::from_fn(|s| v[c * 6 + s]));
        SurfaceJet {
            x: jet(0),
            y: jet(1),
            z: jet(2),
        }
    }

    pub fn values(&self) -> SurfaceJet<f64> {
        SurfaceJet::from_flat(self.flat().map(Real::value))
    }

    pub fn scale(&self, k: f64) -> Self {
        SurfaceJet {
            x: self.x * k,
            y: self.y * k,
            z: self.z * k,
        }
    }

    pub fn translate(&self, offset: [f64; 3]) -> Self {
        SurfaceJet {
            x: self.x + offset[0],
            y: self.y + offset[1],
            z: self.z + offset[2],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.flat().iter().all(|s| s.value().is_finite())
    }
}

impl SurfaceJet<f64> {
    /// Records every slot as an input leaf on `tape`.
    pub fn on_tape<'t>(&self, tape: &'t Tape) -> SurfaceJet<Var<'t>> {
        SurfaceJet::from_flat(self.flat().map(|s| tape.input(s)))
    }

    /// Records every slot as a constant on `tape`.
    pub fn constant_on<'t>(&self, tape: &'t Tape) -> SurfaceJet<Var<'t>> {
        SurfaceJet::from_flat(self.flat().map(|s| tape.constant(s)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    /// The single chart of a genus 0 or 1 model.
    Main,
    /// First punctured torus of the genus-2 model.
    T1,
    /// Second punctured torus of the genus-2 model.
    T2,
}

impl Chart {
    pub fn tag(self) -> u8 {
        match self {
            Chart::Main => 0,
            Chart::T1 => 1,
            Chart::T2 => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Chart> {
        match tag {
            0 => Some(Chart::Main),
            1 => Some(Chart::T1),
            2 => Some(Chart::T2),
            _ => None,
        }
    }

    pub fn for_genus(genus: u8) -> &'static [Chart] {
        if genus == 2 {
            &[Chart::T1, Chart::T2]
        } else {
            &[Chart::Main]
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::Main => "main",
            Chart::T1 => "T1",
            Chart::T2 => "T2",
        })
    }
}

/// One network per chart; genus-2 charts share the architecture only.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceModel {
    genus: u8,
    features: FeatureMap,
    layout: MlpLayout,
    /// Chart blocks back to back, each `layout.param_count()` long.
    params: Vec<f64>,
}

impl SurfaceModel {
    /// `hidden` lists the hidden-layer widths; input and output widths
    /// follow from the feature map and the embedding dimension.
    pub fn new(genus: u8, features: FeatureMap, hidden: &[usize], seed: u64) -> Result<Self> {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(features.len());
        sizes.extend_from_slice(hidden);
        sizes.push(3);
        let charts = Chart::for_genus(genus);
        let mut params = Vec::new();
        let mut layout = None;
        for (k, _) in charts.iter().enumerate() {
            let chart_seed = seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let p = init_params(chart_seed, &sizes)?;
            params.extend_from_slice(&p.values);
            layout = Some(p.layout);
        }
        Self::from_parts(genus, features, layout.expect("at least one chart"), params)
    }

    pub fn from_parts(
        genus: u8,
        features: FeatureMap,
        layout: MlpLayout,
        params: Vec<f64>,
    ) -> Result<Self> {
        if genus > 2 {
            return Err(Error::Config(format!("unsupported genus {genus}")));
        }
        let expect_sphere = genus == 0;
        if matches!(features, FeatureMap::Sphere(_)) != expect_sphere {
            return Err(Error::Config(format!(
                "feature map does not match genus {genus}"
            )));
        }
        if layout.input_dim() != features.len() {
            return Err(Error::Config(format!(
                "network input width {} does not match {} features",
                layout.input_dim(),
                features.len()
            )));
        }
        let n = layout.param_count() * Chart::for_genus(genus).len();
        if params.len() != n {
            return Err(Error::Config(format!(
                "expected {n} parameters, got {}",
                params.len()
            )));
        }
        Ok(SurfaceModel {
            genus,
            features,
            layout,
            params,
        })
    }

    pub fn genus(&self) -> u8 {
        self.genus
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn layout(&self) -> &MlpLayout {
        &self.layout
    }

    pub fn charts(&self) -> &'static [Chart] {
        Chart::for_genus(self.genus)
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn chart_index(&self, chart: Chart) -> Result<usize> {
        match (self.genus, chart) {
            (0 | 1, Chart::Main) => Ok(0),
            (2, Chart::T1) => Ok(0),
            (2, Chart::T2) => Ok(1),
            _ => Err(Error::Config(format!(
                "chart {chart} is not valid for a genus {} model",
                self.genus
            ))),
        }
    }

    /// Range of the flat parameter vector owned by `chart`.
    pub fn chart_range(&self, chart: Chart) -> Result<std::ops::Range<usize>> {
        let k = self.chart_index(chart)?;
        let n = self.layout.param_count();
        Ok(k * n..(k + 1) * n)
    }

    pub fn chart_params(&self, chart: Chart) -> Result<&[f64]> {
        Ok(&self.params[self.chart_range(chart)?])
    }

    /// Single-point evaluation through the scalar route.
    pub fn forward_jet(&self, chart: Chart, u: f64, v: f64) -> Result<SurfaceJet<f64>> {
        let feats = self.features.at(u, v)?;
        let sj = forward_generic(&self.layout, self.chart_params(chart)?, &feats);
        check_finite(&sj)?;
        Ok(sj)
    }

    /// The same evaluation with every weight of `chart` registered on `tape`
    /// (in flat-layout order).
    pub fn forward_on_tape<'t>(
        &self,
        weights: &[Var<'t>],
        u: f64,
        v: f64,
    ) -> Result<SurfaceJet<Var<'t>>> {
        let feats = self.features.at(u, v)?;
        let ctx = weights[0];
        let feats: Vec<_> = feats.iter().map(|j| j.lift(ctx)).collect();
        Ok(forward_generic(&self.layout, weights, &feats))
    }

    pub fn forward_batch(&self, chart: Chart, points: &[(f64, f64)]) -> Result<JetBatch> {
        let params = self.chart_params(chart)?;
        let mut feats = Vec::with_capacity(points.len());
        for &(u, v) in points {
            feats.push(self.features.at(u, v)?);
        }
        let packed: Array2<f64> = mlp::pack_features(&feats, self.layout.input_dim());
        let batch = JetBatch::forward(&self.layout, params, packed);
        for i in 0..batch.len() {
            check_finite(&batch.output(i))?;
        }
        Ok(batch)
    }

    /// Accumulates the chart's weight gradient into the full-model
    /// gradient `grad` (length [`Self::param_count`]).
    pub fn backward_batch(
        &self,
        chart: Chart,
        batch: &JetBatch,
        adjoints: &[[f64; 18]],
        grad: &mut [f64],
    ) -> Result<()> {
        let range = self.chart_range(chart)?;
        batch.backward(
            &self.layout,
            &self.params[range.clone()],
            adjoints,
            &mut grad[range],
        );
        Ok(())
    }
}

fn check_finite(sj: &SurfaceJet<f64>) -> Result<()> {
    if sj.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteValue(format!("network output {sj:?}")))
    }
}
