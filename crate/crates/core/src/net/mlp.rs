//! Fully connected tanh network propagating 2-jets.
//!
//! Two evaluation routes share one parameter layout:
//!
//! * [`forward_generic`] runs on any [`Real`] scalar. With `f64` it is the
//!   plain reference evaluation; with tape [`Var`](crate::jet::Var)s every
//!   weight is a registered parameter and the whole jet is differentiable.
//! * [`JetBatch`] stacks the six jet slots of a whole batch into matrices so
//!   each layer is one matrix product, with a hand-written adjoint pass that
//!   turns output-slot adjoints into weight gradients.
//!
//! Layout of the flat parameter vector, per layer in order: the weight
//! matrix row-major `(out, in)`, then the bias `(out)`.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array2, ArrayView1, ArrayView2, ArrayViewMut2, Axis};
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SurfaceJet;
use crate::error::{Error, Result};
use crate::jet::{Jet2, Real};

/// Number of jet slots per scalar.
pub const SLOTS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MlpLayout {
    sizes: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct LayerSpan {
    pub fan_in: usize,
    pub fan_out: usize,
    pub weight: usize,
    pub bias: usize,
}

impl MlpLayout {
    /// `sizes` runs from the feature count to the output width 3.
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::Config("a network needs at least two layer sizes".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::Config(format!("zero-width layer in {sizes:?}")));
        }
        if *sizes.last().unwrap() != 3 {
            return Err(Error::Config(format!(
                "network output width must be 3, got {sizes:?}"
            )));
        }
        Ok(MlpLayout { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn param_count(&self) -> usize {
        self.sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn layers(&self) -> Vec<LayerSpan> {
        let mut off = 0;
        self.sizes
            .windows(2)
            .map(|w| {
                let span = LayerSpan {
                    fan_in: w[0],
                    fan_out: w[1],
                    weight: off,
                    bias: off + w[0] * w[1],
                };
                off += w[0] * w[1] + w[1];
                span
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpParams {
    pub layout: MlpLayout,
    pub values: Vec<f64>,
}

/// Glorot-uniform weights `U(±√(6/(fan_in+fan_out)))`, zero biases.
pub fn init_params(seed: u64, sizes: &[usize]) -> Result<MlpParams> {
    let layout = MlpLayout::new(sizes.to_vec())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; layout.param_count()];
    for span in layout.layers() {
        let limit = (6.0 / (span.fan_in + span.fan_out) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit).expect("finite bounds");
        for w in &mut values[span.weight..span.bias] {
            *w = dist.sample(&mut rng);
        }
    }
    Ok(MlpParams { layout, values })
}

/// Scalar-by-scalar jet propagation; see the module docs.
pub fn forward_generic<T: Real>(
    layout: &MlpLayout,
    params: &[T],
    features: &[Jet2<T>],
) -> SurfaceJet<T> {
    assert_eq!(params.len(), layout.param_count());
    assert_eq!(features.len(), layout.input_dim());
    let spans = layout.layers();
    let mut act: Vec<Jet2<T>> = features.to_vec();
    for (li, span) in spans.iter().enumerate() {
        let last = li + 1 == spans.len();
        let mut next = Vec::with_capacity(span.fan_out);
        for o in 0..span.fan_out {
            let row = &params[span.weight + o * span.fan_in..span.weight + (o + 1) * span.fan_in];
            let mut z = Jet2::constant(params[span.bias + o]);
            for (w, a) in row.iter().zip(&act) {
                z = z + a.scale(*w);
            }
            next.push(if last { z } else { z.tanh() });
        }
        act = next;
    }
    SurfaceJet {
        x: act[0],
        y: act[1],
        z: act[2],
    }
}

/// Packs per-point feature jets into the slot-major `(6B, in)` layout used
/// by [`JetBatch`]: row `s * B + i` holds slot `s` of point `i`.
pub fn pack_features(features: &[Vec<Jet2<f64>>], dim: usize) -> Array2<f64> {
    let b = features.len();
    let mut m = Array2::zeros((SLOTS * b, dim));
    for (i, feat) in features.iter().enumerate() {
        assert_eq!(feat.len(), dim);
        for (j, jet) in feat.iter().enumerate() {
            for (s, val) in jet.slots().into_iter().enumerate() {
                m[[s * b + i, j]] = val;
            }
        }
    }
    m
}

/// A batched forward pass retaining what the adjoint pass needs.
#[derive(Clone, Debug)]
pub struct JetBatch {
    points: usize,
    /// Input to each layer, `(6B, fan_in)`.
    inputs: Vec<Array2<f64>>,
    /// Pre-activations of each layer, `(6B, fan_out)`.
    pre: Vec<Array2<f64>>,
    output: Array2<f64>,
}

fn weight_view<'a>(params: &'a [f64], span: &LayerSpan) -> ArrayView2<'a, f64> {
    ArrayView2::from_shape((span.fan_out, span.fan_in), &params[span.weight..span.bias])
        .expect("layout matches parameter vector")
}

fn bias_view<'a>(params: &'a [f64], span: &LayerSpan) -> ArrayView1<'a, f64> {
    ArrayView1::from(&params[span.bias..span.bias + span.fan_out])
}

/// Elementwise tanh on stacked jets, slot blocks of `b` rows each.
fn tanh_jet(z: &Array2<f64>, b: usize) -> Array2<f64> {
    let mut a = Array2::zeros(z.raw_dim());
    let width = z.ncols();
    for i in 0..b {
        for j in 0..width {
            let (zf, zu, zv) = (z[[i, j]], z[[b + i, j]], z[[2 * b + i, j]]);
            let (zuu, zuv, zvv) = (z[[3 * b + i, j]], z[[4 * b + i, j]], z[[5 * b + i, j]]);
            let t = zf.tanh();
            let s = 1.0 - t * t;
            let g = -2.0 * t * s;
            a[[i, j]] = t;
            a[[b + i, j]] = s * zu;
            a[[2 * b + i, j]] = s * zv;
            a[[3 * b + i, j]] = s * zuu + g * zu * zu;
            a[[4 * b + i, j]] = s * zuv + g * zu * zv;
            a[[5 * b + i, j]] = s * zvv + g * zv * zv;
        }
    }
    a
}

/// Adjoint of [`tanh_jet`]: maps activation-slot adjoints to
/// pre-activation-slot adjoints.
fn tanh_jet_adjoint(z: &Array2<f64>, da: &Array2<f64>, b: usize) -> Array2<f64> {
    let mut dz = Array2::zeros(z.raw_dim());
    let width = z.ncols();
    for i in 0..b {
        for j in 0..width {
            let (zf, zu, zv) = (z[[i, j]], z[[b + i, j]], z[[2 * b + i, j]]);
            let (zuu, zuv, zvv) = (z[[3 * b + i, j]], z[[4 * b + i, j]], z[[5 * b + i, j]]);
            let (af, au, av) = (da[[i, j]], da[[b + i, j]], da[[2 * b + i, j]]);
            let (auu, auv, avv) = (da[[3 * b + i, j]], da[[4 * b + i, j]], da[[5 * b + i, j]]);
            let t = zf.tanh();
            let s = 1.0 - t * t;
            let g = -2.0 * t * s;
            // d s/dz = g, d g/dz = -2 s^2 + 4 t^2 s
            let dg = -2.0 * s * s + 4.0 * t * t * s;
            let lin = au * zu + av * zv + auu * zuu + auv * zuv + avv * zvv;
            let quad = auu * zu * zu + auv * zu * zv + avv * zv * zv;
            dz[[i, j]] = af * s + g * lin + dg * quad;
            dz[[b + i, j]] = au * s + 2.0 * g * auu * zu + g * auv * zv;
            dz[[2 * b + i, j]] = av * s + g * auv * zu + 2.0 * g * avv * zv;
            dz[[3 * b + i, j]] = auu * s;
            dz[[4 * b + i, j]] = auv * s;
            dz[[5 * b + i, j]] = avv * s;
        }
    }
    dz
}

impl JetBatch {
    /// `features` is slot-major `(6B, input_dim)`, see [`pack_features`].
    pub fn forward(layout: &MlpLayout, params: &[f64], features: Array2<f64>) -> JetBatch {
        assert_eq!(params.len(), layout.param_count());
        assert_eq!(features.ncols(), layout.input_dim());
        assert_eq!(features.nrows() % SLOTS, 0);
        let b = features.nrows() / SLOTS;
        let spans = layout.layers();
        let mut inputs = Vec::with_capacity(spans.len());
        let mut pre = Vec::with_capacity(spans.len());
        let mut act = features;
        for (li, span) in spans.iter().enumerate() {
            let w = weight_view(params, span);
            let mut z = act.dot(&w.t());
            z.slice_mut(s![0..b, ..])
                .axis_iter_mut(Axis(0))
                .for_each(|mut row| row += &bias_view(params, span));
            let next = if li + 1 == spans.len() {
                z.clone()
            } else {
                tanh_jet(&z, b)
            };
            inputs.push(act);
            pre.push(z);
            act = next;
        }
        JetBatch {
            points: b,
            inputs,
            pre,
            output: act,
        }
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn output(&self, i: usize) -> SurfaceJet<f64> {
        let b = self.points;
        let jet = |c: usize| {
            Jet2::from_slots(std::array::from_fn(|s| self.output[[s * b + i, c]]))
        };
        SurfaceJet {
            x: jet(0),
            y: jet(1),
            z: jet(2),
        }
    }

    pub fn outputs(&self) -> Vec<SurfaceJet<f64>> {
        (0..self.points).map(|i| self.output(i)).collect()
    }

    /// Accumulates `∂loss/∂params` into `grad` given the adjoint of every
    /// output slot, `adjoints[i]` laid out as [`SurfaceJet::flat`].
    pub fn backward(
        &self,
        layout: &MlpLayout,
        params: &[f64],
        adjoints: &[[f64; 18]],
        grad: &mut [f64],
    ) {
        assert_eq!(adjoints.len(), self.points);
        assert_eq!(grad.len(), layout.param_count());
        let b = self.points;
        let mut d = Array2::zeros((SLOTS * b, 3));
        for (i, a) in adjoints.iter().enumerate() {
            for c in 0..3 {
                for s in 0..SLOTS {
                    d[[s * b + i, c]] = a[c * SLOTS + s];
                }
            }
        }
        let spans = layout.layers();
        for li in (0..spans.len()).rev() {
            let span = &spans[li];
            if li + 1 != spans.len() {
                d = tanh_jet_adjoint(&self.pre[li], &d, b);
            }
            {
                let (gw, gb) = grad[span.weight..span.bias + span.fan_out].split_at_mut(span.fan_in * span.fan_out);
                let mut gw = ArrayViewMut2::from_shape((span.fan_out, span.fan_in), gw)
                    .expect("layout matches gradient vector");
                general_mat_mul(1.0, &d.t(), &self.inputs[li], 1.0, &mut gw);
                let db = d.slice(s![0..b, ..]).sum_axis(Axis(0));
                for (g, x) in gb.iter_mut().zip(db.iter()) {
                    *g += x;
                }
            }
            if li > 0 {
                d = d.dot(&weight_view(params, span));
            }
        }
    }
}
