//! One optimisation step's worth of loss: batched network passes per
//! chart, geometry and losses on a tape over the network outputs, and the
//! output adjoints pushed back through the network.

use super::{
    domain_area, gluing_terms, pretrain_loss, regularity_terms, total_loss, willmore_loss,
    EffectiveWeights, LossReport, LossWeights,
};
use crate::error::{Error, Result};
use crate::jet::{Real, Tape, Var};
use crate::net::{Chart, SurfaceJet, SurfaceModel};
use crate::sampling::GluePair;

/// Points of one chart evaluated in a single network pass.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChartBatch {
    pub bulk: Vec<(f64, f64)>,
    pub annulus: Vec<(f64, f64)>,
    /// Glue points of this chart, in pair order.
    pub glue: Vec<(f64, f64)>,
}

impl ChartBatch {
    fn points(&self) -> Vec<(f64, f64)> {
        let mut p = Vec::with_capacity(self.bulk.len() + self.annulus.len() + self.glue.len());
        p.extend_from_slice(&self.bulk);
        p.extend_from_slice(&self.annulus);
        p.extend_from_slice(&self.glue);
        p
    }
}

/// A minibatch across all charts of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct GenusBatch {
    pub genus: u8,
    /// Disc radius; only used for genus 2 domain areas.
    pub delta: f64,
    /// One entry per chart of the genus, in [`Chart::for_genus`] order.
    pub charts: Vec<ChartBatch>,
    pub pairs: Vec<GluePair>,
}

struct ChartJets<'a, T> {
    bulk: &'a [SurfaceJet<T>],
    annulus: &'a [SurfaceJet<T>],
    glue: &'a [SurfaceJet<T>],
}

fn split<'a, T>(b: &ChartBatch, jets: &'a [SurfaceJet<T>]) -> ChartJets<'a, T> {
    let (bulk, rest) = jets.split_at(b.bulk.len());
    let (annulus, glue) = rest.split_at(b.annulus.len());
    ChartJets { bulk, annulus, glue }
}

fn assemble<T: Real>(
    batch: &GenusBatch,
    jets: &[Vec<SurfaceJet<T>>],
    w: &LossWeights,
    eff: &EffectiveWeights,
) -> Result<(T, LossReport)> {
    let area = domain_area(batch.genus, batch.delta);
    let huber = w.huber.then_some(w.huber_factor);
    let mut report = LossReport::default();
    let mut loss_w: Option<T> = None;
    let mut loss_r: Option<T> = None;
    let mut glue_sides = Vec::new();
    for (b, j) in batch.charts.iter().zip(jets) {
        let cj = split(b, j);
        glue_sides.push(cj.glue);
        if cj.bulk.is_empty() {
            continue;
        }
        let wt = willmore_loss(cj.bulk, area, huber)?;
        report.willmore += wt.plain.value();
        report.willmore_huber += wt.huber.value();
        report.degenerate += wt.degenerate;
        let lw = if w.huber { wt.huber } else { wt.plain };
        loss_w = Some(loss_w.map_or(lw, |a| a + lw));

        let rt = regularity_terms(cj.bulk, w)?;
        let v = rt.values();
        report.reg_area += v.area;
        report.reg_pos += v.pos;
        report.reg_smooth += v.smooth;
        report.reg_log += v.log;
        let mut lr = rt.combine(w);
        if !cj.annulus.is_empty() {
            lr = lr + regularity_terms(cj.annulus, w)?.combine(w) * w.annulus_weight;
        }
        report.regularity += lr.value();
        loss_r = Some(loss_r.map_or(lr, |a| a + lr));
    }
    let (lw, lr) = match (loss_w, loss_r) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Config("batch has no bulk samples".into())),
    };
    let lg = if batch.genus == 2 && !batch.pairs.is_empty() {
        let g = gluing_terms(&batch.pairs, glue_sides[0], glue_sides[1])?;
        report.glue_c0 = g.c0.value();
        report.glue_c1 = g.c1.value();
        report.glue_c2 = g.c2.value();
        let c = g.combine(eff.alpha_glue);
        report.gluing = c.value();
        Some(c)
    } else {
        None
    };
    let total = total_loss(lw, lr, lg, eff, w);
    report.total = total.value();
    Ok((total, report))
}

fn check_batch(model: &SurfaceModel, batch: &GenusBatch) -> Result<()> {
    if batch.genus != model.genus() || batch.charts.len() != model.charts().len() {
        return Err(Error::Config(format!(
            "batch for genus {} with {} charts does not fit a genus {} model",
            batch.genus,
            batch.charts.len(),
            model.genus()
        )));
    }
    if batch.genus == 2 && batch.charts.iter().any(|c| c.glue.len() != batch.pairs.len()) {
        return Err(Error::Config("glue points do not match the glue pairs".into()));
    }
    Ok(())
}

/// Loss components on plain floats, without any differentiation.
pub fn evaluate_batch(
    model: &SurfaceModel,
    batch: &GenusBatch,
    w: &LossWeights,
    eff: &EffectiveWeights,
) -> Result<LossReport> {
    check_batch(model, batch)?;
    let mut jets = Vec::with_capacity(batch.charts.len());
    for (&chart, b) in model.charts().iter().zip(&batch.charts) {
        let out = model.forward_batch(chart, &b.points())?;
        jets.push(out.outputs());
    }
    Ok(assemble(batch, &jets, w, eff)?.1)
}

#[derive(Clone, Debug)]
pub struct BatchGradient {
    pub report: LossReport,
    /// Gradient of the total loss, laid out like [`SurfaceModel::params`].
    pub gradient: Vec<f64>,
}

fn leaves<'t>(tape: &'t Tape, outputs: &[SurfaceJet<f64>]) -> Vec<SurfaceJet<Var<'t>>> {
    outputs.iter().map(|o| o.on_tape(tape)).collect()
}

fn backprop(
    model: &SurfaceModel,
    tape: &Tape,
    loss: Var<'_>,
    passes: &[(Chart, crate::net::JetBatch)],
    taped: &[Vec<SurfaceJet<Var<'_>>>],
) -> Result<Vec<f64>> {
    let adj = tape.backward(loss)?;
    let mut grad = vec![0.0; model.param_count()];
    for ((chart, pass), jets) in passes.iter().zip(taped) {
        let outs: Vec<[f64; 18]> = jets.iter().map(|j| j.flat().map(|s| adj.wrt(s))).collect();
        model.backward_batch(*chart, pass, &outs, &mut grad)?;
    }
    Ok(grad)
}

impl BatchGradient {
    /// Total training loss of `batch` and its gradient.
    pub fn training(
        model: &SurfaceModel,
        batch: &GenusBatch,
        w: &LossWeights,
        eff: &EffectiveWeights,
    ) -> Result<Self> {
        check_batch(model, batch)?;
        let mut passes = Vec::with_capacity(batch.charts.len());
        for (&chart, b) in model.charts().iter().zip(&batch.charts) {
            passes.push((chart, model.forward_batch(chart, &b.points())?));
        }
        let n: usize = passes.iter().map(|(_, p)| p.len()).sum();
        let tape = Tape::with_capacity(400 * n);
        let taped: Vec<_> = passes.iter().map(|(_, p)| leaves(&tape, &p.outputs())).collect();
        let (loss, report) = assemble(batch, &taped, w, eff)?;
        let gradient = backprop(model, &tape, loss, &passes, &taped)?;
        Ok(BatchGradient { report, gradient })
    }

    /// Pretraining loss against per-chart reference jets. `points[k]` and
    /// `reference[k]` belong to chart `k` of the model.
    pub fn pretraining(
        model: &SurfaceModel,
        points: &[Vec<(f64, f64)>],
        reference: &[Vec<SurfaceJet<f64>>],
        beta1: f64,
        beta2: f64,
    ) -> Result<(f64, Vec<f64>)> {
        let mut passes = Vec::new();
        for (&chart, p) in model.charts().iter().zip(points) {
            passes.push((chart, model.forward_batch(chart, p)?));
        }
        let n: usize = passes.iter().map(|(_, p)| p.len()).sum();
        let tape = Tape::with_capacity(100 * n);
        let taped: Vec<_> = passes.iter().map(|(_, p)| leaves(&tape, &p.outputs())).collect();
        let mut loss: Option<Var<'_>> = None;
        for (jets, refs) in taped.iter().zip(reference) {
            let l = pretrain_loss(jets, refs, beta1, beta2)?;
            loss = Some(loss.map_or(l, |a| a + l));
        }
        let loss = loss.ok_or_else(|| Error::Config("empty pretraining batch".into()))?;
        let value = loss.value();
        let gradient = backprop(model, &tape, loss, &passes, &taped)?;
        Ok((value, gradient))
    }
}
