//! Binary checkpoint format, all integers and floats little-endian:
//!
//! ```text
//! "WFNN"            magic
//! u32               format version
//! u8                genus
//! u32               feature order (SH degree L for genus 0, Fourier modes N otherwise)
//! u32               number of layer sizes, then that many u32 sizes
//! u8                number of charts
//! per chart:
//!   u8              chart tag (0 main, 1 T1, 2 T2)
//!   u64             parameter count
//!   f64 * count     parameters in (layer, row-major weight, bias) order
//! optional optimizer section:
//!   u8              1
//!   u64             step count
//!   f64 * 4         beta1, beta2, eps, weight decay
//!   f64 * 2P        first then second moments, P = total parameter count
//! ```

use std::fs;
use std::path::Path;

use super::{Chart, MlpLayout, SurfaceModel};
use crate::error::{Error, Result};
use crate::features::FeatureMap;
use crate::optim::AdamW;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"WFNN";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn encode(model: &SurfaceModel) -> Vec<u8> {
    encode_state(model, None)
}

/// Model plus optional optimizer moments. Panics if the optimizer does not
/// match the model's parameter count.
pub fn encode_state(model: &SurfaceModel, opt: Option<&AdamW>) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 8 * model.param_count());
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.push(model.genus());
    out.extend_from_slice(&(model.features().order() as u32).to_le_bytes());
    let sizes = model.layout().sizes();
    out.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
    for &s in sizes {
        out.extend_from_slice(&(s as u32).to_le_bytes());
    }
    out.push(model.charts().len() as u8);
    for &chart in model.charts() {
        let block = model.chart_params(chart).expect("chart belongs to model");
        out.push(chart.tag());
        out.extend_from_slice(&(block.len() as u64).to_le_bytes());
        for w in block {
            out.extend_from_slice(&w.to_le_bytes());
        }
    }
    if let Some(opt) = opt {
        assert_eq!(opt.len(), model.param_count());
        out.push(1);
        out.extend_from_slice(&opt.step.to_le_bytes());
        for x in [opt.beta1, opt.beta2, opt.eps, opt.weight_decay] {
            out.extend_from_slice(&x.to_le_bytes());
        }
        let (m, v) = opt.moments();
        for x in m.iter().chain(v) {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| {
                Error::CorruptCheckpoint(format!(
                    "truncated: wanted {n} bytes at offset {}, file has {}",
                    self.pos,
                    self.buf.len()
                ))
            })?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(
            n.checked_mul(8)
                .ok_or_else(|| Error::CorruptCheckpoint("length overflow".into()))?,
        )?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn decode(buf: &[u8]) -> Result<SurfaceModel> {
    decode_state(buf).map(|(m, _)| m)
}

pub fn decode_state(buf: &[u8]) -> Result<(SurfaceModel, Option<AdamW>)> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != CHECKPOINT_MAGIC {
        return Err(Error::CorruptCheckpoint("bad magic".into()));
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::CorruptCheckpoint(format!(
            "unsupported format version {version}"
        )));
    }
    let genus = r.u8()?;
    let order = r.u32()? as usize;
    let features = match genus {
        0 => FeatureMap::sphere(order),
        1 | 2 => FeatureMap::fourier(order),
        g => return Err(Error::CorruptCheckpoint(format!("genus {g}"))),
    }
    .map_err(|e| Error::CorruptCheckpoint(e.to_string()))?;
    let n_sizes = r.u32()? as usize;
    if n_sizes > 64 {
        return Err(Error::CorruptCheckpoint(format!("{n_sizes} layer sizes")));
    }
    let sizes = (0..n_sizes)
        .map(|_| r.u32().map(|s| s as usize))
        .collect::<Result<Vec<_>>>()?;
    let layout = MlpLayout::new(sizes).map_err(|e| Error::CorruptCheckpoint(e.to_string()))?;
    let expected = Chart::for_genus(genus);
    let n_charts = r.u8()? as usize;
    if n_charts != expected.len() {
        return Err(Error::CorruptCheckpoint(format!(
            "{n_charts} chart blocks for genus {genus}"
        )));
    }
    let mut params = Vec::with_capacity(layout.param_count() * n_charts);
    for &chart in expected {
        let tag = r.u8()?;
        if Chart::from_tag(tag) != Some(chart) {
            return Err(Error::CorruptCheckpoint(format!(
                "expected block for chart {chart}, found tag {tag}"
            )));
        }
        let count = r.u64()? as usize;
        if count != layout.param_count() {
            return Err(Error::CorruptCheckpoint(format!(
                "chart {chart}: {count} parameters, layout needs {}",
                layout.param_count()
            )));
        }
        params.extend(r.f64s(count)?);
    }
    let mut opt = None;
    if r.pos < buf.len() {
        let flag = r.u8()?;
        if flag != 1 {
            return Err(Error::CorruptCheckpoint(format!("optimizer flag {flag}")));
        }
        let step = r.u64()?;
        let h = r.f64s(4)?;
        let p = params.len();
        let mut mv = r.f64s(2 * p)?;
        let v = mv.split_off(p);
        let mut o = AdamW::from_moments(mv, v, step, h[3]).map_err(|e| Error::CorruptCheckpoint(e.to_string()))?;
        (o.beta1, o.beta2, o.eps) = (h[0], h[1], h[2]);
        opt = Some(o);
    }
    if r.pos != buf.len() {
        return Err(Error::CorruptCheckpoint(format!(
            "{} trailing bytes",
            buf.len() - r.pos
        )));
    }
    let model = SurfaceModel::from_parts(genus, features, layout, params)
        .map_err(|e| Error::CorruptCheckpoint(e.to_string()))?;
    Ok((model, opt))
}

pub fn save_checkpoint(model: &SurfaceModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(model)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<SurfaceModel> {
    load_state(path).map(|(m, _)| m)
}

/// Writes the model together with the optimizer it was trained with.
pub fn save_state(model: &SurfaceModel, opt: &AdamW, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_state(model, Some(opt))).map_err(|e| Error::io(path, e))
}

/// Reads a checkpoint and, if present, its optimizer section.
pub fn load_state(path: impl AsRef<Path>) -> Result<(SurfaceModel, Option<AdamW>)> {
    let path = path.as_ref();
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_state(&buf)
}
