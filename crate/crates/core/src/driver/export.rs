use std::f64::consts::{PI, TAU};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Immersion;
use crate::net::Chart;
use crate::sampling::{sample_bulk_stream, stream_rng, SamplerConfig, Stream};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CloudVertex {
    pub xyz: [f64; 3],
    pub rgb: [u8; 3],
    pub u: f64,
    pub v: f64,
    pub chart: Chart,
}

/// HSL to 8-bit RGB; `h` in turns, `s` and `l` in `[0, 1]`.
pub fn hsl_to_rgb(h: f64, s: f64, l: f64) -> [u8; 3] {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = h.rem_euclid(1.0) * 6.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    [r, g, b].map(|t| ((t + m) * 255.0).round().clamp(0.0, 255.0) as u8)
}

/// Fundamental-domain colouring: hue follows `u`, lightness follows `v`.
/// The genus-2 charts take the two halves of the hue circle.
pub fn domain_color(chart: Chart, u: f64, v: f64, genus: u8) -> [u8; 3] {
    let fu = u.rem_euclid(TAU) / TAU;
    let vmax = if genus == 0 { PI } else { TAU };
    let hue = match chart {
        Chart::Main => fu,
        Chart::T1 => 0.5 * fu,
        Chart::T2 => 0.5 + 0.5 * fu,
    };
    hsl_to_rgb(hue, 0.85, 0.25 + 0.5 * (v / vmax).clamp(0.0, 1.0))
}

/// `n` fresh uniform domain samples pushed through the immersion.
pub fn sample_cloud<I: Immersion + ?Sized>(
    imm: &I,
    sampler: &SamplerConfig,
    n: usize,
    seed: u64,
) -> Result<Vec<CloudVertex>> {
    let genus = imm.genus();
    let samples = sample_bulk_stream(genus, sampler, n, stream_rng(seed, 0, Stream::Export))?;
    let mut out = Vec::with_capacity(n);
    for &chart in Chart::for_genus(genus) {
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .filter(|s| s.chart == chart)
            .map(|s| (s.u, s.v))
            .collect();
        for (jet, &(u, v)) in imm.jets(chart, &pts)?.iter().zip(&pts) {
            out.push(CloudVertex {
                xyz: jet.point(),
                rgb: domain_color(chart, u, v, genus),
                u,
                v,
                chart,
            });
        }
    }
    Ok(out)
}

pub fn write_ply(vertices: &[CloudVertex], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "ply")?;
    writeln!(w, "format ascii 1.0")?;
    writeln!(w, "element vertex {}", vertices.len())?;
    for p in ["x", "y", "z"] {
        writeln!(w, "property double {p}")?;
    }
    for p in ["red", "green", "blue"] {
        writeln!(w, "property uchar {p}")?;
    }
    writeln!(w, "property double u")?;
    writeln!(w, "property double v")?;
    writeln!(w, "property uchar chart")?;
    writeln!(w, "end_header")?;
    for p in vertices {
        let [x, y, z] = p.xyz;
        let [r, g, b] = p.rgb;
        writeln!(w, "{x} {y} {z} {r} {g} {b} {} {} {}", p.u, p.v, p.chart.tag())?;
    }
    Ok(())
}

/// Samples `n` points and writes them as an ASCII PLY file.
pub fn export_surface<I: Immersion + ?Sized>(
    imm: &I,
    sampler: &SamplerConfig,
    n: usize,
    seed: u64,
    path: impl AsRef<Path>,
) -> Result<usize> {
    if n == 0 {
        return Err(Error::Config("export needs at least one point".into()));
    }
    let path = path.as_ref();
    let cloud = sample_cloud(imm, sampler, n, seed)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_ply(&cloud, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(cloud.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primary_hues() {
        assert_eq!(hsl_to_rgb(0.0, 1.0, 0.5), [255, 0, 0]);
        assert_eq!(hsl_to_rgb(1.0 / 3.0, 1.0, 0.5), [0, 255, 0]);
        assert_eq!(hsl_to_rgb(2.0 / 3.0, 1.0, 0.5), [0, 0, 255]);
        assert_eq!(hsl_to_rgb(0.3, 0.0, 1.0), [255, 255, 255]);
    }
}
