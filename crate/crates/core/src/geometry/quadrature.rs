use std::f64::consts::{PI, TAU};
use std::fmt;

use super::forms::fundamental_forms;
use super::reference::ReferenceSurface;
use crate::error::{Error, Result};
use crate::net::Chart;

/// `2 - 2g`.
pub fn euler_characteristic(genus: u8) -> f64 {
    2.0 - 2.0 * genus as f64
}

/// `∫K dA - 2πχ`.
pub fn gauss_bonnet_defect(integral_k: f64, genus: u8) -> f64 {
    integral_k - TAU * euler_characteristic(genus)
}

/// Willmore energy of the torus of revolution with radius ratio `x > 1`.
pub fn torus_willmore_closed_form(x: f64) -> f64 {
    PI * PI * x * x / (x * x - 1.0).sqrt()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceIntegrals {
    pub willmore: f64,
    pub integral_k: f64,
    pub area: f64,
}

impl SurfaceIntegrals {
    /// `W - 2πχ`, the conformally invariant part of the energy.
    pub fn conformal_willmore(&self, genus: u8) -> f64 {
        self.willmore - TAU * euler_characteristic(genus)
    }
}

/// Deterministic tensor-product quadrature of `H^2 dA`, `K dA` and `dA`.
///
/// Periodic directions use the trapezoid rule, which converges
/// spectrally for smooth periodic integrands; the polar direction of the
/// ellipsoid uses Gauss–Legendre so the poles are never sampled. A
/// sheared torus is only periodic in the square chart when `Re τ / Im τ`
/// is an integer.
pub fn quadrature_integrals(
    surface: &ReferenceSurface,
    n_u: usize,
    n_v: usize,
) -> Result<SurfaceIntegrals> {
    surface.validate()?;
    if n_u == 0 || n_v == 0 {
        return Err(Error::Config("quadrature needs at least one node per axis".into()));
    }
    let us: Vec<(f64, f64)> = (0..n_u)
        .map(|i| (TAU * i as f64 / n_u as f64, TAU / n_u as f64))
        .collect();
    let vs: Vec<(f64, f64)> = match surface {
        ReferenceSurface::Ellipsoid { .. } => gauss_legendre(n_v)
            .into_iter()
            .map(|(x, w)| (0.5 * PI * (x + 1.0), 0.5 * PI * w))
            .collect(),
        ReferenceSurface::Torus { .. } => (0..n_v)
            .map(|j| (TAU * j as f64 / n_v as f64, TAU / n_v as f64))
            .collect(),
        ReferenceSurface::TwoTori { .. } => {
            return Err(Error::Config(
                "quadrature needs a closed connected reference".into(),
            ))
        }
    };
    let mut acc = SurfaceIntegrals {
        willmore: 0.0,
        integral_k: 0.0,
        area: 0.0,
    };
    for &(v, wv) in &vs {
        for &(u, wu) in &us {
            let ff = fundamental_forms(&surface.reference_jet(Chart::Main, u, v)?)?;
            let w = wu * wv * ff.sqrt_det;
            acc.willmore += w * ff.h * ff.h;
            acc.integral_k += w * ff.k;
            acc.area += w;
        }
    }
    Ok(acc)
}

pub fn quadrature_willmore(surface: &ReferenceSurface, n_u: usize, n_v: usize) -> Result<f64> {
    Ok(quadrature_integrals(surface, n_u, n_v)?.willmore)
}

/// One line of the oracle table.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleRow {
    pub surface: ReferenceSurface,
    pub integrals: SurfaceIntegrals,
}

impl OracleRow {
    pub const CSV_HEADER: &'static str = "surface,params,willmore,integral_k,chi_defect";

    pub fn compute(surface: ReferenceSurface, n: usize) -> Result<Self> {
        Ok(OracleRow {
            surface,
            integrals: quadrature_integrals(&surface, n, n)?,
        })
    }
}

impl fmt::Display for OracleRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, params) = match self.surface {
            ReferenceSurface::Ellipsoid { a, b, c } => ("ellipsoid", format!("a={a};b={b};c={c}")),
            ReferenceSurface::Torus { tau } => ("torus", format!("tau={tau}")),
            ReferenceSurface::TwoTori { .. } => ("two_tori", String::new()),
        };
        write!(
            f,
            "{kind},{params},{:.10},{:.10},{:.3e}",
            self.integrals.willmore,
            self.integrals.integral_k,
            gauss_bonnet_defect(self.integrals.integral_k, self.surface.genus())
        )
    }
}

/// The surfaces reported by default: the two classical minima, the
/// pretraining starts, and a thin torus.
pub fn default_oracle_surfaces() -> Vec<ReferenceSurface> {
    use num_complex::Complex64;
    vec![
        ReferenceSurface::sphere(),
        ReferenceSurface::Ellipsoid {
            a: 2.0,
            b: 1.0,
            c: 0.5,
        },
        ReferenceSurface::torus_with_ratio(std::f64::consts::SQRT_2),
        ReferenceSurface::torus(Complex64::new(0.0, 0.1)),
        ReferenceSurface::torus(Complex64::new(0.1, 0.1)),
    ]
}
