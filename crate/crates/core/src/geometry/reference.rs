use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::net::{Chart, SurfaceJet, SurfaceModel};

/// Anything that yields embedding 2-jets chart by chart.
pub trait Immersion {
    fn genus(&self) -> u8;
    fn jet(&self, chart: Chart, u: f64, v: f64) -> Result<SurfaceJet<f64>>;

    fn jets(&self, chart: Chart, points: &[(f64, f64)]) -> Result<Vec<SurfaceJet<f64>>> {
        points.iter().map(|&(u, v)| self.jet(chart, u, v)).collect()
    }
}

impl Immersion for SurfaceModel {
    fn genus(&self) -> u8 {
        SurfaceModel::genus(self)
    }

    fn jet(&self, chart: Chart, u: f64, v: f64) -> Result<SurfaceJet<f64>> {
        self.forward_jet(chart, u, v)
    }

    fn jets(&self, chart: Chart, points: &[(f64, f64)]) -> Result<Vec<SurfaceJet<f64>>> {
        // bounded chunks keep the stored activations small
        let mut out = Vec::with_capacity(points.len());
        for chunk in points.chunks(4096) {
            out.extend(self.forward_batch(chart, chunk)?.outputs());
        }
        Ok(out)
    }
}

/// Closed-form surfaces used as pretraining targets and as oracles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReferenceSurface {
    /// `(a sin v cos u, b sin v sin u, c cos v)` on `[0, 2π] x [0, π]`.
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// Unit major radius, minor radius `Im τ`, twist `Re τ / Im τ` turns of
    /// the minor circle per turn of the major one.
    Torus { tau: Complex64 },
    /// Two punctured tori facing each other across the `yz` plane.
    TwoTori {
        tau1: Complex64,
        tau2: Complex64,
        delta: f64,
        shift: f64,
    },
}

impl ReferenceSurface {
    pub fn sphere() -> Self {
        ReferenceSurface::Ellipsoid {
            a: 1.0,
            b: 1.0,
            c: 1.0,
        }
    }

    pub fn torus(tau: Complex64) -> Self {
        ReferenceSurface::Torus { tau }
    }

    /// Torus of revolution with major/minor ratio `x`.
    pub fn torus_with_ratio(x: f64) -> Self {
        ReferenceSurface::Torus {
            tau: Complex64::new(0.0, 1.0 / x),
        }
    }

    pub fn genus(&self) -> u8 {
        match self {
            ReferenceSurface::Ellipsoid { .. } => 0,
            ReferenceSurface::Torus { .. } => 1,
            ReferenceSurface::TwoTori { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match *self {
            ReferenceSurface::Ellipsoid { a, b, c } => {
                if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a * b * c).is_finite() {
                    return bad(format!("ellipsoid axes must be positive, got ({a}, {b}, {c})"));
                }
            }
            ReferenceSurface::Torus { tau } => check_tau(tau)?,
            ReferenceSurface::TwoTori {
                tau1,
                tau2,
                delta,
                shift,
            } => {
                check_tau(tau1)?;
                check_tau(tau2)?;
                if !(delta > 0.0 && delta < std::f64::consts::PI) {
                    return bad(format!("disc radius must lie in (0, π), got {delta}"));
                }
                if !shift.is_finite() {
                    return bad(format!("centre shift {shift}"));
                }
            }
        }
        Ok(())
    }

    /// Analytic embedding jet at `(u, v)` of the given chart.
    pub fn reference_jet(&self, chart: Chart, u: f64, v: f64) -> Result<SurfaceJet<f64>> {
        let (ju, jv) = Jet2::seed(u, v)?;
        match (*self, chart) {
            (ReferenceSurface::Ellipsoid { a, b, c }, Chart::Main) => {
                let (su, cu) = ju.sin_cos();
                let (sv, cv) = jv.sin_cos();
                Ok(SurfaceJet {
                    x: sv * cu * a,
                    y: sv * su * b,
                    z: cv * c,
                })
            }
            (ReferenceSurface::Torus { tau }, Chart::Main) => Ok(torus_jet(tau, ju, jv)),
            (ReferenceSurface::TwoTori { tau1, shift, .. }, Chart::T1) => {
                Ok(torus_jet(tau1, ju, jv).translate([-(shift + tau1.im), 0.0, 0.0]))
            }
            (ReferenceSurface::TwoTori { tau2, shift, .. }, Chart::T2) => {
                Ok(torus_jet(tau2, ju, jv).translate([shift + tau2.im, 0.0, 0.0]))
            }
            (s, c) => Err(Error::Config(format!(
                "chart {c} does not belong to a genus {} reference",
                s.genus()
            ))),
        }
    }
}

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("modulus needs Im τ > 0, got {tau}")))
    }
}

fn torus_jet(tau: Complex64, u: Jet2<f64>, v: Jet2<f64>) -> SurfaceJet<f64> {
    let r = tau.im.abs();
    let twist = tau.re / r;
    let vt = v + u * twist;
    let (su, cu) = u.sin_cos();
    let (sv, cv) = vt.sin_cos();
    let ring = cv * r + 1.0;
    SurfaceJet {
        x: ring * cu,
        y: ring * su,
        z: sv * r,
    }
}

impl Immersion for ReferenceSurface {
    fn genus(&self) -> u8 {
        ReferenceSurface::genus(self)
    }

    fn jet(&self, chart: Chart, u: f64, v: f64) -> Result<SurfaceJet<f64>> {
        self.reference_jet(chart, u, v)
    }
}

impl fmt::Display for ReferenceSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceSurface::Ellipsoid { a, b, c } => write!(f, "ellipsoid(a={a} b={b} c={c})"),
            ReferenceSurface::Torus { tau } => write!(f, "torus(tau={tau})"),
            ReferenceSurface::TwoTori {
                tau1,
                tau2,
                delta,
                shift,
            } => write!(
                f,
                "two_tori(tau1={tau1} tau2={tau2} delta={delta} shift={shift})"
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_ellipsoid_is_the_sphere() {
        for &(u, v) in &[(0.1, 0.2), (3.0, 2.9), (5.5, 1.0)] {
            let p = ReferenceSurface::sphere().reference_jet(Chart::Main, u, v).unwrap().point();
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn thin_torus_outer_equator() {
        let t = ReferenceSurface::torus(Complex64::new(0.0, 0.1));
        for u in [0.0, 1.0, 4.0] {
            let p = t.reference_jet(Chart::Main, u, 0.0).unwrap().point();
            assert!((p[0] - 1.1 * u.cos()).abs() < 1e-15);
            assert!((p[1] - 1.1 * u.sin()).abs() < 1e-15);
            assert_eq!(p[2], 0.0);
        }
    }

    #[test]
    fn two_tori_touch_at_origin() {
        let tau = Complex64::new(0.0, 0.7);
        let s = ReferenceSurface::TwoTori {
            tau1: tau,
            tau2: tau,
            delta: 0.65,
            shift: 1.0,
        };
        let a = s.reference_jet(Chart::T1, 0.0, 0.0).unwrap().point();
        let b = s.reference_jet(Chart::T2, PI, 0.0).unwrap().point();
        for k in 0..3 {
            assert!(a[k].abs() < 1e-15 && b[k].abs() < 1e-15);
        }
        // the tori centres sit at ∓(R + r)
        let c1 = s.reference_jet(Chart::T1, PI / 2.0, PI / 2.0).unwrap().point();
        assert!((c1[0] + 1.7).abs() < 1e-12);
    }

    #[test]
    fn wrong_chart_is_rejected() {
        assert!(ReferenceSurface::sphere().reference_jet(Chart::T1, 0.0, 0.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(ReferenceSurface::torus(Complex64::new(0.1, 0.0)).validate().is_err());
        assert!(ReferenceSurface::Ellipsoid { a: 1.0, b: -1.0, c: 1.0 }.validate().is_err());
        assert!(ReferenceSurface::torus(Complex64::new(0.1, 0.1)).validate().is_ok());
    }
}
