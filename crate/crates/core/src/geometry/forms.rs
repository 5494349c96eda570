use crate::error::{Error, Result};
use crate::jet::Real;
use crate::net::SurfaceJet;

/// Samples whose `EG - F^2` falls below this are treated as degenerate.
pub const DET_EPS: f64 = 1e-12;

fn dot<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// First fundamental form only. Always defined, even where the immersion
/// degenerates, which is what the regularity terms need.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metric<T> {
    pub e: T,
    pub f: T,
    pub g: T,
    /// `EG - F^2`.
    pub det: T,
}

impl<T: Real> Metric<T> {
    pub fn of(sj: &SurfaceJet<T>) -> Self {
        let (pu, pv) = (sj.d_u(), sj.d_v());
        let e = dot(pu, pu);
        let f = dot(pu, pv);
        let g = dot(pv, pv);
        Metric {
            e,
            f,
            g,
            det: e * g - f * f,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.det.value() >= DET_EPS)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalForms<T> {
    pub e: T,
    pub f: T,
    pub g: T,
    pub l: T,
    pub m: T,
    pub n: T,
    /// `φu × φv / |φu × φv|`.
    pub normal: [T; 3],
    /// Area density `sqrt(EG - F^2)`.
    pub sqrt_det: T,
    /// Mean curvature; its sign follows the normal above.
    pub h: T,
    pub k: T,
}

pub fn fundamental_forms<T: Real>(sj: &SurfaceJet<T>) -> Result<FundamentalForms<T>> {
    let metric = Metric::of(sj);
    if metric.is_degenerate() {
        return Err(Error::DegenerateMetric(metric.det.value()));
    }
    let Metric { e, f, g, det } = metric;
    let c = cross(sj.d_u(), sj.d_v());
    let len = dot(c, c).sqrt();
    let normal = c.map(|x| x / len);
    let l = dot(sj.d_uu(), normal);
    let m = dot(sj.d_uv(), normal);
    let n = dot(sj.d_vv(), normal);
    let h = (e * n - f * m * 2.0 + g * l) / (det * 2.0);
    let k = (l * n - m * m) / det;
    Ok(FundamentalForms {
        e,
        f,
        g,
        l,
        m,
        n,
        normal,
        sqrt_det: det.sqrt(),
        h,
        k,
    })
}

/// Huber-smoothed `H^2`: quadratic up to `c`, then `2 sqrt(c) |H| - c`.
pub fn huber_h2<T: Real>(h: T, c: f64) -> T {
    let h2 = h * h;
    if h2.value() <= c {
        h2
    } else {
        h.abs() * (2.0 * c.sqrt()) - c
    }
}

/// `H^2 dA` density, optionally Huber-smoothed with threshold `huber_c`.
pub fn willmore_integrand<T: Real>(ff: &FundamentalForms<T>, huber_c: Option<f64>) -> T {
    let h2 = match huber_c {
        Some(c) => huber_h2(ff.h, c),
        None => ff.h * ff.h,
    };
    h2 * ff.sqrt_det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet2;

    fn sphere_jet(u: f64, v: f64) -> SurfaceJet<f64> {
        let (ju, jv) = Jet2::seed(u, v).unwrap();
        let (su, cu) = ju.sin_cos();
        let (sv, cv) = jv.sin_cos();
        SurfaceJet {
            x: sv * cu,
            y: sv * su,
            z: cv,
        }
    }

    #[test]
    fn unit_sphere_curvatures() {
        let ff = fundamental_forms(&sphere_jet(1.0, 1.2)).unwrap();
        // outward chart normal is -x here, so H = +1 under n = φu × φv / |..|
        assert!((ff.h.abs() - 1.0).abs() < 1e-12);
        assert!((ff.k - 1.0).abs() < 1e-12);
        assert!((ff.sqrt_det - 1.2f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn plane_is_flat() {
        let (ju, jv) = Jet2::seed(0.3, -0.7).unwrap();
        let sj = SurfaceJet {
            x: ju,
            y: jv,
            z: Jet2::constant(0.0),
        };
        let ff = fundamental_forms(&sj).unwrap();
        assert_eq!((ff.e, ff.f, ff.g), (1.0, 0.0, 1.0));
        assert_eq!((ff.h, ff.k), (0.0, 0.0));
        assert_eq!(ff.normal, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn collapsed_chart_is_degenerate() {
        let (ju, _) = Jet2::seed(0.3, 0.2).unwrap();
        let sj = SurfaceJet {
            x: ju,
            y: ju,
            z: Jet2::constant(1.0),
        };
        assert!(matches!(
            fundamental_forms(&sj),
            Err(Error::DegenerateMetric(_))
        ));
    }

    #[test]
    fn huber_arithmetic() {
        assert_eq!(huber_h2(3.0, 4.0), 8.0);
        assert_eq!(huber_h2(-3.0, 4.0), 8.0);
        assert_eq!(huber_h2(1.5, 4.0), 2.25);
    }

    #[test]
    fn equator_integrand_is_one() {
        let ff = fundamental_forms(&sphere_jet(0.4, std::f64::consts::FRAC_PI_2)).unwrap();
        assert!((willmore_integrand(&ff, None) - 1.0).abs() < 1e-12);
    }
}
