//! Spectral input encodings. Real spherical harmonics make the sphere chart
//! collapse both poles to single points; Fourier modes make torus charts
//! exactly doubly periodic. Both are emitted as 2-jets in `(u, v)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jet::Jet2;

/// Highest spherical-harmonic degree with a closed form.
pub const MAX_SH_DEGREE: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum FeatureMap {
    /// Real orthonormal harmonics up to the given degree (genus 0).
    Sphere(SphericalHarmonics),
    /// `(sin ku, cos ku, sin kv, cos kv)` for `k = 1..=modes` (genus 1 and 2).
    Fourier { modes: usize },
}

impl FeatureMap {
    pub fn sphere(degree: usize) -> Result<Self> {
        Ok(FeatureMap::Sphere(SphericalHarmonics::new(degree)?))
    }

    pub fn fourier(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::Config("fourier_modes must be at least 1".into()));
        }
        Ok(FeatureMap::Fourier { modes })
    }

    pub fn for_genus(genus: u8, sh_degree: usize, fourier_modes: usize) -> Result<Self> {
        match genus {
            0 => Self::sphere(sh_degree),
            1 | 2 => Self::fourier(fourier_modes),
            g => Err(Error::Config(format!("unsupported genus {g}"))),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            FeatureMap::Sphere(sh) => sh.len(),
            FeatureMap::Fourier { modes } => 4 * modes,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The degree `L` (sphere) or mode count `N` (torus).
    pub fn order(&self) -> usize {
        match self {
            FeatureMap::Sphere(sh) => sh.degree,
            FeatureMap::Fourier { modes } => *modes,
        }
    }

    pub fn eval(&self, u: &Jet2<f64>, v: &Jet2<f64>) -> Vec<Jet2<f64>> {
        let mut out = Vec::with_capacity(self.len());
        self.eval_into(u, v, &mut out);
        out
    }

    pub fn eval_into(&self, u: &Jet2<f64>, v: &Jet2<f64>, out: &mut Vec<Jet2<f64>>) {
        match self {
            FeatureMap::Sphere(sh) => sh.eval_into(u, v, out),
            FeatureMap::Fourier { modes } => fourier_into(u, v, *modes, out),
        }
    }

    /// Seeds coordinate jets and evaluates the feature vector at `(u, v)`.
    pub fn at(&self, u: f64, v: f64) -> Result<Vec<Jet2<f64>>> {
        let (ju, jv) = Jet2::seed(u, v)?;
        Ok(self.eval(&ju, &jv))
    }
}

pub fn sphere_features(u: &Jet2<f64>, v: &Jet2<f64>, degree: usize) -> Result<Vec<Jet2<f64>>> {
    Ok(FeatureMap::sphere(degree)?.eval(u, v))
}

pub fn torus_features(u: &Jet2<f64>, v: &Jet2<f64>, modes: usize) -> Result<Vec<Jet2<f64>>> {
    Ok(FeatureMap::fourier(modes)?.eval(u, v))
}

fn fourier_into(u: &Jet2<f64>, v: &Jet2<f64>, modes: usize, out: &mut Vec<Jet2<f64>>) {
    let u = u.wrap_2pi();
    let v = v.wrap_2pi();
    for k in 1..=modes {
        let k = k as f64;
        let (su, cu) = (u * k).sin_cos();
        let (sv, cv) = (v * k).sin_cos();
        out.extend([su, cu, sv, cv]);
    }
}

/// One real harmonic `c · sin^m(v) · Q(cos v) · trig(|m| u)` where `Q` is the
/// `m`-th derivative of the Legendre polynomial `P_l`.
#[derive(Clone, Debug, PartialEq)]
struct Harmonic {
    l: usize,
    m: i32,
    norm: f64,
    /// Coefficients of `Q` in ascending powers of `cos v`.
    poly: Vec<f64>,
}

/// Real orthonormal spherical harmonics without Condon-Shortley phase,
/// ordered `(0,0), (1,-1), (1,0), (1,1), (2,-2), ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalHarmonics {
    degree: usize,
    terms: Vec<Harmonic>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Ascending coefficients of the Legendre polynomial `P_l`.
fn legendre_coefficients(l: usize) -> Vec<f64> {
    let mut c = vec![0.0; l + 1];
    let scale = 2f64.powi(-(l as i32));
    for k in 0..=l / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[l - 2 * k] = scale * sign * binomial(l, k) * binomial(2 * l - 2 * k, l);
    }
    c
}

fn differentiate(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(p, &a)| a * p as f64)
        .collect()
}

impl SphericalHarmonics {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > MAX_SH_DEGREE {
            return Err(Error::UnsupportedDegree(degree));
        }
        let mut terms = Vec::with_capacity((degree + 1) * (degree + 1));
        for l in 0..=degree {
            let legendre = legendre_coefficients(l);
            for m in -(l as i32)..=(l as i32) {
                let am = m.unsigned_abs() as usize;
                let mut poly = legendre.clone();
                for _ in 0..am {
                    poly = differentiate(&poly);
                }
                let mut norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am)
                    / factorial(l + am))
                .sqrt();
                if m != 0 {
                    norm *= std::f64::consts::SQRT_2;
                }
                terms.push(Harmonic { l, m, norm, poly });
            }
        }
        Ok(SphericalHarmonics { degree, terms })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(l, m)` of each feature slot.
    pub fn indices(&self) -> impl Iterator<Item = (usize, i32)> + '_ {
        self.terms.iter().map(|t| (t.l, t.m))
    }

    /// `u` is the azimuth, `v` the polar angle.
    pub fn eval_into(&self, u: &Jet2<f64>, v: &Jet2<f64>, out: &mut Vec<Jet2<f64>>) {
        let (sv, cv) = v.sin_cos();
        let mut sin_pow = vec![Jet2::constant(1.0)];
        for m in 1..=self.degree {
            let next = sin_pow[m - 1] * sv;
            sin_pow.push(next);
        }
        let trig: Vec<(Jet2<f64>, Jet2<f64>)> = (0..=self.degree)
            .map(|m| (*u * m as f64).sin_cos())
            .collect();
        for t in &self.terms {
            let am = t.m.unsigned_abs() as usize;
            let mut q = Jet2::constant(*t.poly.last().unwrap_or(&0.0));
            for &c in t.poly.iter().rev().skip(1) {
                q = q * cv + c;
            }
            let radial = sin_pow[am] * q * t.norm;
            let y = match t.m {
                0 => radial,
                m if m < 0 => radial * trig[am].0,
                _ => radial * trig[am].1,
            };
            out.push(y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    #[test]
    fn legendre_p2_p3() {
        assert_eq!(legendre_coefficients(2), vec![-0.5, 0.0, 1.5]);
        assert_eq!(legendre_coefficients(3), vec![0.0, -1.5, 0.0, 2.5]);
    }

    #[test]
    fn counts() {
        for l in 0..=MAX_SH_DEGREE {
            assert_eq!(FeatureMap::sphere(l).unwrap().len(), (l + 1) * (l + 1));
        }
        assert_eq!(FeatureMap::fourier(2).unwrap().len(), 8);
        assert_eq!(FeatureMap::fourier(6).unwrap().len(), 24);
        assert!(matches!(
            FeatureMap::sphere(9),
            Err(Error::UnsupportedDegree(9))
        ));
        assert!(FeatureMap::fourier(0).is_err());
    }

    #[test]
    fn constant_harmonic() {
        let f = FeatureMap::sphere(2).unwrap().at(0.7, 1.9).unwrap();
        assert!((f[0].f - 0.282_094_791_773_878_1).abs() < 1e-15);
        assert_eq!(&f[0].slots()[1..], &[0.0; 5]);
    }

    #[test]
    fn ordering_and_known_values() {
        // Y_1^{-1} = sqrt(3/4π) sin v sin u, Y_1^0 = sqrt(3/4π) cos v
        let sh = FeatureMap::sphere(2).unwrap();
        let (u, v) = (0.4, 1.1);
        let f = sh.at(u, v).unwrap();
        let c = (3.0 / (4.0 * PI)).sqrt();
        assert!((f[1].f - c * v.sin() * u.sin()).abs() < 1e-15);
        assert!((f[2].f - c * v.cos()).abs() < 1e-15);
        assert!((f[3].f - c * v.sin() * u.cos()).abs() < 1e-15);
        // Y_2^2 = sqrt(15/16π) sin^2 v cos 2u
        let c22 = (15.0 / (16.0 * PI)).sqrt();
        assert!((f[8].f - c22 * v.sin().powi(2) * (2.0 * u).cos()).abs() < 1e-14);
    }

    #[test]
    fn poles_zero_non_axial_harmonics() {
        let sh = SphericalHarmonics::new(2).unwrap();
        let idx: Vec<_> = sh.indices().collect();
        let fm = FeatureMap::Sphere(sh);
        for pole in [0.0, PI] {
            let f = fm.at(1.3, pole).unwrap();
            for (j, (_, m)) in idx.iter().enumerate() {
                if *m != 0 {
                    // sin(π) is not exactly zero in floating point
                    let tol = if pole == 0.0 { 0.0 } else { 1e-15 };
                    assert!(f[j].f.abs() <= tol, "feature {j} = {}", f[j].f);
                }
            }
        }
    }

    #[test]
    fn north_pole_u_independent() {
        let sh = FeatureMap::sphere(2).unwrap();
        let a = sh.at(0.1, 0.0).unwrap();
        let b = sh.at(5.9, 0.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.f, y.f);
        }
    }

    #[test]
    fn fourier_at_origin() {
        let f = FeatureMap::fourier(2).unwrap().at(0.0, 0.0).unwrap();
        let vals: Vec<f64> = f.iter().map(|j| j.f).collect();
        assert_eq!(vals, vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn fourier_quarter_turn() {
        let f = FeatureMap::fourier(1).unwrap().at(FRAC_PI_2, 0.0).unwrap();
        assert_eq!(f[0].f, 1.0);
        assert!(f[1].f.abs() < 1e-16);
        assert_eq!((f[2].f, f[3].f), (0.0, 1.0));
        // d/du sin u = cos u = 0 at π/2
        assert!(f[0].du.abs() < 1e-16);
    }

    #[test]
    fn fourier_wraps_exact_period() {
        let fm = FeatureMap::fourier(3).unwrap();
        let a = fm.at(0.0, 1.7).unwrap();
        let b = fm.at(TAU, 1.7).unwrap();
        assert_eq!(a, b);
    }
}
