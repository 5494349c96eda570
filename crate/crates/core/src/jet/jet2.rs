use std::ops::{Add, Mul, Neg, Sub};

use super::real::Real;
use crate::error::{Error, Result};

/// Smallest divisor magnitude accepted by [`Jet2::try_div`].
pub const DIV_EPS: f64 = 1e-300;

/// A scalar together with its first and second partials in the chart
/// coordinates `(u, v)`. The mixed partial is stored once.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T> {
    pub f: T,
    pub du: T,
    pub dv: T,
    pub duu: T,
    pub duv: T,
    pub dvv: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Jet2<f64> {
    /// Coordinate jets for `u` and `v` at the point `(u, v)`.
    pub fn seed(u: f64, v: f64) -> Result<(Jet2<f64>, Jet2<f64>)> {
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::InvalidSample { u, v });
        }
        let mut ju = Jet2::constant(u);
        ju.du = 1.0;
        let mut jv = Jet2::constant(v);
        jv.dv = 1.0;
        Ok((ju, jv))
    }

    /// Re-expresses a constant jet in the context of `ctx` (e.g. on a tape).
    pub fn lift<T: Real>(&self, ctx: T) -> Jet2<T> {
        Jet2 {
            f: ctx.lift(self.f),
            du: ctx.lift(self.du),
            dv: ctx.lift(self.dv),
            duu: ctx.lift(self.duu),
            duv: ctx.lift(self.duv),
            dvv: ctx.lift(self.dvv),
        }
    }

    /// Reduces the value into `[0, 2π)`; derivatives are unchanged since the
    /// shift is constant.
    pub fn wrap_2pi(mut self) -> Self {
        self.f = self.f.rem_euclid(std::f64::consts::TAU);
        self
    }
}

impl<T: Real> Jet2<T> {
    pub fn constant(c: T) -> Self {
        let z = c.zero();
        Jet2 {
            f: c,
            du: z,
            dv: z,
            duu: z,
            duv: z,
            dvv: z,
        }
    }

    /// `∂v∂u`, which is the stored `∂u∂v` slot.
    pub fn dvu(&self) -> T {
        self.duv
    }

    pub fn slots(&self) -> [T; 6] {
        [self.f, self.du, self.dv, self.duu, self.duv, self.dvv]
    }

    pub fn from_slots(s: [T; 6]) -> Self {
        Jet2 {
            f: s[0],
            du: s[1],
            dv: s[2],
            duu: s[3],
            duv: s[4],
            dvv: s[5],
        }
    }

    pub fn values(&self) -> Jet2<f64> {
        Jet2::from_slots(self.slots().map(Real::value))
    }

    /// Composes a scalar function with this jet given its value and its
    /// first and second derivatives at `self.f`.
    pub fn chain(&self, g0: T, g1: T, g2: T) -> Self {
        Jet2 {
            f: g0,
            du: g1 * self.du,
            dv: g1 * self.dv,
            duu: g1 * self.duu + g2 * self.du * self.du,
            duv: g1 * self.duv + g2 * self.du * self.dv,
            dvv: g1 * self.dvv + g2 * self.dv * self.dv,
        }
    }

    pub fn scale(&self, k: T) -> Self {
        Jet2::from_slots(self.slots().map(|s| s * k))
    }

    pub fn tanh(&self) -> Self {
        let t = self.f.tanh();
        let s = self.f.lift(1.0) - t * t;
        self.chain(t, s, t * s * -2.0)
    }

    /// `(sin a, cos a)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let s = self.f.sin();
        let c = self.f.cos();
        (self.chain(s, c, -s), self.chain(c, -s, -c))
    }

    pub fn sqrt(&self) -> Self {
        let r = self.f.sqrt();
        let g1 = self.f.lift(0.5) / r;
        let g2 = g1 / self.f * -0.5;
        self.chain(r, g1, g2)
    }

    pub fn ln(&self) -> Self {
        let g1 = self.f.lift(1.0) / self.f;
        self.chain(self.f.ln(), g1, -(g1 * g1))
    }

    pub fn recip(&self) -> Self {
        let q = self.f.lift(1.0) / self.f;
        let q2 = q * q;
        self.chain(q, -q2, q2 * q * 2.0)
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        let d = rhs.f.value();
        if d.abs() < DIV_EPS || !d.is_finite() {
            return Err(Error::DegenerateDivision(d));
        }
        Ok(*self * rhs.recip())
    }

    pub fn arith(&self, rhs: &Self, op: JetOp) -> Result<Self> {
        Ok(match op {
            JetOp::Add => *self + *rhs,
            JetOp::Sub => *self - *rhs,
            JetOp::Mul => *self * *rhs,
            JetOp::Div => self.try_div(rhs)?,
        })
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Jet2::constant(self.f.lift(1.0));
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }
}

impl<T: Real> Add for Jet2<T> {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Jet2 {
            f: self.f + b.f,
            du: self.du + b.du,
            dv: self.dv + b.dv,
            duu: self.duu + b.duu,
            duv: self.duv + b.duv,
            dvv: self.dvv + b.dvv,
        }
    }
}

impl<T: Real> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Jet2 {
            f: self.f - b.f,
            du: self.du - b.du,
            dv: self.dv - b.dv,
            duu: self.duu - b.duu,
            duv: self.duv - b.duv,
            dvv: self.dvv - b.dvv,
        }
    }
}

impl<T: Real> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        Jet2 {
            f: a.f * b.f,
            du: a.du * b.f + a.f * b.du,
            dv: a.dv * b.f + a.f * b.dv,
            duu: a.duu * b.f + a.du * b.du * 2.0 + a.f * b.duu,
            duv: a.duv * b.f + a.du * b.dv + a.dv * b.du + a.f * b.duv,
            dvv: a.dvv * b.f + a.dv * b.dv * 2.0 + a.f * b.dvv,
        }
    }
}

impl<T: Real> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet2::from_slots(self.slots().map(|s| -s))
    }
}

impl<T: Real> Add<f64> for Jet2<T> {
    type Output = Self;
    fn add(mut self, c: f64) -> Self {
        self.f = self.f + c;
        self
    }
}

impl<T: Real> Mul<f64> for Jet2<T> {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Jet2::from_slots(self.slots().map(|s| s * c))
    }
}
