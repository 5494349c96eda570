use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::tape::Var;

/// Scalar arithmetic shared by plain `f64` evaluation and taped [`Var`]s.
///
/// Geometry, features and losses are written once against this trait and
/// run either as plain numerics or recorded for reverse-mode sweeps.
pub trait Real:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn value(self) -> f64;
    /// A constant living in the same context as `self`.
    fn lift(self, c: f64) -> Self;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn tanh(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn abs(self) -> Self;
    fn relu(self) -> Self;

    fn square(self) -> Self {
        self * self
    }

    fn zero(self) -> Self {
        self.lift(0.0)
    }

    /// Same value, no dependence on anything upstream.
    fn detach(self) -> Self {
        self.lift(self.value())
    }
}

impl Real for f64 {
    fn value(self) -> f64 {
        self
    }
    fn lift(self, c: f64) -> Self {
        c
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn relu(self) -> Self {
        if self > 0.0 {
            self
        } else {
            0.0
        }
    }
}

impl<'t> Real for Var<'t> {
    fn value(self) -> f64 {
        Var::value(self)
    }
    fn lift(self, c: f64) -> Self {
        self.tape().constant(c)
    }
    fn sqrt(self) -> Self {
        Var::sqrt(self)
    }
    fn ln(self) -> Self {
        Var::ln(self)
    }
    fn tanh(self) -> Self {
        Var::tanh(self)
    }
    fn sin(self) -> Self {
        Var::sin(self)
    }
    fn cos(self) -> Self {
        Var::cos(self)
    }
    fn abs(self) -> Self {
        Var::abs(self)
    }
    fn relu(self) -> Self {
        Var::relu(self)
    }
}
