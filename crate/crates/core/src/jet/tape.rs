//! Wengert-list reverse-mode differentiation over scalar nodes.
//!
//! Every arithmetic operation on a [`Var`] appends one node holding up to two
//! parent indices and the local partial derivative toward each. A reverse
//! sweep in creation order accumulates adjoints. Parameters registered with
//! [`Tape::param`] receive their gradient in registration order.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Flat gradient, one entry per registered parameter in registration order.
pub type GradientVector = Vec<f64>;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    lhs: u32,
    rhs: u32,
    d_lhs: f64,
    d_rhs: f64,
}

impl Node {
    const LEAF: Node = Node {
        lhs: NONE,
        rhs: NONE,
        d_lhs: 0.0,
        d_rhs: 0.0,
    };
}

#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
    params: RefCell<Vec<u32>>,
    first_non_finite: Cell<Option<(usize, f64)>>,
}

impl fmt::Debug for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tape")
            .field("nodes", &self.nodes.borrow().len())
            .field("params", &self.params.borrow().len())
            .finish()
    }
}

/// A scalar recorded on a [`Tape`].
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    idx: u32,
    val: f64,
}

impl fmt::Debug for Var<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Var#{}({})", self.idx, self.val)
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(nodes: usize) -> Self {
        Tape {
            nodes: RefCell::new(Vec::with_capacity(nodes)),
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn param_count(&self) -> usize {
        self.params.borrow().len()
    }

    fn push(&self, node: Node, val: f64) -> Var<'_> {
        let mut nodes = self.nodes.borrow_mut();
        let idx = nodes.len();
        assert!(idx < NONE as usize, "tape overflow");
        if !val.is_finite() && self.first_non_finite.get().is_none() {
            self.first_non_finite.set(Some((idx, val)));
        }
        nodes.push(node);
        Var {
            tape: self,
            idx: idx as u32,
            val,
        }
    }

    /// Registers a trainable parameter. Its gradient slot follows the
    /// order of registration.
    pub fn param(&self, val: f64) -> Var<'_> {
        let v = self.push(Node::LEAF, val);
        self.params.borrow_mut().push(v.idx);
        v
    }

    /// A leaf whose adjoint can be read back after [`Tape::backward`] but
    /// which is not part of the gradient vector.
    pub fn input(&self, val: f64) -> Var<'_> {
        self.push(Node::LEAF, val)
    }

    pub fn constant(&self, val: f64) -> Var<'_> {
        self.push(Node::LEAF, val)
    }

    fn unary(&self, a: Var<'_>, d: f64, val: f64) -> Var<'_> {
        self.push(
            Node {
                lhs: a.idx,
                rhs: NONE,
                d_lhs: d,
                d_rhs: 0.0,
            },
            val,
        )
    }

    fn binary(&self, a: Var<'_>, da: f64, b: Var<'_>, db: f64, val: f64) -> Var<'_> {
        debug_assert!(std::ptr::eq(a.tape, b.tape), "mixing vars from two tapes");
        self.push(
            Node {
                lhs: a.idx,
                rhs: b.idx,
                d_lhs: da,
                d_rhs: db,
            },
            val,
        )
    }

    /// Reverse sweep from `loss`. The tape is drained: afterwards it is empty
    /// and ready for the next batch.
    pub fn backward(&self, loss: Var<'_>) -> Result<Adjoints> {
        debug_assert!(std::ptr::eq(loss.tape, self));
        let nodes = std::mem::take(&mut *self.nodes.borrow_mut());
        let params = std::mem::take(&mut *self.params.borrow_mut());
        if let Some((node, val)) = self.first_non_finite.take() {
            return Err(Error::NonFiniteGradient {
                node,
                detail: format!("forward value {val} recorded at creation"),
            });
        }
        let mut adj: Vec<f64> = vec![0.0; nodes.len()];
        adj[loss.idx as usize] = 1.0;
        for i in (0..=loss.idx as usize).rev() {
            let a = adj[i];
            if a == 0.0 {
                continue;
            }
            if !a.is_finite() {
                return Err(Error::NonFiniteGradient {
                    node: i,
                    detail: format!("adjoint {a}"),
                });
            }
            let n = nodes[i];
            if n.lhs != NONE {
                adj[n.lhs as usize] += a * n.d_lhs;
            }
            if n.rhs != NONE {
                adj[n.rhs as usize] += a * n.d_rhs;
            }
        }
        Ok(Adjoints { adj, params })
    }

    /// Gradient of `loss` with respect to every registered parameter.
    pub fn gradient(&self, loss: Var<'_>) -> Result<GradientVector> {
        Ok(self.backward(loss)?.gradient())
    }
}

/// Result of a reverse sweep.
#[derive(Debug, Clone)]
pub struct Adjoints {
    adj: Vec<f64>,
    params: Vec<u32>,
}

impl Adjoints {
    /// Adjoint of any node recorded before the sweep.
    pub fn wrt(&self, v: Var<'_>) -> f64 {
        self.adj[v.idx as usize]
    }

    pub fn gradient(&self) -> GradientVector {
        self.params.iter().map(|&i| self.adj[i as usize]).collect()
    }
}

impl<'t> Var<'t> {
    pub fn value(self) -> f64 {
        self.val
    }

    pub fn index(self) -> usize {
        self.idx as usize
    }

    pub fn tape(self) -> &'t Tape {
        self.tape
    }

    pub fn sqrt(self) -> Self {
        let s = self.val.sqrt();
        self.tape.unary(self, 0.5 / s, s)
    }

    pub fn ln(self) -> Self {
        self.tape.unary(self, 1.0 / self.val, self.val.ln())
    }

    pub fn tanh(self) -> Self {
        let t = self.val.tanh();
        self.tape.unary(self, 1.0 - t * t, t)
    }

    pub fn sin(self) -> Self {
        self.tape.unary(self, self.val.cos(), self.val.sin())
    }

    pub fn cos(self) -> Self {
        self.tape.unary(self, -self.val.sin(), self.val.cos())
    }

    pub fn abs(self) -> Self {
        let d = if self.val < 0.0 { -1.0 } else { 1.0 };
        self.tape.unary(self, d, self.val.abs())
    }

    /// `max(0, x)`; the gate is closed (zero partial) at `x <= 0`.
    pub fn relu(self) -> Self {
        if self.val > 0.0 {
            self.tape.unary(self, 1.0, self.val)
        } else {
            self.tape.unary(self, 0.0, 0.0)
        }
    }
}

impl<'t> Add for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: Self) -> Self {
        self.tape.binary(self, 1.0, rhs, 1.0, self.val + rhs.val)
    }
}

impl<'t> Sub for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: Self) -> Self {
        self.tape.binary(self, 1.0, rhs, -1.0, self.val - rhs.val)
    }
}

impl<'t> Mul for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: Self) -> Self {
        self.tape
            .binary(self, rhs.val, rhs, self.val, self.val * rhs.val)
    }
}

impl<'t> Div for Var<'t> {
    type Output = Var<'t>;
    fn div(self, rhs: Self) -> Self {
        let q = self.val / rhs.val;
        self.tape.binary(self, 1.0 / rhs.val, rhs, -q / rhs.val, q)
    }
}

impl<'t> Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Self {
        self.tape.unary(self, -1.0, -self.val)
    }
}

impl<'t> Add<f64> for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: f64) -> Self {
        self.tape.unary(self, 1.0, self.val + rhs)
    }
}

impl<'t> Sub<f64> for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: f64) -> Self {
        self.tape.unary(self, 1.0, self.val - rhs)
    }
}

impl<'t> Mul<f64> for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: f64) -> Self {
        self.tape.unary(self, rhs, self.val * rhs)
    }
}

impl<'t> Div<f64> for Var<'t> {
    type Output = Var<'t>;
    fn div(self, rhs: f64) -> Self {
        self.tape.unary(self, 1.0 / rhs, self.val / rhs)
    }
}

impl<'t> Add<Var<'t>> for f64 {
    type Output = Var<'t>;
    fn add(self, rhs: Var<'t>) -> Var<'t> {
        rhs + self
    }
}

impl<'t> Sub<Var<'t>> for f64 {
    type Output = Var<'t>;
    fn sub(self, rhs: Var<'t>) -> Var<'t> {
        rhs.tape.unary(rhs, -1.0, self - rhs.val)
    }
}

impl<'t> Mul<Var<'t>> for f64 {
    type Output = Var<'t>;
    fn mul(self, rhs: Var<'t>) -> Var<'t> {
        rhs * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_gradient() {
        let tape = Tape::new();
        let th = tape.param(3.0);
        let loss = th * th;
        assert_eq!(tape.gradient(loss).unwrap(), vec![6.0]);
        assert!(tape.is_empty());
    }

    #[test]
    fn unused_param_has_zero_gradient() {
        let tape = Tape::new();
        let a = tape.param(2.0);
        let _b = tape.param(5.0);
        let loss = a.sin() * 4.0;
        let g = tape.gradient(loss).unwrap();
        assert_eq!(g[1], 0.0);
        assert!((g[0] - 4.0 * 2f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn shared_subexpression_accumulates() {
        let tape = Tape::new();
        let x = tape.param(1.5);
        let y = x * x;
        let loss = y * y + y; // x^4 + x^2
        let g = tape.gradient(loss).unwrap();
        assert!((g[0] - (4.0 * 1.5f64.powi(3) + 2.0 * 1.5)).abs() < 1e-12);
    }

    #[test]
    fn non_finite_forward_is_reported() {
        let tape = Tape::new();
        let x = tape.param(-1.0);
        let loss = x.ln();
        match tape.gradient(loss) {
            Err(Error::NonFiniteGradient { node, .. }) => assert_eq!(node, 1),
            other => panic!("expected NonFiniteGradient, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_adjoint_is_reported() {
        let tape = Tape::new();
        let x = tape.param(0.0);
        let loss = x.sqrt(); // d/dx sqrt at 0 is infinite
        assert!(matches!(
            tape.gradient(loss),
            Err(Error::NonFiniteGradient { .. })
        ));
    }

    #[test]
    fn relu_gate() {
        let tape = Tape::new();
        let a = tape.param(-0.5);
        let b = tape.param(0.25);
        let loss = a.relu() + b.relu() * 2.0;
        assert_eq!(loss.value(), 0.5);
        assert_eq!(tape.gradient(loss).unwrap(), vec![0.0, 2.0]);
    }

    #[test]
    fn scalar_mixed_ops() {
        let tape = Tape::new();
        let x = tape.param(0.7);
        let loss = (1.0 - x) / (x + 2.0) * 3.0 - (2.0 * x).tanh() + x.cos().abs();
        let g = tape.gradient(loss).unwrap()[0];
        let f = |x: f64| (1.0 - x) / (x + 2.0) * 3.0 - (2.0 * x).tanh() + x.cos().abs();
        let h = 1e-6;
        let fd = (f(0.7 + h) - f(0.7 - h)) / (2.0 * h);
        assert!((g - fd).abs() < 1e-8, "{g} vs {fd}");
    }
}
