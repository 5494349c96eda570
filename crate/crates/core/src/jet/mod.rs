//! Second-order forward jets in the chart coordinates, carried on a
//! reverse-mode tape over the network weights.

mod jet2;
mod real;
mod tape;

pub use jet2::{Jet2, JetOp, DIV_EPS};
pub use real::Real;
pub use tape::{Adjoints, GradientVector, Tape, Var};
