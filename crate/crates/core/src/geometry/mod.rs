//! Pointwise differential geometry of an immersion given as a 2-jet, plus
//! closed-form reference surfaces and a deterministic quadrature oracle.

mod forms;
mod quadrature;
mod reference;

pub use forms::{fundamental_forms, huber_h2, willmore_integrand, FundamentalForms, Metric, DET_EPS};
pub use quadrature::{
    default_oracle_surfaces, euler_characteristic, gauss_bonnet_defect, gauss_legendre,
    quadrature_integrals, quadrature_willmore, torus_willmore_closed_form, OracleRow,
    SurfaceIntegrals,
};
pub use reference::{Immersion, ReferenceSurface};
