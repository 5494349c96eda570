//! Mesh-free Willmore flow. A small MLP per chart maps a parameter domain
//! into R³; second derivatives come from forward-mode 2-jets, weight
//! gradients from a reverse-mode tape, and the bending energy is a Monte
//! Carlo estimate over freshly sampled domain points.
//!
//! Genus 0 uses one spherical chart, genus 1 one periodic chart, genus 2
//! two punctured periodic charts glued across a neck.

pub mod config;
pub mod driver;
pub mod error;
pub mod features;
pub mod geometry;
pub mod jet;
pub mod losses;
pub mod net;
pub mod optim;
pub mod sampling;

pub use error::{Error, Result};
