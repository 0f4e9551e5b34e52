//! Numerical Ricci flow on rotationally symmetric, asymptotically flat metrics on R^n,
//! with the scale-invariant curvature, Sobolev and entropy functionals that govern
//! curvature pinching.
//!
//! Metrics are warped products `g = φ² ds² + f² dσ²` sampled on a fixed radial grid.

pub mod c1_search;
pub mod cli;
pub mod error;
pub mod flow;
pub mod functionals;
pub mod geometry;
pub mod numerics;

pub use error::{Error, Result};
