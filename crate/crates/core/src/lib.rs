//! Desk-scale laboratory for δ-discretized incidence geometry.
//!
//! Sets and tubes live on the dyadic grid of side δ = 2^-m; every count is
//! exact and every bound is reported as a measured ratio.

pub mod error;
pub mod grid;
pub mod sets;
pub mod fit;
pub mod incidence;
pub mod parabola;
pub mod fourier;
pub mod sumprod;
pub mod harness;

pub use error::{Error, Result};
