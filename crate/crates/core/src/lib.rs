//! Stationary radiative transfer on convex domains: source iteration in
//! chord-weighted `L^p` spaces and numerical checks of the a-priori,
//! derivative, trace and spectral estimates.

pub mod analysis;
pub mod coefficients;
pub mod error;
pub mod geometry;
pub mod operators;
pub mod phase_space;
pub mod solver;

mod par;
mod sphere;

pub use error::{Error, Result};
