//! Mountain-pass solutions of the weighted mean field equation on a flat torus.
//!
//! The crate is organised bottom-up:
//!
//! * [`manifold`] discretises the square torus and provides the weighted
//!   operator `−div(ρ∇·)`, quadrature, field I/O and the first nonzero
//!   eigenvalue of the Laplacian.
//! * [`functional`] evaluates the energy functional, the partition functions
//!   and the zero-mean gradient.
//! * [`mountain_pass`] deforms discrete paths from `0` to a negative-energy
//!   endpoint and extracts a Palais-Smale sequence converging to a saddle.
//! * [`diagnostics`] holds the parameter gate, exponential-mass monitors,
//!   Moser-Trudinger deficits and concentration reports.
//! * [`cli`] drives runs from JSON configs and writes result artifacts.

pub mod cli;
pub mod diagnostics;
mod error;
pub mod functional;
pub mod manifold;
pub mod mountain_pass;
mod numeric;

pub use error::{Error, Result};
pub use functional::{FunctionalReport, InteractionParams};
pub use manifold::{ScalarField, TorusGrid, WeightField};
pub use mountain_pass::{MountainPassResult, PathState, SolverConfig, Status};

/// `8π`, the critical interaction strength of the single-species problem.
pub const EIGHT_PI: f64 = 8.0 * std::f64::consts::PI;
