//! The flat square torus `[0, L)²`, its grid fields and the weighted
//! operator `A_ρ v = −div(ρ∇v)`.
//!
//! `A_ρ` is assembled from staggered face fluxes with arithmetic-mean face
//! weights. Both [`weighted_laplacian_apply`] and [`dirichlet_energy`] are
//! built from the same fluxes, so `⟨A_ρ v, v⟩ = ‖v‖_ρ²` holds as an algebraic
//! identity rather than up to truncation error.

mod eigen;
mod field;
mod grid;
mod io;
pub(crate) mod operator;
pub(crate) mod poisson;

pub use eigen::{first_eigenvalue, first_weighted_eigenvalue, EIGEN_MAX_ITERS, EIGEN_REL_TOL};
pub use field::{ScalarField, WeightField, DEGENERATE_RATIO};
pub use grid::TorusGrid;
pub use io::{format_field, parse_field, read_field, write_field, WeightPreset};
pub use operator::{dirichlet_energy, inner, integrate, l2_norm, weighted_laplacian_apply};
pub use poisson::RieszMap;
