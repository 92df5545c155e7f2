use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operator::apply_raw;
use super::poisson::{pcg, remove_mean};
use super::{ScalarField, TorusGrid, WeightField};
use crate::error::{Error, Result};
use crate::numeric;

/// Relative tolerance on the eigenvalue.
pub const EIGEN_REL_TOL: f64 = 1e-8;
/// Outer iteration cap for inverse iteration.
pub const EIGEN_MAX_ITERS: usize = 10_000;

/// Smallest nonzero eigenvalue `μ1` of the unweighted discrete Laplacian.
pub fn first_eigenvalue(grid: &TorusGrid) -> Result<f64> {
    let rho = WeightField::uniform(*grid, 1.0)?;
    first_weighted_eigenvalue(&rho)
}

/// Smallest nonzero eigenvalue of `A_ρ` on zero-mean fields, by inverse
/// power iteration with CG inner solves and a Rayleigh-quotient estimate.
pub fn first_weighted_eigenvalue(rho: &WeightField) -> Result<f64> {
    let grid = *rho.grid();
    let len = grid.len();
    let apply = |x: &[f64], out: &mut [f64]| apply_raw(&grid, rho.values(), x, out);

    let mut rng = ChaCha8Rng::seed_from_u64(0x006d_7531_5f65_6967);
    let mut x: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    remove_mean(&mut x);
    normalize(&mut x);

    let mut ax = vec![0.0; len];
    let mut lambda = f64::NAN;
    for iter in 0..EIGEN_MAX_ITERS {
        let mut y = pcg(&grid, apply, |r| r.to_vec(), &x, 1e-13, 20 * len)?;
        remove_mean(&mut y);
        normalize(&mut y);
        x = y;
        apply(&x, &mut ax);
        let next = numeric::dot(&x, &ax);
        // ‖A x − λx‖ / λ bounds the squared eigenvector error, so 1e-6 here
        // leaves the Rayleigh quotient accurate far below EIGEN_REL_TOL.
        let res = numeric::sum(ax.iter().zip(&x).map(|(a, v)| (a - next * v).powi(2))).sqrt();
        let settled = (next - lambda).abs() <= EIGEN_REL_TOL * next.abs();
        lambda = next;
        if iter > 0 && settled && res <= 1e-6 * lambda.abs() {
            return Ok(lambda);
        }
    }
    Err(Error::ConvergenceFailure {
        iterations: EIGEN_MAX_ITERS,
        last_estimate: lambda,
        last_iterate: Box::new(ScalarField::from_raw(grid, x)),
    })
}

fn normalize(x: &mut [f64]) {
    let n = numeric::dot(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}
