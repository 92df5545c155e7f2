use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::operator::apply_raw;
use super::{ScalarField, TorusGrid, WeightField};
use crate::error::{Error, Result};
use crate::numeric;

/// Riesz map of the energy inner product: solves `A_ρ w = g` on zero-mean
/// fields. This turns the L² gradient into the gradient with respect to
/// `‖·‖_ρ`, the metric the functional lives in.
///
/// Preconditioned CG with the unweighted periodic Laplacian, inverted by FFT
/// and scaled by the mean of `ρ`. For constant `ρ` the preconditioner is
/// exact.
pub struct RieszMap {
    grid: TorusGrid,
    rho: Vec<f64>,
    rho_mean: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    symbol: Vec<f64>,
    rel_tol: f64,
    max_iters: usize,
}

impl std::fmt::Debug for RieszMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RieszMap")
            .field("grid", &self.grid)
            .field("rho_mean", &self.rho_mean)
            .field("rel_tol", &self.rel_tol)
            .finish()
    }
}

impl RieszMap {
    pub fn new(rho: &WeightField) -> Self {
        let grid = *rho.grid();
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let inv_h2 = 1.0 / grid.cell_area();
        let s = |k: usize| (std::f64::consts::PI * k as f64 / n as f64).sin().powi(2);
        let symbol = (0..n * n)
            .map(|idx| 4.0 * inv_h2 * (s(idx / n) + s(idx % n)))
            .collect();
        Self {
            grid,
            rho: rho.values().to_vec(),
            rho_mean: rho.mean(),
            forward,
            inverse,
            symbol,
            rel_tol: 1e-11,
            max_iters: 2000,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Returns the zero-mean `w` with `A_ρ w = g − mean(g)`.
    pub fn solve(&self, g: &ScalarField) -> Result<ScalarField> {
        self.grid.check_same(g.grid())?;
        let mut b = g.values().to_vec();
        remove_mean(&mut b);
        let w = pcg(
            &self.grid,
            |x, out| apply_raw(&self.grid, &self.rho, x, out),
            |r| self.precondition(r),
            &b,
            self.rel_tol,
            self.max_iters,
        )?;
        Ok(ScalarField::from_raw(self.grid, w))
    }

    fn transform(&self, buf: &mut [Complex<f64>], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        fft.process(buf);
        transpose(buf, n);
        fft.process(buf);
        transpose(buf, n);
    }

    fn precondition(&self, r: &[f64]) -> Vec<f64> {
        let n = self.grid.n();
        let mut buf: Vec<Complex<f64>> = r.iter().map(|&x| Complex::new(x, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        buf[0] = Complex::new(0.0, 0.0);
        for (c, &lam) in buf.iter_mut().zip(&self.symbol).skip(1) {
            *c /= lam * self.rho_mean;
        }
        self.transform(&mut buf, &self.inverse);
        let scale = 1.0 / (n * n) as f64;
        let mut out: Vec<f64> = buf.iter().map(|c| c.re * scale).collect();
        remove_mean(&mut out);
        out
    }
}

fn transpose(buf: &mut [Complex<f64>], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

pub(crate) fn remove_mean(x: &mut [f64]) {
    let mean = numeric::sum(x.iter().copied()) / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// Preconditioned conjugate gradients for a symmetric operator that is
/// positive definite on zero-mean vectors. `b` must be zero-mean.
pub(crate) fn pcg(
    grid: &TorusGrid,
    apply: impl Fn(&[f64], &mut [f64]),
    precondition: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    rel_tol: f64,
    max_iters: usize,
) -> Result<Vec<f64>> {
    let len = b.len();
    let b_norm = numeric::dot(b, b).sqrt();
    let mut x = vec![0.0; len];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = numeric::dot(&r, &z);
    let mut ap = vec![0.0; len];
    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        apply(&p, &mut ap);
        let pap = numeric::dot(&p, &ap);
        if !(pap > 0.0 && pap.is_finite()) {
            break;
        }
        let alpha = rz / pap;
        for k in 0..len {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        // rounding leaks a constant into r that A cannot remove; keep the
        // Krylov space inside the zero-mean subspace
        remove_mean(&mut r);
        let r_norm = numeric::dot(&r, &r).sqrt();
        if r_norm <= rel_tol * b_norm {
            remove_mean(&mut x);
            return Ok(x);
        }
        z = precondition(&r);
        let rz_next = numeric::dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for k in 0..len {
            p[k] = z[k] + beta * p[k];
        }
    }
    apply(&x, &mut ap);
    let res: f64 = numeric::sum(b.iter().zip(&ap).map(|(bi, ai)| (bi - ai).powi(2))).sqrt();
    Err(Error::ConvergenceFailure {
        iterations,
        last_estimate: res / b_norm,
        last_iterate: Box::new(ScalarField::from_raw(*grid, x)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::weighted_laplacian_apply;

    fn residual(rho: &WeightField, w: &ScalarField, g: &ScalarField) -> f64 {
        let aw = weighted_laplacian_apply(rho, w).unwrap();
        let gm = g.mean();
        aw.values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| (a - (b - gm)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn uniform_weight_is_inverted_exactly() {
        let grid = TorusGrid::new(2.0 * std::f64::consts::PI, 32).unwrap();
        let rho = WeightField::uniform(grid, 2.5).unwrap();
        let g =
            ScalarField::from_fn(grid, |x, y| (3.0 * x).sin() + (x + 2.0 * y).cos() + 0.3).unwrap();
        let w = RieszMap::new(&rho).solve(&g).unwrap();
        assert!(residual(&rho, &w, &g) < 1e-9);
        assert!(w.mean().abs() < 1e-14);
    }

    #[test]
    fn variable_weight_converges() {
        let grid = TorusGrid::new(1.0, 24).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        let rho = WeightField::new(
            ScalarField::from_fn(grid, |x, y| 1.0 + 0.8 * (tau * x).cos() * (tau * y).cos())
                .unwrap(),
        )
        .unwrap();
        let g =
            ScalarField::from_fn(grid, |x, y| (tau * x).sin() * (2.0 * tau * y).cos() + x).unwrap();
        let w = RieszMap::new(&rho).solve(&g).unwrap();
        let scale = g.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(residual(&rho, &w, &g) < 1e-8 * scale);
    }
}
