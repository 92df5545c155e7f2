//! The energy functional
//!
//! ```text
//! I(v) = ½‖v‖_ρ² − α1·ln(Z1/V) − α2·ln(Z2/V),   Z1 = ∫e^v,  Z2 = ∫e^{−v}
//! ```
//!
//! on zero-mean fields, and its gradient
//!
//! ```text
//! I'(v) = A_ρ v − α1·(e^v/Z1 − 1/V) + α2·(e^{−v}/Z2 − 1/V).
//! ```
//!
//! The `−1/V` terms come out of the zero-mean projection of the raw
//! variation. Partition functions are only ever handled through their
//! logarithms so concentrated fields cannot overflow.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::manifold::operator::{apply_raw, energy_raw};
use crate::manifold::{ScalarField, TorusGrid, WeightField};
use crate::numeric;

/// Vortex interaction strengths `(α1, α2)`, both finite and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionParams {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl InteractionParams {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        let ok = |a: f64| a.is_finite() && a >= 0.0;
        if !ok(alpha1) || !ok(alpha2) {
            return Err(Error::InvalidArgument(format!(
                "interaction strengths must be finite and >= 0, got ({alpha1}, {alpha2})"
            )));
        }
        Ok(Self { alpha1, alpha2 })
    }

    pub fn swapped(&self) -> Self {
        Self {
            alpha1: self.alpha2,
            alpha2: self.alpha1,
        }
    }

    pub fn max(&self) -> f64 {
        self.alpha1.max(self.alpha2)
    }

    pub fn sum(&self) -> f64 {
        self.alpha1 + self.alpha2
    }
}

/// Value of `I` with its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub value: f64,
    /// `½‖v‖_ρ²`
    pub kinetic: f64,
    /// `Z1`; may saturate to `inf` for extreme fields, `ln_z1` never does.
    pub z1: f64,
    pub z2: f64,
    pub ln_z1: f64,
    pub ln_z2: f64,
    /// `ln(Z1/V)`
    pub log_term1: f64,
    /// `ln(Z2/V)`
    pub log_term2: f64,
    /// Quadrature L² norm of the zero-mean gradient.
    pub grad_norm: f64,
}

/// `v − (1/V)∫v`.
pub fn project_zero_mean(v: &ScalarField) -> ScalarField {
    let mean = v.mean();
    v.map(|x| x - mean)
}

/// `(ln Z1, ln Z2)` evaluated as `max(±v) + ln(h² Σ exp(±v − max))`.
pub fn log_partition_functions(v: &ScalarField) -> Result<(f64, f64)> {
    v.check_finite()?;
    Ok(log_partitions_raw(v.values(), v.grid().cell_area()))
}

/// `(Z1, Z2)`. Exponentiates the log form, so the result can be `inf` when
/// `max|v|` exceeds the f64 exponent range.
pub fn partition_functions(v: &ScalarField) -> Result<(f64, f64)> {
    let (l1, l2) = log_partition_functions(v)?;
    Ok((l1.exp(), l2.exp()))
}

pub(crate) fn log_partitions_raw(values: &[f64], cell_area: f64) -> (f64, f64) {
    let ln_area = cell_area.ln();
    (
        numeric::log_sum_exp(values) + ln_area,
        numeric::log_sum_exp_neg(values) + ln_area,
    )
}

/// `ln V` split the same way as the quadrature, so `ln(z/V)` vanishes
/// exactly for constant fields.
pub(crate) fn ln_volume(grid: &TorusGrid) -> f64 {
    (grid.len() as f64).ln() + grid.cell_area().ln()
}

/// `I` evaluated literally on `v`, without projecting to zero mean. On
/// zero-mean fields this is the functional; off them it exposes the shift
/// behaviour `I(v + c) = I(v) + (α2 − α1)·c`.
pub fn energy(v: &ScalarField, rho: &WeightField, p: &InteractionParams) -> Result<f64> {
    v.check_finite()?;
    rho.grid().check_same(v.grid())?;
    Ok(energy_parts(v.values(), rho, p).0)
}

/// `(value, kinetic, ln Z1, ln Z2)`.
pub(crate) fn energy_parts(
    values: &[f64],
    rho: &WeightField,
    p: &InteractionParams,
) -> (f64, f64, f64, f64) {
    let grid = rho.grid();
    let kinetic = 0.5 * energy_raw(grid, rho.values(), values);
    let (ln_z1, ln_z2) = log_partitions_raw(values, grid.cell_area());
    let ln_v = ln_volume(grid);
    // the sum α1·t1 + α2·t2 is commutative in floating point, which makes the
    // (α1, α2, −v) ↔ (α2, α1, v) symmetry exact
    let value = kinetic - (p.alpha1 * (ln_z1 - ln_v) + p.alpha2 * (ln_z2 - ln_v));
    (value, kinetic, ln_z1, ln_z2)
}

/// Full report on the zero-mean projection of `v`.
pub fn evaluate(
    v: &ScalarField,
    rho: &WeightField,
    p: &InteractionParams,
) -> Result<FunctionalReport> {
    v.check_finite()?;
    rho.grid().check_same(v.grid())?;
    let v = project_zero_mean(v);
    let (value, kinetic, ln_z1, ln_z2) = energy_parts(v.values(), rho, p);
    let g = gradient_raw(v.values(), rho, p, ln_z1, ln_z2);
    let ln_v = ln_volume(v.grid());
    Ok(FunctionalReport {
        value,
        kinetic,
        z1: ln_z1.exp(),
        z2: ln_z2.exp(),
        ln_z1,
        ln_z2,
        log_term1: ln_z1 - ln_v,
        log_term2: ln_z2 - ln_v,
        grad_norm: quad_norm(&g, v.grid().cell_area()),
    })
}

/// Zero-mean L² gradient of `I`.
pub fn gradient(v: &ScalarField, rho: &WeightField, p: &InteractionParams) -> Result<ScalarField> {
    v.check_finite()?;
    rho.grid().check_same(v.grid())?;
    let (ln_z1, ln_z2) = log_partitions_raw(v.values(), v.grid().cell_area());
    let g = gradient_raw(v.values(), rho, p, ln_z1, ln_z2);
    ScalarField::new(*v.grid(), g)
}

pub(crate) fn gradient_raw(
    values: &[f64],
    rho: &WeightField,
    p: &InteractionParams,
    ln_z1: f64,
    ln_z2: f64,
) -> Vec<f64> {
    let grid = rho.grid();
    let mut g = vec![0.0; values.len()];
    apply_raw(grid, rho.values(), values, &mut g);
    for (gk, &v) in g.iter_mut().zip(values) {
        *gk += -p.alpha1 * (v - ln_z1).exp() + p.alpha2 * (-v - ln_z2).exp();
    }
    let mean = numeric::sum(g.iter().copied()) / g.len() as f64;
    g.iter_mut().for_each(|x| *x -= mean);
    g
}

pub(crate) fn quad_norm(values: &[f64], cell_area: f64) -> f64 {
    (cell_area * numeric::dot(values, values)).sqrt()
}

/// `‖I'(v)‖` in the quadrature L² norm; zero exactly at discrete critical
/// points.
pub fn residual_norm(v: &ScalarField, rho: &WeightField, p: &InteractionParams) -> Result<f64> {
    let g = gradient(v, rho, p)?;
    Ok(quad_norm(g.values(), v.grid().cell_area()))
}
