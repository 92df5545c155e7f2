//! Executable checks around a solve: the parameter gate, exponential-mass
//! monitors, Moser-Trudinger deficits and concentration reports.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::{
    ln_volume, log_partitions_raw, partition_functions, project_zero_mean, InteractionParams,
};
use crate::manifold::operator::energy_raw;
use crate::manifold::{first_eigenvalue, ScalarField, TorusGrid, WeightField};
use crate::EIGHT_PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateReport {
    pub alpha1: f64,
    pub alpha2: f64,
    /// `α1 + α2 < μ1·V` and `max(α1, α2) > 8π`.
    pub in_lambda_rho: bool,
    /// Both parameters in `[0, 8π]`, where the functional is bounded below.
    pub coercive_regime: bool,
    pub mu1: f64,
    pub volume: f64,
    /// `μ1·V − (α1 + α2)`; positive when the sum condition holds.
    pub sum_margin: f64,
    /// `max(α1, α2) − 8π`; positive when the max condition holds.
    pub max_margin: f64,
}

impl GateReport {
    /// Gate for a precomputed `μ1`.
    pub fn from_mu1(p: &InteractionParams, volume: f64, mu1: f64) -> Self {
        let sum_margin = mu1 * volume - p.sum();
        let max_margin = p.max() - EIGHT_PI;
        Self {
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            in_lambda_rho: sum_margin > 0.0 && max_margin > 0.0,
            coercive_regime: p.alpha1 <= EIGHT_PI && p.alpha2 <= EIGHT_PI,
            mu1,
            volume,
            sum_margin,
            max_margin,
        }
    }
}

/// Checks `(α1, α2)` against the existence region, with `μ1` the first
/// nonzero eigenvalue of the unweighted Laplacian on `grid`.
pub fn lambda_rho_gate(p: &InteractionParams, grid: &TorusGrid) -> Result<GateReport> {
    let mu1 = first_eigenvalue(grid)?;
    Ok(GateReport::from_mu1(p, grid.volume(), mu1))
}

/// `(∫e^v, ∫e^{−v})`.
pub fn exp_mass(v: &ScalarField) -> Result<(f64, f64)> {
    partition_functions(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoserTrudingerDeficit {
    /// `ln(z1/V) − ∫|∇v|²/(16π)`
    pub classical: f64,
    /// `ln(z1/V) − ‖v‖_ρ²/(16π·rho_min)`
    pub weighted: f64,
}

/// Deficits of the Moser-Trudinger inequality with the sharp constant.
/// The field is projected to mean zero first.
pub fn moser_trudinger_deficit(
    v: &ScalarField,
    rho: &WeightField,
) -> Result<MoserTrudingerDeficit> {
    rho.grid().check_same(v.grid())?;
    v.check_finite()?;
    let v = project_zero_mean(v);
    let grid = v.grid();
    let (ln_z1, _) = log_partitions_raw(v.values(), grid.cell_area());
    let log_avg = ln_z1 - ln_volume(grid);
    let ones = vec![1.0; grid.len()];
    let plain = energy_raw(grid, &ones, v.values());
    let weighted = energy_raw(grid, rho.values(), v.values());
    let c = 16.0 * std::f64::consts::PI;
    Ok(MoserTrudingerDeficit {
        classical: log_avg - plain / c,
        weighted: log_avg - weighted / (c * rho.rho_min()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub radius: f64,
    /// Largest share of `∫e^v` inside a periodic ball of the given radius.
    pub max_mass_fraction: f64,
    /// `(i, j)` node of the maximising centre.
    pub center: (usize, usize),
    pub sup_v: f64,
    /// Same for `e^{−v}`.
    pub max_mass_fraction_neg: f64,
    pub center_neg: (usize, usize),
    /// `sup(−v)`
    pub sup_neg_v: f64,
}

/// Node offsets `(di, dj)` (reduced mod N) within distance `r`, in
/// row-major order. Sums over this list are nondecreasing in `r`.
fn ball_stencil(grid: &TorusGrid, r: f64) -> Vec<(usize, usize)> {
    let n = grid.n();
    let h = grid.spacing();
    let mut out = Vec::new();
    for di in 0..n {
        let dx = grid.wrapped_offset(di) as f64 * h;
        for dj in 0..n {
            let dy = grid.wrapped_offset(dj) as f64 * h;
            if dx.hypot(dy) <= r {
                out.push((di, dj));
            }
        }
    }
    out
}

fn best_ball(grid: &TorusGrid, mass: &[f64], stencil: &[(usize, usize)]) -> (f64, usize) {
    let n = grid.n();
    let fractions: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let (ci, cj) = (c / n, c % n);
            stencil
                .iter()
                .map(|&(di, dj)| mass[((ci + di) % n) * n + (cj + dj) % n])
                .sum()
        })
        .collect();
    let mut best = 0;
    for (k, &f) in fractions.iter().enumerate() {
        if f > fractions[best] {
            best = k;
        }
    }
    (fractions[best].min(1.0), best)
}

/// Where the exponential mass of `v` and `−v` sits at scale `r`. Balls are
/// node sets under the periodic distance. A radius covering the whole torus
/// gives fraction exactly 1.
pub fn concentration(v: &ScalarField, r: f64) -> Result<ConcentrationReport> {
    v.check_finite()?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be > 0, got {r}"
        )));
    }
    let grid = v.grid();
    let n = grid.n();
    let (ln_z1, ln_z2) = log_partitions_raw(v.values(), grid.cell_area());
    let stencil = ball_stencil(grid, r);
    let ha = grid.cell_area();
    let scan = |ln_z: f64, sign: f64| {
        if stencil.len() == grid.len() {
            return (1.0, 0);
        }
        let mass: Vec<f64> = v
            .values()
            .iter()
            .map(|&x| ha * (sign * x - ln_z).exp())
            .collect();
        best_ball(grid, &mass, &stencil)
    };
    let (frac, c) = scan(ln_z1, 1.0);
    let (frac_neg, c_neg) = scan(ln_z2, -1.0);
    Ok(ConcentrationReport {
        radius: r,
        max_mass_fraction: frac,
        center: (c / n, c % n),
        sup_v: v.max(),
        max_mass_fraction_neg: frac_neg,
        center_neg: (c_neg / n, c_neg % n),
        sup_neg_v: -v.min(),
    })
}
