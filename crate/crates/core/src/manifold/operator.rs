use super::{ScalarField, TorusGrid, WeightField};
use crate::error::Result;
use crate::numeric;

/// Uniform quadrature `h² Σ f`. On a periodic uniform grid the midpoint and
/// trapezoid rules coincide.
pub fn integrate(f: &ScalarField) -> f64 {
    f.grid().cell_area() * numeric::sum(f.values().iter().copied())
}

/// Quadrature inner product `h² Σ a·b`.
pub fn inner(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    a.check_grid(b)?;
    Ok(a.grid().cell_area() * numeric::dot(a.values(), b.values()))
}

/// Quadrature L² norm.
pub fn l2_norm(f: &ScalarField) -> f64 {
    (f.grid().cell_area() * numeric::dot(f.values(), f.values())).sqrt()
}

/// `A_ρ v = −div(ρ∇v)` on the staggered five-point stencil.
pub fn weighted_laplacian_apply(rho: &WeightField, v: &ScalarField) -> Result<ScalarField> {
    rho.grid().check_same(v.grid())?;
    let mut out = vec![0.0; v.grid().len()];
    apply_raw(v.grid(), rho.values(), v.values(), &mut out);
    Ok(ScalarField::from_raw(*v.grid(), out))
}

/// `‖v‖_ρ² = Σ_faces ρ_face (Δv)²`, the quadrature of `ρ|∇v|²` on the same
/// fluxes used by [`weighted_laplacian_apply`].
pub fn dirichlet_energy(rho: &WeightField, v: &ScalarField) -> Result<f64> {
    rho.grid().check_same(v.grid())?;
    Ok(energy_raw(v.grid(), rho.values(), v.values()))
}

/// Face fluxes `ρ_{i+½,j}(v_{i+1,j} − v_{i,j})` and `ρ_{i,j+½}(v_{i,j+1} − v_{i,j})`.
fn fluxes(grid: &TorusGrid, rho: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n();
    let mut fx = vec![0.0; n * n];
    let mut fy = vec![0.0; n * n];
    for i in 0..n {
        let ip = (i + 1) % n;
        for j in 0..n {
            let jp = (j + 1) % n;
            let k = i * n + j;
            let east = ip * n + j;
            let north = i * n + jp;
            fx[k] = 0.5 * (rho[k] + rho[east]) * (v[east] - v[k]);
            fy[k] = 0.5 * (rho[k] + rho[north]) * (v[north] - v[k]);
        }
    }
    (fx, fy)
}

pub(crate) fn apply_raw(grid: &TorusGrid, rho: &[f64], v: &[f64], out: &mut [f64]) {
    let n = grid.n();
    let inv_h2 = 1.0 / grid.cell_area();
    let (fx, fy) = fluxes(grid, rho, v);
    for i in 0..n {
        let im = (i + n - 1) % n;
        for j in 0..n {
            let jm = (j + n - 1) % n;
            let k = i * n + j;
            out[k] = -((fx[k] - fx[im * n + j]) + (fy[k] - fy[i * n + jm])) * inv_h2;
        }
    }
}

pub(crate) fn energy_raw(grid: &TorusGrid, rho: &[f64], v: &[f64]) -> f64 {
    let n = grid.n();
    numeric::sum((0..n * n).map(|k| {
        let (i, j) = (k / n, k % n);
        let east = ((i + 1) % n) * n + j;
        let north = i * n + (j + 1) % n;
        let dx = v[east] - v[k];
        let dy = v[north] - v[k];
        0.5 * (rho[k] + rho[east]) * dx * dx + 0.5 * (rho[k] + rho[north]) * dy * dy
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(grid: TorusGrid) -> ScalarField {
        let l = grid.side_length();
        ScalarField::from_fn(grid, |x, _| (2.0 * PI * x / l).sin()).unwrap()
    }

    #[test]
    fn integrate_constant_gives_volume() {
        let g = TorusGrid::new(2.0 * PI, 32).unwrap();
        let one = ScalarField::constant(g, 1.0);
        assert!((integrate(&one) - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn integrate_fourier_mode_vanishes() {
        for n in [4, 5, 7, 16, 33] {
            let g = TorusGrid::new(3.0, n).unwrap();
            assert!(integrate(&sine(g)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn integrate_sine_squared() {
        let g = TorusGrid::new(2.0 * PI, 64).unwrap();
        let f = sine(g).map(|s| s * s);
        assert!((integrate(&f) - 2.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let g = TorusGrid::new(2.0, 16).unwrap();
        let rho = WeightField::new(
            ScalarField::from_fn(g, |x, y| 2.0 + (x * 3.0).sin() * y.cos()).unwrap(),
        )
        .unwrap();
        let a = weighted_laplacian_apply(&rho, &ScalarField::constant(g, 4.2)).unwrap();
        assert!(a.values().iter().all(|&x| x == 0.0));
        assert_eq!(
            dirichlet_energy(&rho, &ScalarField::constant(g, -1.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn sine_is_an_eigenfunction_up_to_second_order() {
        let l = 2.0 * PI;
        let mut errors = Vec::new();
        for n in [16, 32, 64] {
            let g = TorusGrid::new(l, n).unwrap();
            let rho = WeightField::uniform(g, 1.0).unwrap();
            let v = sine(g);
            let av = weighted_laplacian_apply(&rho, &v).unwrap();
            let k2 = (2.0 * PI / l).powi(2);
            let err = av
                .values()
                .iter()
                .zip(v.values())
                .map(|(a, s)| (a - k2 * s).abs())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        for w in errors.windows(2) {
            assert!(w[0] / w[1] > 3.9, "{errors:?}");
        }
    }

    #[test]
    fn dirichlet_energy_of_sine_converges() {
        let l = 2.0 * PI;
        let g = TorusGrid::new(l, 64).unwrap();
        let rho = WeightField::uniform(g, 1.0).unwrap();
        let v = ScalarField::from_fn(g, |x, _| x.sin()).unwrap();
        let e = dirichlet_energy(&rho, &v).unwrap();
        let exact = 2.0 * PI * PI;
        assert!((e - exact).abs() / exact < 0.01, "e={e}");
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = TorusGrid::new(1.0, 8).unwrap();
        let b = TorusGrid::new(2.0, 8).unwrap();
        let rho = WeightField::uniform(a, 1.0).unwrap();
        assert!(weighted_laplacian_apply(&rho, &ScalarField::zeros(b)).is_err());
        assert!(dirichlet_energy(&rho, &ScalarField::zeros(b)).is_err());
        assert!(inner(&ScalarField::zeros(a), &ScalarField::zeros(b)).is_err());
    }
}
