mod common;

use std::f64::consts::PI;

use common::*;
use mfpass::manifold::*;
use mfpass::ScalarField;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn operator_matrix(rho: &WeightField) -> DMatrix<f64> {
    let grid = *rho.grid();
    let n = grid.len();
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let col = weighted_laplacian_apply(rho, &ScalarField::new(grid, e).unwrap()).unwrap();
        for (i, v) in col.values().iter().enumerate() {
            m[(i, k)] = *v;
        }
    }
    m
}

fn second_smallest(m: DMatrix<f64>) -> f64 {
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    assert!(ev[0].abs() < 1e-10, "constant mode should be in the kernel");
    ev[1]
}

#[test]
fn eigenvalue_matches_dense_eigensolve() {
    for l in [2.0 * PI, 1.0, 3.7] {
        let grid = TorusGrid::new(l, 8).unwrap();
        let dense = second_smallest(operator_matrix(&WeightField::uniform(grid, 1.0).unwrap()));
        let mu1 = first_eigenvalue(&grid).unwrap();
        assert!(
            (mu1 - dense).abs() <= 1e-8 * dense,
            "L={l}: {mu1} vs {dense}"
        );
    }
}

#[test]
fn weighted_eigenvalue_matches_dense_eigensolve() {
    let grid = TorusGrid::new(2.0 * PI, 8).unwrap();
    for spec in PRESETS {
        let rho = preset(grid, spec);
        let m = operator_matrix(&rho);
        // A_ρ is symmetric in the quadrature inner product, which on a
        // uniform grid is a multiple of the Euclidean one
        assert!((&m - m.transpose()).amax() < 1e-12);
        let dense = second_smallest(m);
        let mu = first_weighted_eigenvalue(&rho).unwrap();
        assert!(
            (mu - dense).abs() <= 1e-8 * dense,
            "{spec}: {mu} vs {dense}"
        );
    }
}

#[test]
fn gate_product_is_mesh_independent() {
    let target = 4.0 * PI * PI;
    for l in [1.0, PI, 5.0] {
        let errs: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&n| {
                let g = TorusGrid::new(l, n).unwrap();
                (first_eigenvalue(&g).unwrap() * g.volume() - target).abs()
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(errs[2] / target < 1e-3);
    }
}

#[test]
fn grid_examples() {
    let g = TorusGrid::new(2.0 * PI, 4).unwrap();
    assert!((g.spacing() - PI / 2.0).abs() < 1e-15);
    assert!((g.volume() - 4.0 * PI * PI).abs() < 1e-12);
    let g = TorusGrid::new(1.0, 64).unwrap();
    assert_eq!(g.spacing(), 1.0 / 64.0);
    assert_eq!(g.volume(), 1.0);
    assert!(TorusGrid::new(0.0, 8).is_err());
    assert!(TorusGrid::new(1.0, 3).is_err());
}

#[test]
fn operator_is_second_order_with_variable_weight() {
    // ρ = 1 + ½ cos x cos y and v = sin x + cos 2y on L = 2π; the exact
    // −div(ρ∇v) is computed by hand below
    let rho_f = |x: f64, y: f64| 1.0 + 0.5 * x.cos() * y.cos();
    let exact = |x: f64, y: f64| {
        let (vx, vy) = (x.cos(), -2.0 * (2.0 * y).sin());
        let (vxx, vyy) = (-x.sin(), -4.0 * (2.0 * y).cos());
        let (rx, ry) = (-0.5 * x.sin() * y.cos(), -0.5 * x.cos() * y.sin());
        -(rho_f(x, y) * (vxx + vyy) + rx * vx + ry * vy)
    };
    let mut errs = Vec::new();
    for n in [16, 32, 64] {
        let g = TorusGrid::new(2.0 * PI, n).unwrap();
        let rho = WeightField::new(ScalarField::from_fn(g, rho_f).unwrap()).unwrap();
        let v = ScalarField::from_fn(g, |x, y| x.sin() + (2.0 * y).cos()).unwrap();
        let av = weighted_laplacian_apply(&rho, &v).unwrap();
        let ex = ScalarField::from_fn(g, exact).unwrap();
        let err = av
            .values()
            .iter()
            .zip(ex.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        errs.push(err);
    }
    assert!(errs[0] / errs[1] >= 3.5, "{errs:?}");
    assert!(errs[1] / errs[2] >= 3.5, "{errs:?}");
}

#[test]
fn field_file_round_trip_is_exact() {
    let g = TorusGrid::new(2.0 * PI, 8).unwrap();
    let v = random_rough(g, &mut rng(3), 50.0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.field");
    write_field(&path, &v).unwrap();
    assert_eq!(read_field(&path).unwrap(), v);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn energy_identity((_g, rho, fs) in grid_weight_fields(1)) {
        let v = &fs[0];
        let e = dirichlet_energy(&rho, v).unwrap();
        let q = inner(&weighted_laplacian_apply(&rho, v).unwrap(), v).unwrap();
        prop_assert!(e >= 0.0);
        prop_assert!((e - q).abs() <= 1e-12 * (1.0 + e.abs()), "{} vs {}", e, q);
    }

    #[test]
    fn conservativity((_g, rho, fs) in grid_weight_fields(1)) {
        let av = weighted_laplacian_apply(&rho, &fs[0]).unwrap();
        prop_assert!(integrate(&av).abs() <= 1e-12 * (1.0 + l2_norm(&av)));
    }

    #[test]
    fn self_adjointness((_g, rho, fs) in grid_weight_fields(2)) {
        let (u, w) = (&fs[0], &fs[1]);
        let a = inner(&weighted_laplacian_apply(&rho, u).unwrap(), w).unwrap();
        let b = inner(u, &weighted_laplacian_apply(&rho, w).unwrap()).unwrap();
        let scale = l2_norm(u) * l2_norm(w) * rho.rho_max() / (rho.grid().spacing().powi(2));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn constants_are_in_the_kernel((g, rho, _fs) in grid_weight_fields(0), c in -10.0f64..10.0) {
        let v = ScalarField::constant(g, c);
        prop_assert_eq!(dirichlet_energy(&rho, &v).unwrap(), 0.0);
        prop_assert!(weighted_laplacian_apply(&rho, &v).unwrap().values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn field_text_round_trip((_g, _rho, fs) in grid_weight_fields(1)) {
        let text = format_field(&fs[0]);
        prop_assert_eq!(parse_field(&text).unwrap(), fs[0].clone());
    }
}
