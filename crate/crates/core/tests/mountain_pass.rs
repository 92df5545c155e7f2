mod common;

use std::f64::consts::PI;

use common::*;
use mfpass::functional::{energy, residual_norm, InteractionParams};
use mfpass::manifold::{dirichlet_energy, integrate, l2_norm};
use mfpass::mountain_pass::*;
use mfpass::{Error, TorusGrid, WeightField};

fn flat(n: usize) -> WeightField {
    WeightField::uniform(TorusGrid::new(2.0 * PI, n).unwrap(), 1.0).unwrap()
}

fn params(a: f64, b: f64) -> InteractionParams {
    InteractionParams::new(a, b).unwrap()
}

#[test]
fn endpoint_search_regimes() {
    let rho = flat(64);
    let cfg = SolverConfig::default();
    let v = find_negative_endpoint(&rho, &params(26.0, 2.0), &cfg).unwrap();
    assert!(energy(&v, &rho, &params(26.0, 2.0)).unwrap() < 0.0);
    assert!(integrate(&v).abs() < 1e-12 * l2_norm(&v));
    // the bubble points down when α2 dominates
    let w = find_negative_endpoint(&rho, &params(2.0, 26.0), &cfg).unwrap();
    assert!(w.min() < -w.max());
    for (a, b) in [(20.0, 2.0), (10.0, 5.0), (0.0, 0.0)] {
        assert!(matches!(
            find_negative_endpoint(&rho, &params(a, b), &cfg),
            Err(Error::NoNegativeEndpoint { .. })
        ));
    }
}

#[test]
fn endpoints_stay_bitwise_fixed() {
    let rho = flat(32);
    let p = params(26.0, 2.0);
    let cfg = SolverConfig::default();
    let v = find_negative_endpoint(&rho, &p, &cfg).unwrap();
    let mut path = initialize_path(&v, cfg.path_nodes, &rho, &p).unwrap();
    let (first, last) = (path.nodes()[0].clone(), path.endpoint().clone());
    for k in 0..100 {
        path = deform_path(&path, &rho, &p, &cfg).unwrap();
        if k == 50 {
            path.set_climbing(true);
        }
        assert_eq!(path.nodes()[0], first);
        assert_eq!(path.endpoint(), &last);
        for node in path.nodes() {
            assert!(integrate(node).abs() <= 1e-12 * (1.0 + l2_norm(node)));
        }
    }
}

#[test]
fn first_sweep_lowers_the_level() {
    let rho = flat(64);
    let p = params(26.0, 2.0);
    let cfg = SolverConfig::default();
    let v = find_negative_endpoint(&rho, &p, &cfg).unwrap();
    let path = initialize_path(&v, cfg.path_nodes, &rho, &p).unwrap();
    let next = deform_path(&path, &rho, &p, &cfg).unwrap();
    assert!(next.level_estimate() < path.level_estimate());
}

#[test]
fn converges_at_small_scale_with_certificate() {
    let rho = flat(32);
    let p = params(26.0, 2.0);
    let cfg = SolverConfig::default();
    let r = solve(&rho, &p, &cfg).unwrap();
    assert_eq!(r.status, Status::Converged);
    assert!(r.residual <= cfg.residual_tol);
    let independent = residual_norm(&r.solution, &rho, &p).unwrap();
    assert!(independent <= cfg.residual_tol);
    assert!(r.level > 1e-6);
    assert!(dirichlet_energy(&rho, &r.solution).unwrap() > 0.0);
    assert!((energy(&r.solution, &rho, &p).unwrap() - r.level).abs() < 1e-9);
    assert_eq!(r.concentration.len(), 3);
    assert_eq!(r.iterations, r.ps_trajectory.len());

    // the level only rises when the top node climbs or the nodes are
    // redistributed
    for pair in r.ps_trajectory.windows(2) {
        let cur = &pair[1];
        if cur.phase == Phase::Descent && !cur.reparametrized {
            assert!(
                cur.level_estimate <= pair[0].level_estimate,
                "sweep {}",
                cur.iteration
            );
        }
    }
}

#[test]
fn weighted_problem_converges() {
    let g = TorusGrid::new(2.0 * PI, 32).unwrap();
    let rho = preset(g, "cosine:0.5");
    let p = params(26.0, 2.0);
    let cfg = SolverConfig::default();
    let r = solve(&rho, &p, &cfg).unwrap();
    assert_eq!(r.status, Status::Converged, "residual {}", r.residual);
    assert!(r.level > 0.0);
    assert!(residual_norm(&r.solution, &rho, &p).unwrap() <= 2.0 * cfg.residual_tol);
}

#[test]
fn collapsed_path_never_claims_a_pass() {
    // with three nodes the midpoint already sits below zero, so no barrier
    // is resolved and small residuals at negative levels must not count
    let g = TorusGrid::new(2.0 * PI, 32).unwrap();
    let rho = preset(g, "cosine:0.5");
    let cfg = SolverConfig {
        path_nodes: 3,
        max_outer_iters: 300,
        ..Default::default()
    };
    let r = solve(&rho, &params(26.0, 2.0), &cfg).unwrap();
    assert_eq!(r.status, Status::BudgetExhausted);
    assert!(r.level.is_finite());
}

#[test]
fn coercive_parameters_report_no_endpoint() {
    let r = solve(&flat(32), &params(10.0, 5.0), &SolverConfig::default()).unwrap();
    assert_eq!(r.status, Status::NoNegativeEndpoint);
    assert!(r.level.is_nan());
    assert!(r.solution.values().iter().all(|&x| x == 0.0));
}

#[test]
fn budget_exhaustion_keeps_best_iterate() {
    let rho = flat(32);
    let p = params(26.0, 2.0);
    let cfg = SolverConfig {
        max_outer_iters: 15,
        ..Default::default()
    };
    let r = solve(&rho, &p, &cfg).unwrap();
    assert_eq!(r.status, Status::BudgetExhausted);
    assert_eq!(r.iterations, 15);
    let best = r
        .ps_trajectory
        .iter()
        .map(|s| s.residual)
        .fold(f64::INFINITY, f64::min);
    assert_eq!(r.residual, best);
    let recomputed = residual_norm(&r.solution, &rho, &p).unwrap();
    assert!((recomputed - best).abs() <= 1e-9 * best);
}

#[test]
fn solves_are_deterministic() {
    let rho = flat(32);
    let p = params(26.0, 2.0);
    let cfg = SolverConfig {
        rng_seed: 9,
        ..Default::default()
    };
    let a = solve(&rho, &p, &cfg).unwrap();
    let b = solve(&rho, &p, &cfg).unwrap();
    assert_eq!(a.solution, b.solution);
    assert_eq!(a.level.to_bits(), b.level.to_bits());
    assert_eq!(a.ps_trajectory, b.ps_trajectory);
}

#[test]
fn conjugate_parameters_give_negated_solution() {
    let rho = flat(32);
    let cfg = SolverConfig::default();
    let a = solve(&rho, &params(26.0, 2.0), &cfg).unwrap();
    let b = solve(&rho, &params(2.0, 26.0), &cfg).unwrap();
    assert_eq!(a.level, b.level);
    assert_eq!(b.solution, -&a.solution);
}

#[test]
fn continuation_warm_starts_save_sweeps() {
    let rho = flat(32);
    let cfg = SolverConfig::default();
    let schedule: Vec<_> = [26.0, 27.0, 28.0].iter().map(|&a| params(a, 2.0)).collect();
    let warm = continuation_solve(&rho, &schedule, &cfg).unwrap();
    assert_eq!(warm.len(), 3);
    assert!(!warm[0].warm_started);
    for (k, p) in schedule.iter().enumerate().skip(1) {
        assert!(warm[k].warm_started);
        assert_eq!(warm[k].status, Status::Converged);
        let cold = solve(&rho, p, &cfg).unwrap();
        assert!(
            warm[k].iterations < cold.iterations,
            "alpha1 = {}: warm {} vs cold {}",
            p.alpha1,
            warm[k].iterations,
            cold.iterations
        );
        assert!((warm[k].level - cold.level).abs() < 1e-6 * cold.level.abs().max(1.0));
    }

    let single = continuation_solve(&rho, &schedule[..1], &cfg).unwrap();
    let direct = solve(&rho, &schedule[0], &cfg).unwrap();
    assert_eq!(single[0].solution, direct.solution);
}
