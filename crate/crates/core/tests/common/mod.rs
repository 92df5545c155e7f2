#![allow(dead_code)]

use mfpass::manifold::WeightPreset;
use mfpass::{ScalarField, TorusGrid, WeightField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PRESETS: [&str; 3] = ["const:1", "cosine:0.5", "bump:2:0.3"];

pub fn preset(grid: TorusGrid, spec: &str) -> WeightField {
    WeightPreset::parse(spec)
        .unwrap()
        .unwrap()
        .build(grid)
        .unwrap()
}

/// Smooth-ish random mean-zero field: a few random Fourier modes.
pub fn random_smooth(grid: TorusGrid, rng: &mut ChaCha8Rng, amplitude: f64) -> ScalarField {
    let tau = 2.0 * std::f64::consts::PI / grid.side_length();
    let modes: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                rng.gen_range(1..4) as f64,
                rng.gen_range(0..4) as f64,
                rng.gen_range(-1.0..1.0) * amplitude,
                rng.gen_range(0.0..6.3),
            )
        })
        .collect();
    let f = ScalarField::from_fn(grid, |x, y| {
        modes
            .iter()
            .map(|&(k, l, a, ph)| a * (tau * (k * x + l * y) + ph).sin())
            .sum()
    })
    .unwrap();
    mfpass::functional::project_zero_mean(&f)
}

/// Independent node values, mean-zero.
pub fn random_rough(grid: TorusGrid, rng: &mut ChaCha8Rng, amplitude: f64) -> ScalarField {
    let vals = (0..grid.len())
        .map(|_| rng.gen_range(-amplitude..amplitude))
        .collect();
    mfpass::functional::project_zero_mean(&ScalarField::new(grid, vals).unwrap())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Grid with N in 4..=12, a positive weight and `count` fields on it.
pub fn grid_weight_fields(
    count: usize,
) -> impl Strategy<Value = (TorusGrid, WeightField, Vec<ScalarField>)> {
    (4usize..=12, 0.5f64..8.0).prop_flat_map(move |(n, l)| {
        let len = n * n;
        (
            proptest::collection::vec(0.05f64..4.0, len),
            proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, len), count),
        )
            .prop_map(move |(w, fs)| {
                let grid = TorusGrid::new(l, n).unwrap();
                let rho = WeightField::new(ScalarField::new(grid, w).unwrap()).unwrap();
                let fields = fs
                    .into_iter()
                    .map(|v| ScalarField::new(grid, v).unwrap())
                    .collect();
                (grid, rho, fields)
            })
    })
}
