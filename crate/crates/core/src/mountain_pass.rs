//! Numerical mountain pass.
//!
//! A path from `0` to a negative-energy endpoint `v*` is discretised by `m`
//! nodes. Each sweep moves every interior node by a backtracking descent step
//! along the energy-space gradient `w = A_ρ⁻¹ I'(v)`, and every few sweeps the
//! nodes are redistributed to equal `‖·‖_ρ` arc length. The highest node
//! tracks the minimax level; `(I, ‖I'‖)` sampled there after every sweep is
//! the Palais-Smale sequence.
//!
//! Descent alone leaves the top node a fixed fraction of a segment away from
//! the saddle. Once the level stops dropping, the top node becomes a climbing
//! image: it descends orthogonally to the path tangent and ascends along it,
//! which makes the saddle an attracting fixed point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{concentration, ConcentrationReport};
use crate::error::{Error, Result};
use crate::functional::{
    energy_parts, gradient_raw, log_partitions_raw, project_zero_mean, quad_norm, InteractionParams,
};
use crate::manifold::operator::energy_raw;
use crate::manifold::poisson::remove_mean;
use crate::manifold::{RieszMap, ScalarField, WeightField};
use crate::numeric;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Nodes on the discrete path, endpoints included.
    pub path_nodes: usize,
    pub max_outer_iters: usize,
    /// Stop when the max-node residual falls to this value.
    pub residual_tol: f64,
    pub initial_step: f64,
    pub step_shrink: f64,
    /// Armijo constant.
    pub sufficient_decrease: f64,
    /// Line searches give up below this step.
    pub min_step: f64,
    /// Number of amplitude doublings tried per bubble width.
    pub endpoint_scaling_budget: usize,
    pub reparametrize_every: usize,
    /// Relative level drop per reparametrization window below which the top
    /// node switches to climbing.
    pub climb_switch_tol: f64,
    pub polish_steps: usize,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            path_nodes: 21,
            max_outer_iters: 5000,
            residual_tol: 1e-5,
            initial_step: 0.5,
            step_shrink: 0.5,
            sufficient_decrease: 1e-4,
            min_step: 1e-12,
            endpoint_scaling_budget: 40,
            reparametrize_every: 10,
            climb_switch_tol: 1e-3,
            polish_steps: 200,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("residual_tol", self.residual_tol),
            ("initial_step", self.initial_step),
            ("sufficient_decrease", self.sufficient_decrease),
            ("min_step", self.min_step),
            ("climb_switch_tol", self.climb_switch_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "step_shrink must lie in (0, 1), got {}",
                self.step_shrink
            )));
        }
        if self.sufficient_decrease >= 1.0 {
            return Err(Error::InvalidArgument(
                "sufficient_decrease must be < 1".into(),
            ));
        }
        if self.path_nodes < 3 {
            return Err(Error::InvalidArgument(format!(
                "path needs at least 3 nodes, got {}",
                self.path_nodes
            )));
        }
        if self.reparametrize_every == 0 {
            return Err(Error::InvalidArgument(
                "reparametrize_every must be >= 1".into(),
            ));
        }
        if self.endpoint_scaling_budget == 0 {
            return Err(Error::InvalidArgument(
                "endpoint_scaling_budget must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// A discrete path `γ` with `γ(0) = 0` and `γ(1) = v*`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    nodes: Vec<ScalarField>,
    energies: Vec<f64>,
    max_index: usize,
    level_estimate: f64,
    climbing: bool,
    sweeps: usize,
    line_search_failures: usize,
    reparametrized: bool,
}

impl PathState {
    /// Builds a path from explicit nodes. The first node must be identically
    /// zero and every node mean-zero.
    pub fn from_nodes(
        nodes: Vec<ScalarField>,
        rho: &WeightField,
        p: &InteractionParams,
    ) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidArgument("path needs at least 3 nodes".into()));
        }
        for node in &nodes {
            node.check_finite()?;
            rho.grid().check_same(node.grid())?;
        }
        if nodes[0].values().iter().any(|&x| x != 0.0) {
            return Err(Error::InvalidArgument(
                "first path node must be the zero field".into(),
            ));
        }
        let energies = nodes
            .par_iter()
            .map(|v| energy_parts(v.values(), rho, p).0)
            .collect();
        let mut path = Self {
            nodes,
            energies,
            max_index: 1,
            level_estimate: 0.0,
            climbing: false,
            sweeps: 0,
            line_search_failures: 0,
            reparametrized: false,
        };
        path.refresh_max();
        Ok(path)
    }

    pub fn nodes(&self) -> &[ScalarField] {
        &self.nodes
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Highest node energy on the path, the current estimate of `c`.
    pub fn level_estimate(&self) -> f64 {
        self.level_estimate
    }

    /// Interior node with the highest energy (lowest index on ties).
    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn endpoint(&self) -> &ScalarField {
        self.nodes.last().expect("path has nodes")
    }

    pub fn endpoint_energy(&self) -> f64 {
        *self.energies.last().expect("path has nodes")
    }

    pub fn is_climbing(&self) -> bool {
        self.climbing
    }

    pub fn set_climbing(&mut self, climbing: bool) {
        self.climbing = climbing;
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Line searches that underflowed during the last sweep.
    pub fn line_search_failures(&self) -> usize {
        self.line_search_failures
    }

    /// Whether the last sweep redistributed the nodes.
    pub fn was_reparametrized(&self) -> bool {
        self.reparametrized
    }

    /// The top interior node lies strictly above both endpoints, so the path
    /// resolves a barrier. Without one there is no pass to climb to.
    pub fn has_interior_peak(&self) -> bool {
        let m = self.energies.len();
        self.energies[self.max_index] > self.energies[0].max(self.energies[m - 1])
    }

    fn refresh_max(&mut self) {
        let m = self.nodes.len();
        let mut k = 1;
        for i in 2..m - 1 {
            if self.energies[i] > self.energies[k] {
                k = i;
            }
        }
        self.max_index = k;
        self.level_estimate = self
            .energies
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Descent,
    Climb,
}

/// One sample of the Palais-Smale sequence, taken at the max node after a
/// sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRecord {
    pub iteration: usize,
    pub level_estimate: f64,
    /// `I` at the max interior node.
    pub energy: f64,
    pub residual: f64,
    pub ln_z1: f64,
    pub ln_z2: f64,
    pub max_index: usize,
    /// `‖v‖_ρ` at the max node.
    pub node_norm: f64,
    pub phase: Phase,
    pub reparametrized: bool,
    pub line_search_failures: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    BudgetExhausted,
    NoNegativeEndpoint,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::BudgetExhausted => "budget-exhausted",
            Status::NoNegativeEndpoint => "no-negative-endpoint",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct MountainPassResult {
    pub status: Status,
    /// Critical point on convergence, best iterate on budget exhaustion,
    /// zero field when no endpoint was found.
    pub solution: ScalarField,
    /// Level `c`; NaN when no endpoint was found.
    pub level: f64,
    pub residual: f64,
    /// `‖solution‖_ρ`
    pub solution_norm: f64,
    pub iterations: usize,
    pub ps_trajectory: Vec<SweepRecord>,
    pub endpoint: Option<ScalarField>,
    pub path: Option<PathState>,
    pub warm_started: bool,
    /// Budget ran out while the max-node norm kept growing.
    pub suspected_blow_up: bool,
    /// Concentration of the solution at radii L/16, L/8, L/4. Logged only.
    pub concentration: Vec<ConcentrationReport>,
}

/// Everything a sweep needs, built once per solve.
struct Problem<'a> {
    rho: &'a WeightField,
    params: InteractionParams,
    cfg: &'a SolverConfig,
    riesz: RieszMap,
    cell_area: f64,
}

struct NodeUpdate {
    values: Vec<f64>,
    energy: f64,
    failed: bool,
}

impl<'a> Problem<'a> {
    fn new(rho: &'a WeightField, params: InteractionParams, cfg: &'a SolverConfig) -> Self {
        Self {
            rho,
            params,
            cfg,
            riesz: RieszMap::new(rho),
            cell_area: rho.grid().cell_area(),
        }
    }

    fn energy(&self, v: &[f64]) -> f64 {
        energy_parts(v, self.rho, &self.params).0
    }

    fn gradient(&self, v: &[f64]) -> Vec<f64> {
        let (l1, l2) = log_partitions_raw(v, self.cell_area);
        gradient_raw(v, self.rho, &self.params, l1, l2)
    }

    fn riesz(&self, g: &[f64]) -> Result<Vec<f64>> {
        let g = ScalarField::from_raw(*self.rho.grid(), g.to_vec());
        Ok(self.riesz.solve(&g)?.into_values())
    }

    fn quad_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.cell_area * numeric::dot(a, b)
    }

    fn rho_norm(&self, v: &[f64]) -> f64 {
        energy_raw(self.rho.grid(), self.rho.values(), v)
            .max(0.0)
            .sqrt()
    }

    /// Backtracking on `sign·I` along `dir`; `slope` is the directional
    /// derivative of `sign·I`, negative for a usable direction.
    fn backtrack(
        &self,
        x: &[f64],
        dir: &[f64],
        f0: f64,
        slope: f64,
        sign: f64,
        first_step: f64,
    ) -> Option<(Vec<f64>, f64)> {
        let cfg = self.cfg;
        let mut t = first_step;
        while t >= cfg.min_step {
            let mut cand: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + t * d).collect();
            remove_mean(&mut cand);
            let f = self.energy(&cand);
            if f.is_finite() && sign * f <= sign * f0 + cfg.sufficient_decrease * t * slope {
                return Some((cand, f));
            }
            t *= cfg.step_shrink;
        }
        None
    }

    fn descent_step(&self, x: &[f64], f0: f64) -> Result<NodeUpdate> {
        let g = self.gradient(x);
        let w = self.riesz(&g)?;
        let slope = -self.quad_dot(&g, &w);
        let unchanged = |failed| NodeUpdate {
            values: x.to_vec(),
            energy: f0,
            failed,
        };
        if slope >= 0.0 {
            return Ok(unchanged(false));
        }
        let dir: Vec<f64> = w.iter().map(|v| -v).collect();
        Ok(
            match self.backtrack(x, &dir, f0, slope, 1.0, self.cfg.initial_step) {
                Some((values, energy)) => NodeUpdate {
                    values,
                    energy,
                    failed: false,
                },
                None => unchanged(true),
            },
        )
    }

    /// Unit tangent `(next − prev)/‖next − prev‖_ρ` at `x`, with half the
    /// distance from `x` to its nearer neighbour as the allowed tangential
    /// move. `None` for a degenerate segment.
    fn tangent(&self, prev: &[f64], x: &[f64], next: &[f64]) -> Option<(Vec<f64>, f64)> {
        let diff =
            |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p - q).collect() };
        let mut tau = diff(next, prev);
        remove_mean(&mut tau);
        let norm = self.rho_norm(&tau);
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        tau.iter_mut().for_each(|t| *t /= norm);
        let reach = 0.5
            * self
                .rho_norm(&diff(x, prev))
                .min(self.rho_norm(&diff(next, x)));
        Some((tau, reach))
    }

    /// Descend orthogonally to `tau`, then ascend along it by at most
    /// `reach` in `‖·‖_ρ`.
    fn climb_step(&self, x: &[f64], f0: f64, tau: &[f64], reach: f64) -> Result<NodeUpdate> {
        let mut failed = false;

        let g = self.gradient(x);
        let w = self.riesz(&g)?;
        let along = self.quad_dot(&g, tau);
        let w_perp: Vec<f64> = w.iter().zip(tau).map(|(wi, ti)| wi - along * ti).collect();
        let slope = -self.quad_dot(&g, &w_perp);
        let (x1, f1) = if slope < 0.0 {
            let dir: Vec<f64> = w_perp.iter().map(|v| -v).collect();
            match self.backtrack(x, &dir, f0, slope, 1.0, self.cfg.initial_step) {
                Some(r) => r,
                None => {
                    failed = true;
                    (x.to_vec(), f0)
                }
            }
        } else {
            (x.to_vec(), f0)
        };

        let g1 = self.gradient(&x1);
        let along = self.quad_dot(&g1, tau);
        let slope = -along * along;
        let (x2, f2) = if slope < 0.0 {
            let dir: Vec<f64> = tau.iter().map(|t| along * t).collect();
            let first = self.cfg.initial_step.min(reach / along.abs());
            match self.backtrack(&x1, &dir, f1, slope, -1.0, first) {
                Some(r) => r,
                None => {
                    failed = true;
                    (x1, f1)
                }
            }
        } else {
            (x1, f1)
        };
        Ok(NodeUpdate {
            values: x2,
            energy: f2,
            failed,
        })
    }

    fn sweep(&self, path: &PathState) -> Result<PathState> {
        let m = path.nodes.len();
        let climb_at = (path.climbing && path.has_interior_peak()).then_some(path.max_index);
        let updates: Vec<NodeUpdate> = (1..m - 1)
            .into_par_iter()
            .map(|i| {
                let x = path.nodes[i].values();
                let f0 = path.energies[i];
                if Some(i) == climb_at {
                    match self.tangent(path.nodes[i - 1].values(), x, path.nodes[i + 1].values()) {
                        Some((tau, reach)) => self.climb_step(x, f0, &tau, reach),
                        None => self.descent_step(x, f0),
                    }
                } else {
                    self.descent_step(x, f0)
                }
            })
            .collect::<Result<_>>()?;

        let grid = *self.rho.grid();
        let mut next = path.clone();
        next.line_search_failures = 0;
        for (offset, upd) in updates.into_iter().enumerate() {
            let i = offset + 1;
            next.nodes[i] = ScalarField::from_raw(grid, upd.values);
            next.energies[i] = upd.energy;
            next.line_search_failures += usize::from(upd.failed);
        }
        next.sweeps += 1;
        next.reparametrized = false;
        if next.sweeps.is_multiple_of(self.cfg.reparametrize_every) {
            if let Some(k) = climb_at {
                self.reparametrize(&mut next, 0, k);
                self.reparametrize(&mut next, k, m - 1);
            } else {
                self.reparametrize(&mut next, 0, m - 1);
            }
            next.reparametrized = true;
        }
        next.refresh_max();
        Ok(next)
    }

    /// Equal `‖·‖_ρ` arc length on `nodes[lo..=hi]`, keeping `lo` and `hi`.
    fn reparametrize(&self, path: &mut PathState, lo: usize, hi: usize) {
        if hi <= lo + 1 {
            return;
        }
        let seg = &path.nodes[lo..=hi];
        let mut arc = vec![0.0];
        for pair in seg.windows(2) {
            let diff: Vec<f64> = pair[1]
                .values()
                .iter()
                .zip(pair[0].values())
                .map(|(a, b)| a - b)
                .collect();
            arc.push(arc.last().unwrap() + self.rho_norm(&diff));
        }
        let total = *arc.last().unwrap();
        if !(total > 0.0 && total.is_finite()) {
            return;
        }
        let count = seg.len() - 1;
        let resampled: Vec<ScalarField> = (1..count)
            .into_par_iter()
            .map(|q| {
                let target = total * q as f64 / count as f64;
                let j = arc
                    .windows(2)
                    .position(|w| target <= w[1])
                    .unwrap_or(count - 1);
                let span = arc[j + 1] - arc[j];
                let t = if span > 0.0 {
                    (target - arc[j]) / span
                } else {
                    0.0
                };
                let mut node = seg[j].lerp(&seg[j + 1], t).expect("same grid");
                remove_mean(node.values_mut());
                node
            })
            .collect();
        let energies: Vec<f64> = resampled
            .par_iter()
            .map(|v| self.energy(v.values()))
            .collect();
        for (q, (node, e)) in resampled.into_iter().zip(energies).enumerate() {
            path.nodes[lo + 1 + q] = node;
            path.energies[lo + 1 + q] = e;
        }
    }

    fn record(&self, path: &PathState, iteration: usize) -> SweepRecord {
        let v = path.nodes[path.max_index].values();
        let (ln_z1, ln_z2) = log_partitions_raw(v, self.cell_area);
        let g = gradient_raw(v, self.rho, &self.params, ln_z1, ln_z2);
        SweepRecord {
            iteration,
            level_estimate: path.level_estimate,
            energy: path.energies[path.max_index],
            residual: quad_norm(&g, self.cell_area),
            ln_z1,
            ln_z2,
            max_index: path.max_index,
            node_norm: self.rho_norm(v),
            phase: if path.climbing {
                Phase::Climb
            } else {
                Phase::Descent
            },
            reparametrized: path.reparametrized,
            line_search_failures: path.line_search_failures,
        }
    }

    fn residual(&self, v: &[f64]) -> f64 {
        quad_norm(&self.gradient(v), self.cell_area)
    }

    /// Climbing steps on the max node with the tangent frozen; a step is kept
    /// only if it lowers the residual.
    fn polish(&self, path: &PathState) -> Result<(Vec<f64>, f64, f64)> {
        let k = path.max_index;
        let mut x = path.nodes[k].values().to_vec();
        let mut f = path.energies[k];
        let mut r = self.residual(&x);
        let Some((tau, reach)) =
            self.tangent(path.nodes[k - 1].values(), &x, path.nodes[k + 1].values())
        else {
            return Ok((x, f, r));
        };
        for _ in 0..self.cfg.polish_steps {
            let upd = self.climb_step(&x, f, &tau, reach)?;
            let r_new = self.residual(&upd.values);
            // NaN residuals stop the polish too
            if r_new.partial_cmp(&r) != Some(std::cmp::Ordering::Less) {
                break;
            }
            x = upd.values;
            f = upd.energy;
            r = r_new;
        }
        Ok((x, f, r))
    }
}

fn bubble_center(rho: &WeightField, seed: u64) -> usize {
    let rho_min = rho.rho_min();
    let candidates: Vec<usize> = rho
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &r)| r == rho_min)
        .map(|(k, _)| k)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates[rng.gen_range(0..candidates.len())]
}

/// Bubble widths tried by [`find_negative_endpoint`]: `L/4, L/8, …` down to
/// `h/16`. Widths below the grid spacing produce the lattice-scale spikes
/// that carry negative energy on coarse grids.
pub fn bubble_widths(grid: &crate::manifold::TorusGrid) -> Vec<f64> {
    let floor = grid.spacing() / 16.0;
    std::iter::successors(Some(grid.side_length() / 4.0), |s| Some(s / 2.0))
        .take_while(|&s| s >= floor * (1.0 - 1e-12))
        .collect()
}

/// Zero-mean logarithmic bubble `ln(σ²/(σ² + d²)²)` centred at node `center`.
pub fn bubble_profile(grid: &crate::manifold::TorusGrid, center: usize, sigma: f64) -> ScalarField {
    let c = grid.coords(center);
    let s2 = sigma * sigma;
    let raw = ScalarField::from_fn(*grid, |x, y| {
        let d = grid.periodic_distance((x, y), c);
        (s2 / (s2 + d * d).powi(2)).ln()
    })
    .expect("bubble profile is finite");
    project_zero_mean(&raw)
}

/// Searches `t·φ_σ`, `t = 1, 2, 4, …`, over [`bubble_widths`] for a field with
/// `I < 0`. The bubble points up when `α1 ≥ α2` and down otherwise, and sits
/// at a node where `ρ` is smallest (picked with `cfg.rng_seed` among ties).
pub fn find_negative_endpoint(
    rho: &WeightField,
    p: &InteractionParams,
    cfg: &SolverConfig,
) -> Result<ScalarField> {
    cfg.validate()?;
    let grid = rho.grid();
    let sign = if p.alpha2 > p.alpha1 { -1.0 } else { 1.0 };
    let center = bubble_center(rho, cfg.rng_seed);
    let mut best = f64::INFINITY;
    for sigma in bubble_widths(grid) {
        let phi = bubble_profile(grid, center, sigma);
        let mut t = sign;
        for _ in 0..cfg.endpoint_scaling_budget {
            let candidate = phi.scaled(t);
            let e = energy_parts(candidate.values(), rho, p).0;
            if e < 0.0 {
                return Ok(candidate);
            }
            if e < best {
                best = e;
            }
            t *= 2.0;
        }
    }
    Err(Error::NoNegativeEndpoint { best_energy: best })
}

/// Linear path `k/(m−1)·v*`, `k = 0..m`.
pub fn initialize_path(
    endpoint: &ScalarField,
    m: usize,
    rho: &WeightField,
    p: &InteractionParams,
) -> Result<PathState> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!(
            "path needs at least 3 nodes, got {m}"
        )));
    }
    let nodes = (0..m)
        .map(|k| {
            if k == 0 {
                ScalarField::zeros(*endpoint.grid())
            } else if k == m - 1 {
                endpoint.clone()
            } else {
                project_zero_mean(&endpoint.scaled(k as f64 / (m - 1) as f64))
            }
        })
        .collect();
    PathState::from_nodes(nodes, rho, p)
}

/// One deformation sweep.
pub fn deform_path(
    path: &PathState,
    rho: &WeightField,
    p: &InteractionParams,
    cfg: &SolverConfig,
) -> Result<PathState> {
    cfg.validate()?;
    rho.grid().check_same(path.nodes[0].grid())?;
    Problem::new(rho, *p, cfg).sweep(path)
}

pub fn solve(
    rho: &WeightField,
    p: &InteractionParams,
    cfg: &SolverConfig,
) -> Result<MountainPassResult> {
    solve_with_observer(rho, p, cfg, &mut |_| {})
}

/// [`solve`], reporting every sweep record to `observer` as it is produced.
pub fn solve_with_observer(
    rho: &WeightField,
    p: &InteractionParams,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&SweepRecord),
) -> Result<MountainPassResult> {
    cfg.validate()?;
    let endpoint = match find_negative_endpoint(rho, p, cfg) {
        Ok(v) => v,
        Err(Error::NoNegativeEndpoint { .. }) => return Ok(no_endpoint_result(rho)),
        Err(e) => return Err(e),
    };
    let path = initialize_path(&endpoint, cfg.path_nodes, rho, p)?;
    run(rho, p, cfg, path, false, observer)
}

fn no_endpoint_result(rho: &WeightField) -> MountainPassResult {
    MountainPassResult {
        status: Status::NoNegativeEndpoint,
        solution: ScalarField::zeros(*rho.grid()),
        level: f64::NAN,
        residual: f64::NAN,
        solution_norm: 0.0,
        iterations: 0,
        ps_trajectory: Vec::new(),
        endpoint: None,
        path: None,
        warm_started: false,
        suspected_blow_up: false,
        concentration: Vec::new(),
    }
}

fn run(
    rho: &WeightField,
    p: &InteractionParams,
    cfg: &SolverConfig,
    mut path: PathState,
    warm_started: bool,
    observer: &mut dyn FnMut(&SweepRecord),
) -> Result<MountainPassResult> {
    let problem = Problem::new(rho, *p, cfg);
    let grid = *rho.grid();
    let mut trajectory = Vec::new();
    let mut best: Option<(f64, ScalarField, f64)> = None;
    let mut window_level = path.level_estimate;

    for iteration in 1..=cfg.max_outer_iters {
        path = problem.sweep(&path)?;
        let rec = problem.record(&path, iteration);
        observer(&rec);
        trajectory.push(rec);

        if best.as_ref().is_none_or(|(r, _, _)| rec.residual < *r) {
            best = Some((rec.residual, path.nodes[path.max_index].clone(), rec.energy));
        }
        if rec.residual <= cfg.residual_tol && path.has_interior_peak() {
            let (x, level, _) = problem.polish(&path)?;
            let solution = ScalarField::from_raw(grid, x);
            let residual = problem.residual(solution.values());
            return Ok(finish(
                &problem,
                Status::Converged,
                solution,
                level,
                residual,
                iteration,
                trajectory,
                path,
                warm_started,
                false,
            ));
        }
        if !path.climbing && path.sweeps.is_multiple_of(cfg.reparametrize_every) {
            let drop = window_level - path.level_estimate;
            if drop <= cfg.climb_switch_tol * path.level_estimate.abs().max(1.0) {
                path.climbing = true;
            }
            window_level = path.level_estimate;
        }
    }

    let (residual, solution, level) = best.expect("at least one sweep ran");
    let blow_up = suspected_blow_up(&trajectory);
    Ok(finish(
        &problem,
        Status::BudgetExhausted,
        solution,
        level,
        residual,
        cfg.max_outer_iters,
        trajectory,
        path,
        warm_started,
        blow_up,
    ))
}

/// Max-node norm at the end of the run more than doubled over the last
/// quarter of the trajectory.
fn suspected_blow_up(trajectory: &[SweepRecord]) -> bool {
    if trajectory.len() < 8 {
        return false;
    }
    let q = trajectory.len() * 3 / 4;
    let last = trajectory.last().unwrap().node_norm;
    last > 2.0 * trajectory[q].node_norm
}

#[allow(clippy::too_many_arguments)]
fn finish(
    problem: &Problem<'_>,
    status: Status,
    solution: ScalarField,
    level: f64,
    residual: f64,
    iterations: usize,
    ps_trajectory: Vec<SweepRecord>,
    path: PathState,
    warm_started: bool,
    suspected_blow_up: bool,
) -> MountainPassResult {
    let l = solution.grid().side_length();
    let conc = [l / 16.0, l / 8.0, l / 4.0]
        .iter()
        .filter_map(|&r| concentration(&solution, r).ok())
        .collect();
    MountainPassResult {
        status,
        solution_norm: problem.rho_norm(solution.values()),
        solution,
        level,
        residual,
        iterations,
        ps_trajectory,
        endpoint: Some(path.endpoint().clone()),
        path: Some(path),
        warm_started,
        suspected_blow_up,
        concentration: conc,
    }
}

/// Monotone parameter continuation. The first entry is solved from scratch;
/// each later entry starts from the previous converged path, with its
/// endpoint rescaled by doubling if it is no longer below zero.
pub fn continuation_solve(
    rho: &WeightField,
    schedule: &[InteractionParams],
    cfg: &SolverConfig,
) -> Result<Vec<MountainPassResult>> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument(
            "continuation schedule is empty".into(),
        ));
    }
    cfg.validate()?;
    let maxes: Vec<f64> = schedule.iter().map(InteractionParams::max).collect();
    let up = maxes.windows(2).all(|w| w[0] <= w[1]);
    let down = maxes.windows(2).all(|w| w[0] >= w[1]);
    if !(up || down) {
        return Err(Error::InvalidArgument(
            "continuation schedule must be monotone in max(alpha1, alpha2)".into(),
        ));
    }

    let mut results: Vec<MountainPassResult> = Vec::with_capacity(schedule.len());
    for p in schedule {
        let warm = results
            .last()
            .filter(|r| r.status == Status::Converged)
            .and_then(|r| r.path.as_ref())
            .map(|prev| warm_path(prev, rho, p, cfg))
            .transpose()?
            .flatten();
        let result = match warm {
            Some(path) => run(rho, p, cfg, path, true, &mut |_| {})?,
            None => solve(rho, p, cfg)?,
        };
        results.push(result);
    }
    Ok(results)
}

fn warm_path(
    prev: &PathState,
    rho: &WeightField,
    p: &InteractionParams,
    cfg: &SolverConfig,
) -> Result<Option<PathState>> {
    let mut nodes = prev.nodes.clone();
    let end = nodes.len() - 1;
    let mut scale = 1.0;
    let mut found = false;
    for _ in 0..cfg.endpoint_scaling_budget {
        let candidate = prev.endpoint().scaled(scale);
        if energy_parts(candidate.values(), rho, p).0 < 0.0 {
            found = scale != 1.0;
            if found {
                nodes[end] = candidate;
            }
            break;
        }
        scale *= 2.0;
    }
    if scale != 1.0 && !found {
        return Ok(None);
    }
    if found {
        // endpoint moved: restart from the straight path to it
        return initialize_path(&nodes[end], cfg.path_nodes, rho, p).map(Some);
    }
    let mut path = PathState::from_nodes(nodes, rho, p)?;
    path.climbing = prev.climbing;
    Ok(Some(path))
}
