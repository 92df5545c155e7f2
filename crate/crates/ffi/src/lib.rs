//! C ABI for the `mfpass` solver.
//!
//! Objects cross the boundary as opaque handles created by `mfp_*_new` /
//! `mfp_*_from_*` and released with the matching `mfp_*_free`. Every fallible
//! call returns an [`MfpStatus`]; on failure `mfp_last_error_message` holds a
//! description for the calling thread. Panics are caught and reported as
//! [`MfpStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mfpass::diagnostics::lambda_rho_gate;
use mfpass::functional::{evaluate, residual_norm};
use mfpass::manifold::{first_eigenvalue, WeightPreset};
use mfpass::mountain_pass::solve;
use mfpass::{
    Error, InteractionParams, MountainPassResult, ScalarField, SolverConfig, Status, TorusGrid,
    WeightField,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MfpStatus {
    Ok = 0,
    InvalidArgument = 1,
    GridMismatch = 2,
    InvalidField = 3,
    ConvergenceFailure = 4,
    NoNegativeEndpoint = 5,
    BudgetExhausted = 6,
    Io = 7,
    NullPointer = 8,
    Panic = 9,
}

pub struct MfpGrid(TorusGrid);
pub struct MfpWeight(WeightField);
pub struct MfpField(ScalarField);
pub struct MfpResult(MountainPassResult);

/// Solver settings; see `mfp_solver_config_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MfpSolverConfig {
    pub path_nodes: usize,
    pub max_outer_iters: usize,
    pub residual_tol: f64,
    pub initial_step: f64,
    pub step_shrink: f64,
    pub sufficient_decrease: f64,
    pub min_step: f64,
    pub endpoint_scaling_budget: usize,
    pub reparametrize_every: usize,
    pub climb_switch_tol: f64,
    pub polish_steps: usize,
    pub rng_seed: u64,
}

impl From<&SolverConfig> for MfpSolverConfig {
    fn from(c: &SolverConfig) -> Self {
        Self {
            path_nodes: c.path_nodes,
            max_outer_iters: c.max_outer_iters,
            residual_tol: c.residual_tol,
            initial_step: c.initial_step,
            step_shrink: c.step_shrink,
            sufficient_decrease: c.sufficient_decrease,
            min_step: c.min_step,
            endpoint_scaling_budget: c.endpoint_scaling_budget,
            reparametrize_every: c.reparametrize_every,
            climb_switch_tol: c.climb_switch_tol,
            polish_steps: c.polish_steps,
            rng_seed: c.rng_seed,
        }
    }
}

impl From<&MfpSolverConfig> for SolverConfig {
    fn from(c: &MfpSolverConfig) -> Self {
        Self {
            path_nodes: c.path_nodes,
            max_outer_iters: c.max_outer_iters,
            residual_tol: c.residual_tol,
            initial_step: c.initial_step,
            step_shrink: c.step_shrink,
            sufficient_decrease: c.sufficient_decrease,
            min_step: c.min_step,
            endpoint_scaling_budget: c.endpoint_scaling_budget,
            reparametrize_every: c.reparametrize_every,
            climb_switch_tol: c.climb_switch_tol,
            polish_steps: c.polish_steps,
            rng_seed: c.rng_seed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MfpFunctionalReport {
    pub value: f64,
    pub kinetic: f64,
    pub z1: f64,
    pub z2: f64,
    pub ln_z1: f64,
    pub ln_z2: f64,
    pub grad_norm: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MfpGateReport {
    pub in_lambda_rho: bool,
    pub coercive_regime: bool,
    pub mu1: f64,
    pub volume: f64,
    pub sum_margin: f64,
    pub max_margin: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(MfpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidArgument(_) | Error::Parse { .. } => MfpStatus::InvalidArgument,
            Error::GridMismatch { .. } => MfpStatus::GridMismatch,
            Error::InvalidField(_) => MfpStatus::InvalidField,
            Error::ConvergenceFailure { .. } => MfpStatus::ConvergenceFailure,
            Error::NoNegativeEndpoint { .. } => MfpStatus::NoNegativeEndpoint,
            Error::Io(_) => MfpStatus::Io,
        };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MfpStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic for `mfp_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MfpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MfpStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_last_error(&msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&msg);
            MfpStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(values: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if values.is_null() {
        return Err(null("values"));
    }
    Ok(std::slice::from_raw_parts(values, len))
}

fn params(alpha1: f64, alpha2: f64) -> Result<InteractionParams, Failure> {
    Ok(InteractionParams::new(alpha1, alpha2)?)
}

/// Message of the last failed call on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn mfp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn mfp_solver_config_default() -> MfpSolverConfig {
    MfpSolverConfig::from(&SolverConfig::default())
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn mfp_grid_new(
    side_length: f64,
    points_per_side: usize,
    out: *mut *mut MfpGrid,
) -> MfpStatus {
    guard(|| {
        let grid = TorusGrid::new(side_length, points_per_side)?;
        write_out(out, Box::into_raw(Box::new(MfpGrid(grid))), "out")
    })
}

/// # Safety
/// `grid` must come from `mfp_grid_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn mfp_grid_free(grid: *mut MfpGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes, `N²`; 0 for a null grid.
///
/// # Safety
/// `grid` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mfp_grid_len(grid: *const MfpGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// Builds a weight from a preset string such as `"const:1"`,
/// `"cosine:0.5"` or `"bump:2:0.3"`.
///
/// # Safety
/// `grid` must be a live handle, `spec` a NUL-terminated string and `out` a
/// valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn mfp_weight_from_preset(
    grid: *const MfpGrid,
    spec: *const c_char,
    out: *mut *mut MfpWeight,
) -> MfpStatus {
    guard(|| {
        let grid = deref(grid, "grid")?;
        if spec.is_null() {
            return Err(null("spec"));
        }
        let spec = CStr::from_ptr(spec)
            .to_str()
            .map_err(|_| Failure(MfpStatus::InvalidArgument, "spec is not UTF-8".into()))?;
        let preset = WeightPreset::parse(spec)?.ok_or_else(|| {
            Failure(
                MfpStatus::InvalidArgument,
                format!("unknown weight preset {spec:?}"),
            )
        })?;
        let w = preset.build(grid.0)?;
        write_out(out, Box::into_raw(Box::new(MfpWeight(w))), "out")
    })
}

/// Builds a weight from `len` row-major node values.
///
/// # Safety
/// `values` must point to `len` doubles; `grid` and `out` as above.
#[no_mangle]
pub unsafe extern "C" fn mfp_weight_from_values(
    grid: *const MfpGrid,
    values: *const f64,
    len: usize,
    out: *mut *mut MfpWeight,
) -> MfpStatus {
    guard(|| {
        let grid = deref(grid, "grid")?;
        let field = ScalarField::new(grid.0, slice(values, len)?.to_vec())?;
        let w = WeightField::new(field)?;
        write_out(out, Box::into_raw(Box::new(MfpWeight(w))), "out")
    })
}

/// # Safety
/// `weight` must come from an `mfp_weight_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn mfp_weight_free(weight: *mut MfpWeight) {
    if !weight.is_null() {
        drop(Box::from_raw(weight));
    }
}

/// # Safety
/// `values` must point to `len` doubles; `grid` and `out` as above.
#[no_mangle]
pub unsafe extern "C" fn mfp_field_from_values(
    grid: *const MfpGrid,
    values: *const f64,
    len: usize,
    out: *mut *mut MfpField,
) -> MfpStatus {
    guard(|| {
        let grid = deref(grid, "grid")?;
        let field = ScalarField::new(grid.0, slice(values, len)?.to_vec())?;
        write_out(out, Box::into_raw(Box::new(MfpField(field))), "out")
    })
}

/// Number of values in the field; 0 for null.
///
/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mfp_field_len(field: *const MfpField) -> usize {
    field.as_ref().map_or(0, |f| f.0.values().len())
}

/// Copies the field into `out`, which must hold exactly `mfp_field_len`
/// doubles.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mfp_field_values(
    field: *const MfpField,
    out: *mut f64,
    len: usize,
) -> MfpStatus {
    guard(|| {
        let field = deref(field, "field")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let values = field.0.values();
        if len != values.len() {
            return Err(Failure(
                MfpStatus::InvalidArgument,
                format!("buffer holds {len} values, field has {}", values.len()),
            ));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), out, len);
        Ok(())
    })
}

/// # Safety
/// `field` must come from an `mfp_field_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn mfp_field_free(field: *mut MfpField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// First nonzero eigenvalue of the unweighted Laplacian.
///
/// # Safety
/// `grid` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mfp_first_eigenvalue(grid: *const MfpGrid, out: *mut f64) -> MfpStatus {
    guard(|| {
        let grid = deref(grid, "grid")?;
        write_out(out, first_eigenvalue(&grid.0)?, "out")
    })
}

/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mfp_evaluate(
    field: *const MfpField,
    weight: *const MfpWeight,
    alpha1: f64,
    alpha2: f64,
    out: *mut MfpFunctionalReport,
) -> MfpStatus {
    guard(|| {
        let (v, rho) = (deref(field, "field")?, deref(weight, "weight")?);
        let r = evaluate(&v.0, &rho.0, &params(alpha1, alpha2)?)?;
        let report = MfpFunctionalReport {
            value: r.value,
            kinetic: r.kinetic,
            z1: r.z1,
            z2: r.z2,
            ln_z1: r.ln_z1,
            ln_z2: r.ln_z2,
            grad_norm: r.grad_norm,
        };
        write_out(out, report, "out")
    })
}

/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mfp_residual_norm(
    field: *const MfpField,
    weight: *const MfpWeight,
    alpha1: f64,
    alpha2: f64,
    out: *mut f64,
) -> MfpStatus {
    guard(|| {
        let (v, rho) = (deref(field, "field")?, deref(weight, "weight")?);
        write_out(
            out,
            residual_norm(&v.0, &rho.0, &params(alpha1, alpha2)?)?,
            "out",
        )
    })
}

/// # Safety
/// `grid` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mfp_gate(
    grid: *const MfpGrid,
    alpha1: f64,
    alpha2: f64,
    out: *mut MfpGateReport,
) -> MfpStatus {
    guard(|| {
        let grid = deref(grid, "grid")?;
        let g = lambda_rho_gate(&params(alpha1, alpha2)?, &grid.0)?;
        let report = MfpGateReport {
            in_lambda_rho: g.in_lambda_rho,
            coercive_regime: g.coercive_regime,
            mu1: g.mu1,
            volume: g.volume,
            sum_margin: g.sum_margin,
            max_margin: g.max_margin,
        };
        write_out(out, report, "out")
    })
}

/// Runs the mountain-pass solver. `config` may be null for defaults. A run
/// that ends without convergence still returns `MFP_STATUS_OK` and a result;
/// query it with `mfp_result_status`.
///
/// # Safety
/// `weight` must be live, `config` null or valid, `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn mfp_solve(
    weight: *const MfpWeight,
    alpha1: f64,
    alpha2: f64,
    config: *const MfpSolverConfig,
    out: *mut *mut MfpResult,
) -> MfpStatus {
    guard(|| {
        let rho = deref(weight, "weight")?;
        let cfg = config.as_ref().map(SolverConfig::from).unwrap_or_default();
        let result = solve(&rho.0, &params(alpha1, alpha2)?, &cfg)?;
        write_out(out, Box::into_raw(Box::new(MfpResult(result))), "out")
    })
}

/// `MFP_STATUS_OK` when converged, otherwise `MFP_STATUS_NO_NEGATIVE_ENDPOINT`
/// or `MFP_STATUS_BUDGET_EXHAUSTED`; `MFP_STATUS_NULL_POINTER` for null.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mfp_result_status(result: *const MfpResult) -> MfpStatus {
    match result.as_ref().map(|r| r.0.status) {
        Some(Status::Converged) => MfpStatus::Ok,
        Some(Status::NoNegativeEndpoint) => MfpStatus::NoNegativeEndpoint,
        Some(Status::BudgetExhausted) => MfpStatus::BudgetExhausted,
        None => MfpStatus::NullPointer,
    }
}

/// Minimax level estimate; NaN for null or when no endpoint was found.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mfp_result_level(result: *const MfpResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.level)
}

/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mfp_result_residual(result: *const MfpResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.residual)
}

/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mfp_result_iterations(result: *const MfpResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.iterations)
}

/// Copies the solution into a new field handle owned by the caller.
///
/// # Safety
/// `result` must be live and `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn mfp_result_solution(
    result: *const MfpResult,
    out: *mut *mut MfpField,
) -> MfpStatus {
    guard(|| {
        let r = deref(result, "result")?;
        write_out(
            out,
            Box::into_raw(Box::new(MfpField(r.0.solution.clone()))),
            "out",
        )
    })
}

/// # Safety
/// `result` must come from `mfp_solve` or be null.
#[no_mangle]
pub unsafe extern "C" fn mfp_result_free(result: *mut MfpResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
