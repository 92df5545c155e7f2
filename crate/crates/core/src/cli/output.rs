//! Result documents and data files.

use std::fmt::Write as _;

use serde::Serialize;

use crate::diagnostics::{ConcentrationReport, GateReport, MoserTrudingerDeficit};
use crate::functional::FunctionalReport;
use crate::mountain_pass::{MountainPassResult, SweepRecord};

pub const TRAJECTORY_HEADER: &str = "iteration,energy,residual,ln_z1,ln_z2";
pub const SUMMARY_HEADER: &str =
    "alpha1,alpha2,in_lambda_rho,status,c,residual,sup_v,max_mass_fraction";

#[derive(Debug, Clone, Serialize)]
pub struct GridDoc {
    #[serde(rename = "L")]
    pub side_length: f64,
    #[serde(rename = "N")]
    pub points_per_side: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpMassDoc {
    pub max_plus: f64,
    pub max_minus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationDoc {
    pub r: f64,
    pub fraction: f64,
    pub center: [usize; 2],
    pub sup_v: f64,
    pub fraction_neg: f64,
    pub center_neg: [usize; 2],
    pub sup_neg_v: f64,
}

impl From<&ConcentrationReport> for ConcentrationDoc {
    fn from(c: &ConcentrationReport) -> Self {
        Self {
            r: c.radius,
            fraction: c.max_mass_fraction,
            center: [c.center.0, c.center.1],
            sup_v: c.sup_v,
            fraction_neg: c.max_mass_fraction_neg,
            center_neg: [c.center_neg.0, c.center_neg.1],
            sup_neg_v: c.sup_neg_v,
        }
    }
}

/// `result.json` of a solve. Non-finite numbers serialize as `null`.
#[derive(Debug, Clone, Serialize)]
pub struct ResultDoc {
    pub status: &'static str,
    pub c: f64,
    pub residual: f64,
    pub iterations: usize,
    pub solution_norm: f64,
    pub suspected_blow_up: bool,
    pub alpha1: f64,
    pub alpha2: f64,
    pub grid: GridDoc,
    pub weight: String,
    pub seed: u64,
    pub gate: GateReport,
    /// First eigenvalue of `−div(ρ∇·)`, informational.
    pub weighted_mu1: f64,
    pub exp_mass: ExpMassDoc,
    pub concentration: Vec<ConcentrationDoc>,
}

/// `diagnose.json`.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnoseDoc {
    pub alpha1: f64,
    pub alpha2: f64,
    pub grid: GridDoc,
    pub weight: String,
    pub functional: FunctionalReport,
    pub residual: f64,
    pub exp_mass: ExpMassDoc,
    pub moser_trudinger: MoserTrudingerDeficit,
    pub gate: GateReport,
    pub concentration: Vec<ConcentrationDoc>,
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 100 + 64);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.iteration,
            num(r.energy),
            num(r.residual),
            num(r.ln_z1),
            num(r.ln_z2)
        )
        .unwrap();
    }
    out
}

/// One line of the sweep summary. `status` is a solver status or `error`.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub alpha1: f64,
    pub alpha2: f64,
    pub in_lambda_rho: bool,
    pub status: String,
    pub c: f64,
    pub residual: f64,
    pub sup_v: f64,
    pub max_mass_fraction: f64,
}

impl SummaryRow {
    pub fn from_result(
        alpha1: f64,
        alpha2: f64,
        gate: &GateReport,
        r: &MountainPassResult,
    ) -> Self {
        let l = r.solution.grid().side_length();
        let fraction = crate::diagnostics::concentration(&r.solution, l / 8.0)
            .map(|c| c.max_mass_fraction)
            .unwrap_or(f64::NAN);
        Self {
            alpha1,
            alpha2,
            in_lambda_rho: gate.in_lambda_rho,
            status: r.status.as_str().to_string(),
            c: r.level,
            residual: r.residual,
            sup_v: r.solution.max(),
            max_mass_fraction: fraction,
        }
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(r.alpha1),
            num(r.alpha2),
            r.in_lambda_rho,
            r.status,
            num(r.c),
            num(r.residual),
            num(r.sup_v),
            num(r.max_mass_fraction)
        )
        .unwrap();
    }
    out
}

pub fn exp_mass_extrema(records: &[SweepRecord], solution: (f64, f64)) -> ExpMassDoc {
    let (mut p, mut m) = solution;
    for r in records {
        p = p.max(r.ln_z1.exp());
        m = m.max(r.ln_z2.exp());
    }
    ExpMassDoc {
        max_plus: p,
        max_minus: m,
    }
}
