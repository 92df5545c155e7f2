//! Command-line driver: `solve`, `sweep`, `diagnose` and `eigen`.
//!
//! Exit codes: 0 success, 1 I/O failure while writing results, 2 no
//! negative-energy endpoint, 3 solver budget exhausted or eigensolver
//! failure, 4 configuration error. Configuration errors are detected before
//! any computation and leave no output files behind.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::diagnostics::{concentration, exp_mass, moser_trudinger_deficit, GateReport};
use crate::error::{Error, Result};
use crate::functional::{evaluate, residual_norm, InteractionParams};
use crate::manifold::{
    first_eigenvalue, first_weighted_eigenvalue, format_field, read_field, ScalarField, TorusGrid,
};
use crate::mountain_pass::{solve_with_observer, MountainPassResult, Status};

pub use config::{OutputFormat, RunConfig};
use output::{ConcentrationDoc, DiagnoseDoc, GridDoc, ResultDoc, SummaryRow};

#[derive(Debug, Parser)]
#[command(
    name = "mfpass",
    version,
    about = "Mountain-pass solver for the weighted mean field equation on a flat torus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find a mountain-pass solution for one parameter pair.
    Solve(RunArgs),
    /// Solve over a grid of parameter pairs and write a summary CSV.
    Sweep(RunArgs),
    /// Evaluate functional, residual and diagnostics on a stored field.
    Diagnose {
        /// Field file to inspect.
        #[arg(long)]
        field: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// First nonzero eigenvalue of the Laplacian on the grid.
    Eigen(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// Torus side length.
    #[arg(long = "length", short = 'L')]
    pub side_length: Option<f64>,
    /// Grid points per side.
    #[arg(long = "points", short = 'N')]
    pub points: Option<usize>,
    /// Weight preset or field file.
    #[arg(long)]
    pub weight: Option<String>,
    /// Maximum number of path sweeps.
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, short)]
    pub quiet: bool,
}

const EXIT_IO: u8 = 1;
const EXIT_NO_ENDPOINT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_CONFIG: u8 = 4;

impl RunArgs {
    /// Config file (if any) with command-line overrides applied.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.solver.rng_seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = Some(out.clone());
        }
        if self.side_length.is_some() || self.points.is_some() {
            let mut g = cfg.grid.unwrap_or_default();
            g.side_length = self.side_length.unwrap_or(g.side_length);
            g.points_per_side = self.points.unwrap_or(g.points_per_side);
            cfg.grid = Some(g);
        }
        if let Some(w) = &self.weight {
            cfg.weight = Some(w.clone());
            cfg.base_dir = None;
        }
        if let Some(n) = self.max_iters {
            cfg.solver.max_outer_iters = n;
        }
        match (self.alpha1, self.alpha2, &mut cfg.params) {
            (None, None, _) => {}
            (a1, a2, Some(p)) => {
                p.alpha1 = a1.unwrap_or(p.alpha1);
                p.alpha2 = a2.unwrap_or(p.alpha2);
            }
            (Some(a1), Some(a2), params @ None) => {
                *params = Some(config::ParamsConfig {
                    alpha1: a1,
                    alpha2: a2,
                });
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "--alpha1 and --alpha2 must be given together without a params block".into(),
                ))
            }
        }
        cfg.solver.validate()?;
        Ok(cfg)
    }
}

fn config_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn io_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_IO)
}

fn with_pool<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> std::result::Result<T, Error> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::InvalidArgument("--jobs must be >= 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Diagnose { field, run } => cmd_diagnose(&field, &run),
        Command::Eigen(args) => cmd_eigen(&args),
    }
}

fn write_files(dir: &Path, files: &[(&str, String)]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn concentration_docs(v: &ScalarField) -> Vec<ConcentrationDoc> {
    let l = v.grid().side_length();
    [l / 16.0, l / 8.0, l / 4.0]
        .iter()
        .map(|&r| ConcentrationDoc::from(&concentration(v, r).expect("radius is positive")))
        .collect()
}

fn grid_doc(g: &TorusGrid) -> GridDoc {
    GridDoc {
        side_length: g.side_length(),
        points_per_side: g.n(),
    }
}

fn exit_for(status: Status) -> ExitCode {
    match status {
        Status::Converged => ExitCode::SUCCESS,
        Status::NoNegativeEndpoint => ExitCode::from(EXIT_NO_ENDPOINT),
        Status::BudgetExhausted => ExitCode::from(EXIT_BUDGET),
    }
}

pub fn cmd_solve(args: &RunArgs) -> ExitCode {
    let prepared = (|| {
        let cfg = args.resolve()?;
        let grid = cfg.grid()?;
        let rho = cfg.weight(grid)?;
        let p = cfg.single_params()?;
        Ok::<_, Error>((cfg, grid, rho, p))
    })();
    let (cfg, grid, rho, p) = match prepared {
        Ok(x) => x,
        Err(e) => return config_error(&e),
    };
    let quiet = args.quiet;

    let outcome = with_pool(
        args.jobs,
        || -> Result<(MountainPassResult, GateReport, f64)> {
            let mu1 = first_eigenvalue(&grid)?;
            let gate = GateReport::from_mu1(&p, grid.volume(), mu1);
            let weighted_mu1 = first_weighted_eigenvalue(&rho)?;
            let result = solve_with_observer(&rho, &p, &cfg.solver, &mut |rec| {
                if !quiet && rec.iteration % 100 == 0 {
                    eprintln!(
                        "sweep {:>5}  I = {:.10}  residual = {:.3e}",
                        rec.iteration, rec.energy, rec.residual
                    );
                }
            })?;
            Ok((result, gate, weighted_mu1))
        },
    );
    let (result, gate, weighted_mu1) = match outcome {
        Ok(Ok(x)) => x,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BUDGET);
        }
        Err(e) => return config_error(&e),
    };

    let solution_mass = exp_mass(&result.solution).expect("solution is finite");
    let doc = ResultDoc {
        status: result.status.as_str(),
        c: result.level,
        residual: result.residual,
        iterations: result.iterations,
        solution_norm: result.solution_norm,
        suspected_blow_up: result.suspected_blow_up,
        alpha1: p.alpha1,
        alpha2: p.alpha2,
        grid: grid_doc(&grid),
        weight: cfg.weight_spec().to_string(),
        seed: cfg.solver.rng_seed,
        gate,
        weighted_mu1,
        exp_mass: output::exp_mass_extrema(&result.ps_trajectory, solution_mass),
        concentration: concentration_docs(&result.solution),
    };

    let mut files = Vec::new();
    for fmt in cfg.formats() {
        match fmt {
            OutputFormat::Json => files.push(("result.json", output::to_json(&doc))),
            OutputFormat::Csv => files.push((
                "trajectory.csv",
                output::trajectory_csv(&result.ps_trajectory),
            )),
            OutputFormat::Field => files.push(("solution.field", format_field(&result.solution))),
        }
    }
    if let Err(e) = write_files(&cfg.output_dir(), &files) {
        return io_error(&e);
    }
    if !quiet {
        println!(
            "status={} c={} residual={:.3e} iterations={} in_lambda_rho={}",
            result.status, result.level, result.residual, result.iterations, gate.in_lambda_rho
        );
    }
    exit_for(result.status)
}

pub fn cmd_sweep(args: &RunArgs) -> ExitCode {
    let prepared = (|| {
        let cfg = args.resolve()?;
        let grid = cfg.grid()?;
        let rho = cfg.weight(grid)?;
        let (a1s, a2s) = cfg.sweep_points()?;
        let mut points = Vec::with_capacity(a1s.len() * a2s.len());
        for &a1 in &a1s {
            for &a2 in &a2s {
                points.push(InteractionParams::new(a1, a2)?);
            }
        }
        Ok::<_, Error>((cfg, grid, rho, points))
    })();
    let (cfg, grid, rho, points) = match prepared {
        Ok(x) => x,
        Err(e) => return config_error(&e),
    };

    let rows = with_pool(args.jobs, || -> Result<Vec<SummaryRow>> {
        let mu1 = first_eigenvalue(&grid)?;
        Ok(points
            .par_iter()
            .enumerate()
            .map(|(k, p)| {
                let gate = GateReport::from_mu1(p, grid.volume(), mu1);
                let mut solver = cfg.solver.clone();
                solver.rng_seed = cfg.solver.rng_seed.wrapping_add(k as u64);
                match solve_with_observer(&rho, p, &solver, &mut |_| {}) {
                    Ok(r) => SummaryRow::from_result(p.alpha1, p.alpha2, &gate, &r),
                    Err(_) => SummaryRow {
                        alpha1: p.alpha1,
                        alpha2: p.alpha2,
                        in_lambda_rho: gate.in_lambda_rho,
                        status: "error".into(),
                        c: f64::NAN,
                        residual: f64::NAN,
                        sup_v: f64::NAN,
                        max_mass_fraction: f64::NAN,
                    },
                }
            })
            .collect())
    });
    let rows = match rows {
        Ok(Ok(rows)) => rows,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BUDGET);
        }
        Err(e) => return config_error(&e),
    };
    if let Err(e) = write_files(
        &cfg.output_dir(),
        &[("summary.csv", output::summary_csv(&rows))],
    ) {
        return io_error(&e);
    }
    if !args.quiet {
        print!("{}", output::summary_csv(&rows));
    }
    ExitCode::SUCCESS
}

pub fn cmd_diagnose(field: &Path, args: &RunArgs) -> ExitCode {
    let prepared = (|| {
        let cfg = args.resolve()?;
        let v = read_field(field)?;
        let grid = *v.grid();
        if cfg.grid.is_some() {
            cfg.grid()?.check_same(&grid)?;
        }
        let rho = cfg.weight(grid)?;
        let p = cfg.single_params()?;
        Ok::<_, Error>((cfg, v, rho, p))
    })();
    let (cfg, v, rho, p) = match prepared {
        Ok(x) => x,
        Err(e) => return config_error(&e),
    };
    let grid = *v.grid();
    let doc = (|| -> Result<DiagnoseDoc> {
        let (z1, z2) = exp_mass(&v)?;
        Ok(DiagnoseDoc {
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            grid: grid_doc(&grid),
            weight: cfg.weight_spec().to_string(),
            functional: evaluate(&v, &rho, &p)?,
            residual: residual_norm(&v, &rho, &p)?,
            exp_mass: output::ExpMassDoc {
                max_plus: z1,
                max_minus: z2,
            },
            moser_trudinger: moser_trudinger_deficit(&v, &rho)?,
            gate: GateReport::from_mu1(&p, grid.volume(), first_eigenvalue(&grid)?),
            concentration: concentration_docs(&v),
        })
    })();
    let doc = match doc {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_BUDGET);
        }
    };
    let json = output::to_json(&doc);
    if let Err(e) = write_files(&cfg.output_dir(), &[("diagnose.json", json.clone())]) {
        return io_error(&e);
    }
    if !args.quiet {
        print!("{json}");
    }
    ExitCode::SUCCESS
}

pub fn cmd_eigen(args: &RunArgs) -> ExitCode {
    let grid = match args.resolve().and_then(|cfg| cfg.grid()) {
        Ok(g) => g,
        Err(e) => return config_error(&e),
    };
    match first_eigenvalue(&grid) {
        Ok(mu1) => {
            println!("mu1 = {mu1:.16e}");
            println!("mu1*V = {:.16e}", mu1 * grid.volume());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_BUDGET)
        }
    }
}
