//! Run configuration files.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::functional::InteractionParams;
use crate::manifold::{read_field, TorusGrid, WeightField, WeightPreset};
use crate::mountain_pass::SolverConfig;

pub const DEFAULT_WEIGHT: &str = "const:1";
pub const DEFAULT_N: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub side_length: f64,
    #[serde(rename = "N")]
    pub points_per_side: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            side_length: 2.0 * std::f64::consts::PI,
            points_per_side: DEFAULT_N,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub alpha1: f64,
    pub alpha2: f64,
}

/// `[lo, hi, steps]`, evenly spaced and inclusive.
pub type Range = (f64, f64, usize);

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub alpha1: Range,
    pub alpha2: Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Field,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: Option<GridConfig>,
    /// Preset (`const:c`, `cosine:a`, `bump:a:s`) or a field file path,
    /// relative to the config file.
    #[serde(default)]
    pub weight: Option<String>,
    #[serde(default)]
    pub params: Option<ParamsConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub formats: Option<Vec<OutputFormat>>,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        let g = self.grid.unwrap_or_default();
        TorusGrid::new(g.side_length, g.points_per_side)
    }

    pub fn weight_spec(&self) -> &str {
        self.weight.as_deref().unwrap_or(DEFAULT_WEIGHT)
    }

    /// Builds the weight on `grid`, either from a preset or a field file.
    pub fn weight(&self, grid: TorusGrid) -> Result<WeightField> {
        let spec = self.weight_spec();
        if let Some(preset) = WeightPreset::parse(spec)? {
            return preset.build(grid);
        }
        let path = match &self.base_dir {
            Some(dir) if Path::new(spec).is_relative() => dir.join(spec),
            _ => PathBuf::from(spec),
        };
        let field = read_field(&path)?;
        grid.check_same(field.grid())?;
        WeightField::new(field)
    }

    pub fn single_params(&self) -> Result<InteractionParams> {
        match (&self.params, &self.sweep) {
            (Some(p), None) => InteractionParams::new(p.alpha1, p.alpha2),
            (_, Some(_)) => Err(Error::InvalidArgument(
                "this command takes params, not a sweep".into(),
            )),
            (None, None) => Err(Error::InvalidArgument("config has no params".into())),
        }
    }

    /// Sweep points in alpha1-major order, with the two axes.
    pub fn sweep_points(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        match (&self.params, &self.sweep) {
            (None, Some(s)) => Ok((expand(s.alpha1)?, expand(s.alpha2)?)),
            (Some(_), _) => Err(Error::InvalidArgument(
                "this command takes a sweep, not params".into(),
            )),
            (None, None) => Err(Error::InvalidArgument("config has no sweep".into())),
        }
    }

    pub fn formats(&self) -> Vec<OutputFormat> {
        self.formats
            .clone()
            .unwrap_or_else(|| vec![OutputFormat::Json, OutputFormat::Csv, OutputFormat::Field])
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn expand((lo, hi, steps): Range) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidArgument(format!("bad range [{lo}, {hi}]")));
    }
    match steps {
        0 => Err(Error::InvalidArgument("sweep range has no steps".into())),
        1 => Ok(vec![lo]),
        _ => Ok((0..steps)
            .map(|k| {
                if k == steps - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (steps - 1) as f64
                }
            })
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_run() {
        let cfg = RunConfig::from_json(
            r#"{"grid": {"L": 6.0, "N": 16}, "weight": "cosine:0.5",
                "params": {"alpha1": 26, "alpha2": 2},
                "solver": {"path_nodes": 11, "rng_seed": 3}}"#,
        )
        .unwrap();
        assert_eq!(cfg.grid().unwrap().n(), 16);
        assert_eq!(cfg.solver.path_nodes, 11);
        assert_eq!(
            cfg.solver.max_outer_iters,
            SolverConfig::default().max_outer_iters
        );
        assert_eq!(cfg.single_params().unwrap().alpha1, 26.0);
        assert!(cfg.sweep_points().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_json(r#"{"grid": {"L": 1, "N": 8, "M": 2}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"solver": {"tolerance": 1}}"#).is_err());
    }

    #[test]
    fn sweep_ranges() {
        let cfg =
            RunConfig::from_json(r#"{"sweep": {"alpha1": [20, 26, 2], "alpha2": [2, 12, 3]}}"#)
                .unwrap();
        let (a, b) = cfg.sweep_points().unwrap();
        assert_eq!(a, vec![20.0, 26.0]);
        assert_eq!(b, vec![2.0, 7.0, 12.0]);
        let empty =
            RunConfig::from_json(r#"{"sweep": {"alpha1": [20, 26, 0], "alpha2": [2, 12, 2]}}"#)
                .unwrap();
        assert!(empty.sweep_points().is_err());
        let both = RunConfig::from_json(
            r#"{"params": {"alpha1": 1, "alpha2": 1}, "sweep": {"alpha1": [1, 2, 2], "alpha2": [1, 2, 2]}}"#,
        )
        .unwrap();
        assert!(both.single_params().is_err());
        assert!(both.sweep_points().is_err());
    }

    #[test]
    fn missing_weight_file() {
        let cfg = RunConfig {
            weight: Some("/nonexistent/rho.field".into()),
            ..Default::default()
        };
        assert!(matches!(cfg.weight(cfg.grid().unwrap()), Err(Error::Io(_))));
    }
}
