use super::TorusGrid;
use crate::error::{Error, Result};
use crate::numeric;

/// Grid samples of a real field, row-major.
#[derive(Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wraps `values`; rejects wrong lengths and non-finite samples.
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        let field = Self { grid, values };
        field.check_finite()?;
        Ok(field)
    }

    pub(crate) fn from_raw(grid: TorusGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.coords(k);
                f(x, y)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable access to the samples. Nothing stops a caller from writing
    /// NaN here; every numerical entry point re-validates its inputs.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(k) => Err(Error::InvalidField(format!(
                "non-finite sample {} at index {k}",
                self.values[k]
            ))),
        }
    }

    pub(crate) fn check_grid(&self, other: &ScalarField) -> Result<()> {
        self.grid.check_same(&other.grid)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Discrete mean `(1/N²) Σ v`.
    pub fn mean(&self) -> f64 {
        numeric::sum(self.values.iter().copied()) / self.values.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, s: f64) -> ScalarField {
        self.map(|v| s * v)
    }

    /// `self + s·other`. Grids must match.
    pub fn add_scaled(&self, s: f64, other: &ScalarField) -> Result<ScalarField> {
        self.check_grid(other)?;
        Ok(Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + s * b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.add_scaled(-1.0, other)
    }

    /// `(1−w)·self + w·other`.
    pub fn lerp(&self, other: &ScalarField, w: f64) -> Result<ScalarField> {
        self.check_grid(other)?;
        Ok(Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (1.0 - w) * a + w * b)
                .collect(),
        ))
    }
}

impl std::ops::Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.map(|v| -v)
    }
}

/// `rho_min / rho_max` below which a weight is flagged as nearly degenerate.
pub const DEGENERATE_RATIO: f64 = 1e-6;

/// Strictly positive weight `ρ` with cached extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    field: ScalarField,
    rho_min: f64,
    rho_max: f64,
}

impl WeightField {
    pub fn new(field: ScalarField) -> Result<Self> {
        field.check_finite()?;
        let rho_min = field.min();
        let rho_max = field.max();
        if rho_min <= 0.0 {
            return Err(Error::InvalidField(format!(
                "weight must be strictly positive, min sample is {rho_min}"
            )));
        }
        Ok(Self {
            field,
            rho_min,
            rho_max,
        })
    }

    pub fn uniform(grid: TorusGrid, c: f64) -> Result<Self> {
        Self::new(ScalarField::constant(grid, c))
    }

    pub fn grid(&self) -> &TorusGrid {
        self.field.grid()
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn values(&self) -> &[f64] {
        self.field.values()
    }

    pub fn rho_min(&self) -> f64 {
        self.rho_min
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    pub fn mean(&self) -> f64 {
        self.field.mean()
    }

    /// True when `rho_min < 1e-6 · rho_max`.
    pub fn is_nearly_degenerate(&self) -> bool {
        self.rho_min < DEGENERATE_RATIO * self.rho_max
    }
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("min", &self.min())
            .field("max", &self.max())
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new(1.0, 4).unwrap()
    }

    #[test]
    fn construction_validates_length_and_finiteness() {
        assert!(ScalarField::new(grid(), vec![0.0; 16]).is_ok());
        assert!(matches!(
            ScalarField::new(grid(), vec![0.0; 15]),
            Err(Error::InvalidField(_))
        ));
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(matches!(
            ScalarField::new(grid(), v),
            Err(Error::InvalidField(_))
        ));
        let mut v = vec![0.0; 16];
        v[0] = f64::INFINITY;
        assert!(ScalarField::new(grid(), v).is_err());
    }

    #[test]
    fn weight_rejects_nonpositive_samples() {
        assert!(WeightField::uniform(grid(), 1.0).is_ok());
        assert!(WeightField::uniform(grid(), 0.0).is_err());
        let mut v = vec![1.0; 16];
        v[5] = -0.1;
        let f = ScalarField::new(grid(), v).unwrap();
        assert!(WeightField::new(f).is_err());
    }

    #[test]
    fn weight_flags_near_degeneracy() {
        let mut v = vec![1.0; 16];
        v[2] = 1e-7;
        let w = WeightField::new(ScalarField::new(grid(), v).unwrap()).unwrap();
        assert!(w.is_nearly_degenerate());
        assert_eq!(w.rho_min(), 1e-7);
        assert_eq!(w.rho_max(), 1.0);
        assert!(!WeightField::uniform(grid(), 3.0)
            .unwrap()
            .is_nearly_degenerate());
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = ScalarField::zeros(grid());
        let b = ScalarField::zeros(TorusGrid::new(1.0, 5).unwrap());
        assert!(matches!(a.sub(&b), Err(Error::GridMismatch { .. })));
    }
}
