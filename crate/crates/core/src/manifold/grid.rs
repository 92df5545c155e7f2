use crate::error::{Error, Result};

/// Uniform `N × N` grid on the square torus of side `L`.
///
/// Node `(i, j)` sits at `(i·h, j·h)`; fields are stored row-major with `i`
/// as the row index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    side_length: f64,
    points_per_side: usize,
}

impl TorusGrid {
    pub fn new(side_length: f64, points_per_side: usize) -> Result<Self> {
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "side length must be positive and finite, got {side_length}"
            )));
        }
        if points_per_side < 4 {
            return Err(Error::InvalidArgument(format!(
                "need at least 4 points per side, got {points_per_side}"
            )));
        }
        Ok(Self {
            side_length,
            points_per_side,
        })
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn n(&self) -> usize {
        self.points_per_side
    }

    pub fn len(&self) -> usize {
        self.points_per_side * self.points_per_side
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.side_length / self.points_per_side as f64
    }

    /// Quadrature weight of a node, `h²`.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn volume(&self) -> f64 {
        self.side_length * self.side_length
    }

    /// Row-major index with periodic wrap in both directions.
    #[inline]
    pub fn index(&self, i: isize, j: isize) -> usize {
        let n = self.points_per_side as isize;
        (i.rem_euclid(n) * n + j.rem_euclid(n)) as usize
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (f64, f64) {
        let h = self.spacing();
        let n = self.points_per_side;
        ((index / n) as f64 * h, (index % n) as f64 * h)
    }

    /// Shortest distance between two points on the torus.
    pub fn periodic_distance(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let wrap = |d: f64| {
            let d = d.abs().rem_euclid(self.side_length);
            d.min(self.side_length - d)
        };
        wrap(a.0 - b.0).hypot(wrap(a.1 - b.1))
    }

    /// Grid offset with the shortest periodic length, `min(k, N−k)`.
    #[inline]
    pub(crate) fn wrapped_offset(&self, k: usize) -> usize {
        let n = self.points_per_side;
        let k = k % n;
        k.min(n - k)
    }

    pub(crate) fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                expected_l: self.side_length,
                expected_n: self.points_per_side,
                found_l: other.side_length,
                found_n: other.points_per_side,
            })
        }
    }
}
