//! Scalar fields sampled at cell centers.
//!
//! A `ScalarField` couples a flat row-major value buffer to its `Grid2D`,
//! so arithmetic between fields can check that both sides discretize the
//! same domain. Interpolation treats the field as periodic, matching the
//! spectral solvers.

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::vec2::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid2D) -> Self {
        ScalarField { grid, values: vec![0.0; grid.n_cells()] }
    }

    pub fn constant(grid: Grid2D, value: f64) -> Self {
        ScalarField { grid, values: vec![value; grid.n_cells()] }
    }

    /// Evaluate `f` at every cell center.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.n_cells());
        for iy in 0..grid.ny() {
            for ix in 0..grid.nx() {
                let c = grid.cell_center(ix, iy);
                values.push(f(c.x, c.y));
            }
        }
        ScalarField { grid, values }
    }

    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::GridMismatch {
                context: format!(
                    "field buffer holds {} values but the grid has {} cells",
                    values.len(),
                    grid.n_cells()
                ),
            });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.grid.idx(ix, iy)]
    }

    #[inline]
    pub fn at_mut(&mut self, ix: usize, iy: usize) -> &mut f64 {
        let i = self.grid.idx(ix, iy);
        &mut self.values[i]
    }

    pub fn ensure_same_grid(&self, other: &ScalarField, context: &str) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch { context: context.to_string() });
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Midpoint-rule integral over the domain.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// Discrete L2 norm, `sqrt(sum f^2 * cell_area)`.
    pub fn l2_norm(&self) -> f64 {
        let ss: f64 = self.values.iter().map(|v| v * v).sum();
        (ss * self.grid.cell_area()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    /// Bilinear interpolation at `p` from the four surrounding cell
    /// centers, with periodic wraparound past the outermost centers.
    pub fn sample(&self, p: Vec2) -> f64 {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let (i0, i1, fx) = axis_weights(p.x, self.grid.dx(), nx);
        let (j0, j1, fy) = axis_weights(p.y, self.grid.dy(), ny);
        let v00 = self.values[self.grid.idx(i0, j0)];
        let v10 = self.values[self.grid.idx(i1, j0)];
        let v01 = self.values[self.grid.idx(i0, j1)];
        let v11 = self.values[self.grid.idx(i1, j1)];
        let a = v00 + fx * (v10 - v00);
        let b = v01 + fx * (v11 - v01);
        a + fy * (b - a)
    }
}

/// Neighboring center indices and the interpolation weight along one axis.
#[inline]
fn axis_weights(coord: f64, h: f64, n: usize) -> (usize, usize, f64) {
    // Lattice coordinate of the cell centers: center i sits at u = i.
    let u = coord / h - 0.5;
    let base = u.floor();
    let frac = u - base;
    let i0 = (base as isize).rem_euclid(n as isize) as usize;
    let i1 = (i0 + 1) % n;
    (i0, i1, frac)
}
