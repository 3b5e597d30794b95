//! Uniform periodic discretization of the rectangular workspace.
//!
//! Fields are sampled at cell centers and stored row-major (the x index
//! varies fastest). All spectral operators, densities and coverage tallies
//! in this crate share one `Grid2D`.

use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Uniform `nx` x `ny` grid over the rectangle `[0, lx] x [0, ly]`.
///
/// Dimensions must be even and at least 8 so the transform's Nyquist mode
/// is unambiguous and the grid resolves more than boundary effects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl Grid2D {
    pub const MIN_DIM: usize = 8;

    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < Self::MIN_DIM || ny < Self::MIN_DIM {
            return Err(Error::config(
                "grid",
                format!("dimensions {nx}x{ny} below the minimum of {0}x{0}", Self::MIN_DIM),
            ));
        }
        if !nx.is_multiple_of(2) || !ny.is_multiple_of(2) {
            return Err(Error::config(
                "grid",
                format!("dimensions {nx}x{ny} must be even"),
            ));
        }
        if !(lx > 0.0) || !(ly > 0.0) || !lx.is_finite() || !ly.is_finite() {
            return Err(Error::config(
                "grid",
                format!("edge lengths {lx}x{ly} must be positive and finite"),
            ));
        }
        Ok(Grid2D { nx, ny, lx, ly })
    }

    /// Unit square, the default domain for the built-in scenarios.
    pub fn unit(nx: usize, ny: usize) -> Result<Self> {
        Grid2D::new(nx, ny, 1.0, 1.0)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.lx * self.ly / (self.nx * self.ny) as f64
    }

    /// Flat row-major index of cell `(ix, iy)`.
    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny);
        iy * self.nx + ix
    }

    /// Center coordinates of cell `(ix, iy)` (midpoint sampling).
    pub fn cell_center(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new((ix as f64 + 0.5) * self.dx(), (iy as f64 + 0.5) * self.dy())
    }

    /// Cell whose center is nearest to `p`, for `p` in the closed domain.
    ///
    /// A point exactly on a shared cell edge is equidistant from two
    /// centers; the lower index wins so deposits are deterministic.
    pub fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let ix = Self::axis_cell(p.x, self.dx(), self.nx);
        let iy = Self::axis_cell(p.y, self.dy(), self.ny);
        (ix, iy)
    }

    #[inline]
    fn axis_cell(coord: f64, h: f64, n: usize) -> usize {
        // ceil(c/h) - 1 maps (j*h, (j+1)*h] to j, sending exact edge
        // points j*h to the lower cell j-1; clamp handles coord = 0.
        let i = (coord / h).ceil() as isize - 1;
        i.clamp(0, n as isize - 1) as usize
    }

    pub fn contains(&self, p: Vec2) -> bool {
        (0.0..=self.lx).contains(&p.x) && (0.0..=self.ly).contains(&p.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_undersized() {
        assert!(Grid2D::new(7, 8, 1.0, 1.0).is_err());
        assert!(Grid2D::new(8, 9, 1.0, 1.0).is_err());
        assert!(Grid2D::new(4, 4, 1.0, 1.0).is_err());
        assert!(Grid2D::new(8, 8, 0.0, 1.0).is_err());
        assert!(Grid2D::new(8, 8, 1.0, -1.0).is_err());
    }

    #[test]
    fn cell_area_exact() {
        let g = Grid2D::new(8, 16, 1.0, 2.0).unwrap();
        assert_eq!(g.cell_area(), 1.0 * 2.0 / (8.0 * 16.0));
        assert!(g.cell_area() > 0.0);
    }

    #[test]
    fn nearest_cell_binning() {
        let g = Grid2D::unit(8, 8).unwrap();
        let h = g.dx();
        // interior of cell 3
        assert_eq!(g.cell_of(Vec2::new(3.4 * h, 0.5 * h)), (3, 0));
        // exact shared edge between cells 2 and 3: lower index wins
        assert_eq!(g.cell_of(Vec2::new(3.0 * h, 0.5 * h)), (2, 0));
        // domain corners clamp into the boundary cells
        assert_eq!(g.cell_of(Vec2::new(0.0, 0.0)), (0, 0));
        assert_eq!(g.cell_of(Vec2::new(1.0, 1.0)), (7, 7));
    }

    #[test]
    fn cell_center_midpoints() {
        let g = Grid2D::unit(8, 8).unwrap();
        let c = g.cell_center(0, 0);
        assert_eq!(c, Vec2::new(0.0625, 0.0625));
        // a cell center bins back to its own cell
        assert_eq!(g.cell_of(c), (0, 0));
    }
}
