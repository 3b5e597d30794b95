//! Spectral multiscale coverage baseline.
//!
//! SMC compares the target and empirical densities coefficient by
//! coefficient on a half-range cosine basis,
//!
//! ```text
//! f_k(x, y) = cos(pi m1 x / lx) cos(pi m2 y / ly) / h_k
//! ```
//!
//! with `h_k` chosen so the basis is orthonormal under the midpoint
//! inner product. The steering potential is
//!
//! ```text
//! phi = sum_k Lambda_k (c_k - mu_k) f_k ,
//! Lambda_k = (1 + pi^2 (m1^2 + m2^2))^(-s)
//! ```
//!
//! which is positive over regions that already received too much
//! attention; agents descend it. The weights use the wavenumbers of the
//! unit-normalized domain (`pi m` for mode index `m`), the setting the
//! multiscale coverage literature evaluates them in, so the
//! coarse-before-fine preference does not depend on the physical extent
//! of the domain. Because the basis is not periodic, the
//! gradient is synthesized analytically from the same coefficient tables
//! rather than through the FFT.

use crate::density::TargetDensity;
use crate::error::Result;
use crate::field::ScalarField;
use crate::grid::Grid2D;

/// Precomputed cosine tables and spectral weights for one grid.
pub struct SmcBasis {
    grid: Grid2D,
    modes: usize,
    // axis tables, laid out [m * n + i]
    kx: Vec<f64>,
    ky: Vec<f64>,
    cos_x: Vec<f64>,
    sin_x: Vec<f64>,
    cos_y: Vec<f64>,
    sin_y: Vec<f64>,
    // per-mode-pair tables, laid out [m2 * modes + m1]
    lambda: Vec<f64>,
    inv_norm: Vec<f64>,
}

impl SmcBasis {
    pub fn new(grid: Grid2D, modes: usize, weight_exponent: f64) -> Self {
        let kx: Vec<f64> =
            (0..modes).map(|m| std::f64::consts::PI * m as f64 / grid.lx()).collect();
        let ky: Vec<f64> =
            (0..modes).map(|m| std::f64::consts::PI * m as f64 / grid.ly()).collect();

        let mut cos_x = Vec::with_capacity(modes * grid.nx());
        let mut sin_x = Vec::with_capacity(modes * grid.nx());
        for k in &kx {
            for ix in 0..grid.nx() {
                let x = grid.cell_center(ix, 0).x;
                cos_x.push((k * x).cos());
                sin_x.push((k * x).sin());
            }
        }
        let mut cos_y = Vec::with_capacity(modes * grid.ny());
        let mut sin_y = Vec::with_capacity(modes * grid.ny());
        for k in &ky {
            for iy in 0..grid.ny() {
                let y = grid.cell_center(0, iy).y;
                cos_y.push((k * y).cos());
                sin_y.push((k * y).sin());
            }
        }

        let mut lambda = Vec::with_capacity(modes * modes);
        let mut inv_norm = Vec::with_capacity(modes * modes);
        for m2 in 0..modes {
            for m1 in 0..modes {
                let pi = std::f64::consts::PI;
                let k2_unit = pi * pi * (m1 * m1 + m2 * m2) as f64;
                lambda.push((1.0 + k2_unit).powf(-weight_exponent));
                let a1 = if m1 == 0 { 1.0 } else { 0.5 };
                let a2 = if m2 == 0 { 1.0 } else { 0.5 };
                inv_norm.push(1.0 / (grid.lx() * grid.ly() * a1 * a2).sqrt());
            }
        }

        SmcBasis { grid, modes, kx, ky, cos_x, sin_x, cos_y, sin_y, lambda, inv_norm }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Spectral weight of the mode pair, `(1 + pi^2 (m1^2 + m2^2))^(-s)`.
    pub fn lambda(&self, m1: usize, m2: usize) -> f64 {
        self.lambda[m2 * self.modes + m1]
    }

    /// Coefficients `<f, f_k>` for all mode pairs, in `[m2][m1]` order.
    pub fn project(&self, f: &ScalarField) -> Vec<f64> {
        let (nx, ny, m) = (self.grid.nx(), self.grid.ny(), self.modes);
        // contract x first: a[m1][iy] = sum_ix f * cos_x
        let mut a = vec![0.0; m * ny];
        for iy in 0..ny {
            let row = &f.values()[iy * nx..(iy + 1) * nx];
            for m1 in 0..m {
                let table = &self.cos_x[m1 * nx..(m1 + 1) * nx];
                let mut s = 0.0;
                for (v, c) in row.iter().zip(table) {
                    s += v * c;
                }
                a[m1 * ny + iy] = s;
            }
        }
        let area = self.grid.cell_area();
        let mut coeffs = vec![0.0; m * m];
        for m2 in 0..m {
            let ytab = &self.cos_y[m2 * ny..(m2 + 1) * ny];
            for m1 in 0..m {
                let ax = &a[m1 * ny..(m1 + 1) * ny];
                let mut s = 0.0;
                for (v, c) in ax.iter().zip(ytab) {
                    s += v * c;
                }
                coeffs[m2 * m + m1] = s * area * self.inv_norm[m2 * m + m1];
            }
        }
        coeffs
    }

    /// Weighted coefficient difference `Lambda_k (c_k - mu_k)`.
    pub fn weighted_delta(&self, mu_k: &[f64], c_k: &[f64]) -> Vec<f64> {
        mu_k.iter()
            .zip(c_k)
            .zip(&self.lambda)
            .map(|((m, c), l)| l * (c - m))
            .collect()
    }

    /// Evaluate `sum_k w_k f_k` on the grid.
    pub fn synthesize(&self, w: &[f64]) -> ScalarField {
        self.synthesize_with(w, &self.cos_x, &self.cos_y, None, None)
    }

    /// Evaluate the analytic gradient of `sum_k w_k f_k`.
    pub fn synthesize_gradient(&self, w: &[f64]) -> (ScalarField, ScalarField) {
        let gx = self.synthesize_with(w, &self.sin_x, &self.cos_y, Some(&self.kx), None);
        let gy = self.synthesize_with(w, &self.cos_x, &self.sin_y, None, Some(&self.ky));
        (gx, gy)
    }

    /// Shared separable synthesis. `scale_x`/`scale_y` inject the `-k`
    /// factors of a derivative along that axis.
    fn synthesize_with(
        &self,
        w: &[f64],
        xtab: &[f64],
        ytab: &[f64],
        scale_x: Option<&[f64]>,
        scale_y: Option<&[f64]>,
    ) -> ScalarField {
        let (nx, ny, m) = (self.grid.nx(), self.grid.ny(), self.modes);
        assert_eq!(w.len(), m * m);
        // contract modes in y first: b[m1][iy] = sum_m2 w' * ytab
        let mut b = vec![0.0; m * ny];
        for m2 in 0..m {
            let yrow = &ytab[m2 * ny..(m2 + 1) * ny];
            let sy = scale_y.map_or(1.0, |k| -k[m2]);
            for m1 in 0..m {
                let wk = w[m2 * m + m1] * self.inv_norm[m2 * m + m1] * sy;
                if wk == 0.0 {
                    continue;
                }
                let dst = &mut b[m1 * ny..(m1 + 1) * ny];
                for (d, c) in dst.iter_mut().zip(yrow) {
                    *d += wk * c;
                }
            }
        }
        let mut out = ScalarField::zeros(self.grid);
        for m1 in 0..m {
            let xrow = &xtab[m1 * nx..(m1 + 1) * nx];
            let sx = scale_x.map_or(1.0, |k| -k[m1]);
            for iy in 0..ny {
                let bv = b[m1 * ny + iy] * sx;
                if bv == 0.0 {
                    continue;
                }
                let dst = &mut out.values_mut()[iy * nx..(iy + 1) * nx];
                for (d, c) in dst.iter_mut().zip(xrow) {
                    *d += bv * c;
                }
            }
        }
        out
    }
}

/// The SMC steering potential; agents move down its gradient.
pub fn smc_potential(
    mu: &TargetDensity,
    c: &ScalarField,
    modes: usize,
    weight_exponent: f64,
) -> Result<ScalarField> {
    c.ensure_same_grid(mu.field(), "smc potential needs c and mu on one grid")?;
    let basis = SmcBasis::new(*c.grid(), modes, weight_exponent);
    let mu_k = basis.project(mu.field());
    let c_k = basis.project(c);
    Ok(basis.synthesize(&basis.weighted_delta(&mu_k, &c_k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Covariance, TargetDensity};
    use crate::vec2::Vec2;
    use approx::assert_relative_eq;

    fn grid() -> Grid2D {
        Grid2D::unit(64, 64).unwrap()
    }

    fn bimodal() -> TargetDensity {
        TargetDensity::bimodal_gaussian(
            grid(),
            [Vec2::new(0.3, 0.3), Vec2::new(0.7, 0.7)],
            [Covariance::isotropic(0.15); 2],
        )
        .unwrap()
    }

    #[test]
    fn weights_start_at_one_and_decay() {
        let b = SmcBasis::new(grid(), 8, 1.5);
        assert_eq!(b.lambda(0, 0), 1.0);
        let mut prev = f64::INFINITY;
        for m in 0..8 {
            let l = b.lambda(m, m);
            assert!(l < prev);
            prev = l;
        }
        assert!(b.lambda(1, 0) > b.lambda(2, 0));
        assert!(b.lambda(1, 1) > b.lambda(2, 1));
    }

    #[test]
    fn basis_is_orthonormal_under_midpoint_quadrature() {
        let b = SmcBasis::new(Grid2D::new(16, 12, 2.0, 1.5).unwrap(), 5, 1.5);
        for ma in 0..5usize {
            for mb in 0..5usize {
                let mut w = vec![0.0; 25];
                w[ma * 5 + mb] = 1.0;
                let f = b.synthesize(&w);
                let coeffs = b.project(&f);
                for (i, c) in coeffs.iter().enumerate() {
                    let want = if i == ma * 5 + mb { 1.0 } else { 0.0 };
                    assert_relative_eq!(*c, want, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn perfect_coverage_gives_flat_potential() {
        let mu = bimodal();
        let phi = smc_potential(&mu, mu.field(), 25, 1.5).unwrap();
        assert_eq!(phi.max_abs(), 0.0);
    }

    #[test]
    fn potential_is_zero_mean_for_unit_mass_inputs() {
        let mu = bimodal();
        let c = ScalarField::constant(grid(), 1.0);
        let phi = smc_potential(&mu, &c, 25, 1.5).unwrap();
        assert!(phi.mean().abs() < 1e-12);
        assert!(phi.max_abs() > 0.0);
    }

    #[test]
    fn overcovered_spot_repels() {
        // all dwell concentrated in one cell: the potential peaks there,
        // so descending it moves agents away
        let g = grid();
        let mu = TargetDensity::from_field(ScalarField::constant(g, 1.0), "uniform").unwrap();
        let mut c = ScalarField::zeros(g);
        *c.at_mut(32, 32) = 1.0 / g.cell_area();
        let phi = smc_potential(&mu, &c, 25, 1.5).unwrap();
        let peak = phi.at(32, 32);
        assert!(peak > phi.at(2, 2));
        assert!(peak > phi.at(60, 10));
        assert_relative_eq!(peak, phi.max(), max_relative = 1e-9);
    }

    #[test]
    fn gradient_synthesis_matches_analytic_derivative() {
        let g = Grid2D::new(32, 16, 1.0, 2.0).unwrap();
        let b = SmcBasis::new(g, 6, 1.5);
        // single mode (2, 1) with weight 1
        let mut w = vec![0.0; 36];
        w[6 + 2] = 1.0;
        let (gx, gy) = b.synthesize_gradient(&w);
        let kx = 2.0 * std::f64::consts::PI / g.lx();
        let ky = std::f64::consts::PI / g.ly();
        let norm = (g.lx() * g.ly() * 0.25).sqrt();
        let wantx = ScalarField::from_fn(g, |x, y| -kx * (kx * x).sin() * (ky * y).cos() / norm);
        let wanty = ScalarField::from_fn(g, |x, y| -ky * (kx * x).cos() * (ky * y).sin() / norm);
        for i in 0..g.n_cells() {
            assert_relative_eq!(gx.values()[i], wantx.values()[i], epsilon = 1e-12);
            assert_relative_eq!(gy.values()[i], wanty.values()[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_mode_has_no_gradient() {
        let b = SmcBasis::new(grid(), 4, 1.5);
        let mut w = vec![0.0; 16];
        w[0] = 2.0;
        let (gx, gy) = b.synthesize_gradient(&w);
        assert_eq!(gx.max_abs(), 0.0);
        assert_eq!(gy.max_abs(), 0.0);
    }
}
