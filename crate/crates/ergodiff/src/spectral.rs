//! Fourier-space machinery shared by the diffusion solvers.
//!
//! The workspace caches FFT plans and wavenumber tables for one grid.
//! Transforms use the signed-frequency layout where mode index `m` on an
//! axis of `n` samples carries wavenumber `2*pi*m/L` for `m < n/2` and
//! `2*pi*(m - n)/L` above, so the Nyquist entry is listed negative.
//! Forward transforms are normalized by `1/(nx*ny)`; the `(0, 0)`
//! coefficient of a real field is therefore its mean.
//!
//! Differentiation multiplies by `i*k` with the Nyquist entries zeroed:
//! the Nyquist mode of a real signal is real, and a centered spectral
//! derivative of it has no consistent sign, so dropping it keeps
//! derivatives of real fields real. The undamped `k^2` table retains the
//! full Nyquist value for use in decay factors and implicit denominators,
//! where damping the highest mode is the correct behavior.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::field::ScalarField;
use crate::grid::Grid2D;

type C = Complex<f64>;

/// Signed angular wavenumbers for `n` samples spanning length `l`.
pub fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    let base = std::f64::consts::TAU / l;
    (0..n)
        .map(|m| {
            let signed = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
            base * signed
        })
        .collect()
}

/// Complex Fourier coefficients of a real field, in the same row-major
/// `ny` x `nx` layout as the field values.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid2D,
    data: Vec<C>,
}

impl Spectrum {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn data(&self) -> &[C] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C] {
        &mut self.data
    }

    /// Coefficient of the signed mode pair `(mx, my)`.
    pub fn mode(&self, mx: i64, my: i64) -> C {
        let ix = mx.rem_euclid(self.grid.nx() as i64) as usize;
        let iy = my.rem_euclid(self.grid.ny() as i64) as usize;
        self.data[self.grid.idx(ix, iy)]
    }

    pub fn mode_mut(&mut self, mx: i64, my: i64) -> &mut C {
        let ix = mx.rem_euclid(self.grid.nx() as i64) as usize;
        let iy = my.rem_euclid(self.grid.ny() as i64) as usize;
        let i = self.grid.idx(ix, iy);
        &mut self.data[i]
    }
}

/// Cached plans and wavenumber tables for transforms on one grid.
pub struct SpectralWorkspace {
    grid: Grid2D,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    dkx: Vec<f64>,
    dky: Vec<f64>,
    k_sq: Vec<f64>,
}

impl SpectralWorkspace {
    pub fn new(grid: Grid2D) -> Self {
        let mut planner = FftPlanner::new();
        let fwd_x = planner.plan_fft_forward(grid.nx());
        let inv_x = planner.plan_fft_inverse(grid.nx());
        let fwd_y = planner.plan_fft_forward(grid.ny());
        let inv_y = planner.plan_fft_inverse(grid.ny());

        let kx = wavenumbers(grid.nx(), grid.lx());
        let ky = wavenumbers(grid.ny(), grid.ly());
        let mut dkx = kx.clone();
        dkx[grid.nx() / 2] = 0.0;
        let mut dky = ky.clone();
        dky[grid.ny() / 2] = 0.0;

        let mut k_sq = Vec::with_capacity(grid.n_cells());
        for wy in &ky {
            for wx in &kx {
                k_sq.push(wx * wx + wy * wy);
            }
        }

        SpectralWorkspace { grid, fwd_x, inv_x, fwd_y, inv_y, dkx, dky, k_sq }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Squared wavenumber magnitude per mode, same layout as `Spectrum`.
    pub fn k_sq(&self) -> &[f64] {
        &self.k_sq
    }

    /// Derivative multipliers along x (Nyquist zeroed).
    pub fn dkx(&self) -> &[f64] {
        &self.dkx
    }

    /// Derivative multipliers along y (Nyquist zeroed).
    pub fn dky(&self) -> &[f64] {
        &self.dky
    }

    fn fft2(&self, data: &mut [C], forward: bool) {
        let (row, col) = if forward {
            (&self.fwd_x, &self.fwd_y)
        } else {
            (&self.inv_x, &self.inv_y)
        };
        let nx = self.grid.nx();
        let ny = self.grid.ny();

        let mut scratch = vec![C::new(0.0, 0.0); row.get_inplace_scratch_len()];
        for r in data.chunks_exact_mut(nx) {
            row.process_with_scratch(r, &mut scratch);
        }

        let mut column = vec![C::new(0.0, 0.0); ny];
        let mut scratch = vec![C::new(0.0, 0.0); col.get_inplace_scratch_len()];
        for ix in 0..nx {
            for iy in 0..ny {
                column[iy] = data[iy * nx + ix];
            }
            col.process_with_scratch(&mut column, &mut scratch);
            for iy in 0..ny {
                data[iy * nx + ix] = column[iy];
            }
        }
    }

    pub fn forward(&self, field: &ScalarField) -> Spectrum {
        debug_assert_eq!(field.grid(), &self.grid);
        let mut data: Vec<C> = field.values().iter().map(|&v| C::new(v, 0.0)).collect();
        self.fft2(&mut data, true);
        let norm = 1.0 / self.grid.n_cells() as f64;
        for c in &mut data {
            *c *= norm;
        }
        Spectrum { grid: self.grid, data }
    }

    pub fn inverse(&self, spectrum: &Spectrum) -> ScalarField {
        debug_assert_eq!(&spectrum.grid, &self.grid);
        let mut data = spectrum.data.clone();
        self.fft2(&mut data, false);
        let values = data.iter().map(|c| c.re).collect();
        ScalarField::from_values(self.grid, values).expect("spectrum length matches grid")
    }

    /// Spectral gradient of a spectrum, returned as real-space fields.
    pub fn gradient_spectrum(&self, spectrum: &Spectrum) -> (ScalarField, ScalarField) {
        debug_assert_eq!(&spectrum.grid, &self.grid);
        let n = self.grid.n_cells();
        let mut gx = Vec::with_capacity(n);
        let mut gy = Vec::with_capacity(n);
        let nx = self.grid.nx();
        for (i, c) in spectrum.data.iter().enumerate() {
            let wx = self.dkx[i % nx];
            let wy = self.dky[i / nx];
            // multiply by i*w: (a + bi) * iw = -w*b + i*w*a
            gx.push(C::new(-wx * c.im, wx * c.re));
            gy.push(C::new(-wy * c.im, wy * c.re));
        }
        let gx = self.inverse(&Spectrum { grid: self.grid, data: gx });
        let gy = self.inverse(&Spectrum { grid: self.grid, data: gy });
        (gx, gy)
    }

    pub fn gradient(&self, field: &ScalarField) -> (ScalarField, ScalarField) {
        self.gradient_spectrum(&self.forward(field))
    }

    /// Divergence of the vector field `(fx, fy)`, kept in Fourier space.
    pub fn divergence_spectrum(&self, fx: &ScalarField, fy: &ScalarField) -> Spectrum {
        debug_assert_eq!(fx.grid(), &self.grid);
        debug_assert_eq!(fy.grid(), &self.grid);
        let sx = self.forward(fx);
        let sy = self.forward(fy);
        let nx = self.grid.nx();
        let data = sx
            .data
            .iter()
            .zip(&sy.data)
            .enumerate()
            .map(|(i, (a, b))| {
                let wx = self.dkx[i % nx];
                let wy = self.dky[i / nx];
                C::new(-wx * a.im - wy * b.im, wx * a.re + wy * b.re)
            })
            .collect();
        Spectrum { grid: self.grid, data }
    }

    pub fn divergence(&self, fx: &ScalarField, fy: &ScalarField) -> ScalarField {
        self.inverse(&self.divergence_spectrum(fx, fy))
    }
}
