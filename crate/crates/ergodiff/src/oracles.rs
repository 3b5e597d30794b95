//! Slow reference implementations used by the test suite.
//!
//! The solvers and accumulators in this crate lean on FFTs and incremental
//! bookkeeping. The checks in this module recompute the same quantities the
//! blunt way: explicit finite differences with hand-rolled periodic index
//! arithmetic, and coverage statistics rebuilt from raw trajectory frames in
//! a single pass. Nothing here shares transform, wrap, or norm code with the
//! fast paths, so agreement between the two routes is evidence rather than
//! tautology. None of it is optimized and none of it should be called from
//! production code.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::vec2::Vec2;

/// Dense 2-D array with explicit torus indexing, independent of [`ScalarField`].
#[derive(Debug, Clone, PartialEq)]
pub struct FdField {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    values: Vec<f64>,
}

impl FdField {
    /// Copies geometry and samples out of a grid-backed field.
    pub fn from_scalar(f: &ScalarField) -> Self {
        let g = f.grid();
        FdField {
            nx: g.nx(),
            ny: g.ny(),
            dx: g.dx(),
            dy: g.dy(),
            values: f.values().to_vec(),
        }
    }

    /// Sample at signed cell indices, wrapping around the torus.
    pub fn at(&self, ix: isize, iy: isize) -> f64 {
        let ix = ix.rem_euclid(self.nx as isize) as usize;
        let iy = iy.rem_euclid(self.ny as isize) as usize;
        self.values[iy * self.nx + ix]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Largest absolute pointwise difference against another array of the
    /// same shape.
    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        assert_eq!(self.values.len(), other.len(), "shape mismatch in comparison");
        self.values
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One fully explicit Euler step of the edge-stopping diffusion plus the
/// stabilizing linear term, discretized with second-order central
/// differences in conservative (flux) form on the periodic grid.
///
/// Both terms are treated explicitly, so the step is only meaningful below
/// the diffusion stability bound `h^2 / (4 (1 + alpha))` with `h` the
/// smaller cell edge; larger steps are refused rather than silently
/// producing garbage.
pub fn fd_pm_step(g: &FdField, k_edge: f64, alpha: f64, dt: f64) -> Result<FdField> {
    let h = g.dx.min(g.dy);
    let bound = h * h / (4.0 * (1.0 + alpha));
    if !(dt > 0.0) || dt > bound {
        return Err(Error::invalid(format!(
            "explicit step {dt} outside (0, {bound:.3e}] for cell edge {h}"
        )));
    }

    // cell-centered diffusivity from central-difference gradients
    let mut diff = vec![0.0; g.values.len()];
    for iy in 0..g.ny as isize {
        for ix in 0..g.nx as isize {
            let gx = (g.at(ix + 1, iy) - g.at(ix - 1, iy)) / (2.0 * g.dx);
            let gy = (g.at(ix, iy + 1) - g.at(ix, iy - 1)) / (2.0 * g.dy);
            let s = (gx * gx + gy * gy).sqrt() / k_edge;
            diff[iy as usize * g.nx + ix as usize] = 1.0 / (1.0 + s * s);
        }
    }
    let d_at = |ix: isize, iy: isize| {
        let ix = ix.rem_euclid(g.nx as isize) as usize;
        let iy = iy.rem_euclid(g.ny as isize) as usize;
        diff[iy * g.nx + ix]
    };

    // face diffusivities are arithmetic means of the adjacent cells, so the
    // nonlinear fluxes telescope and the cell average is conserved exactly
    let mut out = g.clone();
    for iy in 0..g.ny as isize {
        for ix in 0..g.nx as isize {
            let c = g.at(ix, iy);
            let fe = 0.5 * (d_at(ix, iy) + d_at(ix + 1, iy)) * (g.at(ix + 1, iy) - c) / g.dx;
            let fw = 0.5 * (d_at(ix - 1, iy) + d_at(ix, iy)) * (c - g.at(ix - 1, iy)) / g.dx;
            let fn_ = 0.5 * (d_at(ix, iy) + d_at(ix, iy + 1)) * (g.at(ix, iy + 1) - c) / g.dy;
            let fs = 0.5 * (d_at(ix, iy - 1) + d_at(ix, iy)) * (c - g.at(ix, iy - 1)) / g.dy;
            let pm = (fe - fw) / g.dx + (fn_ - fs) / g.dy;
            let lap = (g.at(ix + 1, iy) - 2.0 * c + g.at(ix - 1, iy)) / (g.dx * g.dx)
                + (g.at(ix, iy + 1) - 2.0 * c + g.at(ix, iy - 1)) / (g.dy * g.dy);
            out.values[iy as usize * g.nx + ix as usize] = c + dt * (pm + alpha * lap);
        }
    }
    Ok(out)
}

/// Repeats [`fd_pm_step`] for `n_steps` steps.
pub fn fd_pm_evolve(
    g: &FdField,
    k_edge: f64,
    alpha: f64,
    dt: f64,
    n_steps: usize,
) -> Result<FdField> {
    let mut cur = g.clone();
    for _ in 0..n_steps {
        cur = fd_pm_step(&cur, k_edge, alpha, dt)?;
    }
    Ok(cur)
}

/// Recomputes the global coverage error from raw deposit frames in one pass.
///
/// `frames` lists the agent positions at every deposit, in order; each frame
/// contributes one dwell interval `dt` per agent. The empirical density,
/// the deficit against `mu`, and its weighted 2-norm are all rebuilt here
/// with plain loops, independent of the incremental accumulator.
pub fn brute_force_e(frames: &[Vec<Vec2>], dt: f64, mu: &ScalarField) -> Result<f64> {
    let (Some(first), true) = (frames.first(), dt > 0.0) else {
        return Err(Error::invalid("need at least one frame and a positive dwell"));
    };
    let n_agents = first.len();
    if n_agents == 0 {
        return Err(Error::invalid("frames carry no agents"));
    }
    let g = mu.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let (dx, dy) = (g.dx(), g.dy());

    let mut dwell = vec![0.0f64; nx * ny];
    for frame in frames {
        if frame.len() != n_agents {
            return Err(Error::invalid("agent count varies between frames"));
        }
        for p in frame {
            let ix = (((p.x / dx).ceil() as isize) - 1).clamp(0, nx as isize - 1) as usize;
            let iy = (((p.y / dy).ceil() as isize) - 1).clamp(0, ny as isize - 1) as usize;
            dwell[iy * nx + ix] += dt;
        }
    }

    let total_time = frames.len() as f64 * dt;
    let area = g.cell_area();
    let scale = 1.0 / (n_agents as f64 * total_time * area);
    let mut sq_sum = 0.0;
    for (w, m) in dwell.iter().zip(mu.values()) {
        let e = m - w * scale;
        sq_sum += e * e * area;
    }
    Ok(sq_sum.sqrt())
}
