//! Coverage bookkeeping: the empirical trajectory measure, the signed
//! coverage-error field, and the global ergodicity metric.
//!
//! Agents deposit dwell time into the cell nearest their position (a
//! point footprint, no spreading kernel). Dividing the tallies by
//! `N * t * cell_area` yields an empirical density `c` of unit mass. The
//! error field is the deficit `e = mu - c`, positive where coverage is
//! still owed, so that ascending a smoothed version of `e` moves agents
//! toward neglected regions. Its L2 norm `E(t)` is the scalar coverage
//! metric; `E` is not monotone in time and is never asserted to be.

use crate::density::TargetDensity;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid2D;
use crate::vec2::Vec2;

/// Per-cell dwell-time tallies for one run.
#[derive(Debug, Clone)]
pub struct CoverageAccumulator {
    grid: Grid2D,
    n_agents: usize,
    visit_time: Vec<f64>,
    total_time: f64,
}

impl CoverageAccumulator {
    pub fn new(grid: Grid2D, n_agents: usize) -> Self {
        assert!(n_agents >= 1, "need at least one agent");
        CoverageAccumulator {
            grid,
            n_agents,
            visit_time: vec![0.0; grid.n_cells()],
            total_time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn visit_time(&self) -> &[f64] {
        &self.visit_time
    }

    /// Add `dt` of dwell to the cell under each agent and advance time.
    pub fn deposit(&mut self, positions: &[Vec2], dt: f64) -> Result<()> {
        if positions.len() != self.n_agents {
            return Err(Error::invalid(format!(
                "deposit got {} positions for {} agents",
                positions.len(),
                self.n_agents
            )));
        }
        if !(dt > 0.0) {
            return Err(Error::invalid(format!("deposit dt {dt} must be positive")));
        }
        for (i, &p) in positions.iter().enumerate() {
            if !self.grid.contains(p) {
                return Err(Error::invalid(format!(
                    "agent {i} at ({}, {}) is outside the domain",
                    p.x, p.y
                )));
            }
            let (ix, iy) = self.grid.cell_of(p);
            self.visit_time[self.grid.idx(ix, iy)] += dt;
        }
        self.total_time += dt;
        Ok(())
    }

    /// Empirical density `c = visit_time / (N * t * cell_area)`.
    pub fn empirical_density(&self) -> Result<ScalarField> {
        if !(self.total_time > 0.0) {
            return Err(Error::invalid("empirical density requested before any deposit"));
        }
        let scale = 1.0 / (self.n_agents as f64 * self.total_time * self.grid.cell_area());
        let values = self.visit_time.iter().map(|v| v * scale).collect();
        ScalarField::from_values(self.grid, values)
    }
}

/// Signed coverage deficit `mu - c`.
#[derive(Debug, Clone)]
pub struct ErrorField {
    field: ScalarField,
}

impl ErrorField {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn into_field(self) -> ScalarField {
        self.field
    }

    /// Global metric `E = sqrt(sum e^2 * cell_area)`.
    pub fn global_error(&self) -> f64 {
        self.field.l2_norm()
    }
}

/// Pointwise deficit of the empirical density against the target.
pub fn error_field(c: &ScalarField, mu: &TargetDensity) -> Result<ErrorField> {
    c.ensure_same_grid(mu.field(), "error field needs c and mu on one grid")?;
    let values = mu
        .field()
        .values()
        .iter()
        .zip(c.values())
        .map(|(m, cv)| m - cv)
        .collect();
    Ok(ErrorField { field: ScalarField::from_values(*c.grid(), values)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Covariance;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid() -> Grid2D {
        Grid2D::unit(8, 8).unwrap()
    }

    #[test]
    fn single_deposit_lands_in_one_cell() {
        let mut acc = CoverageAccumulator::new(grid(), 1);
        acc.deposit(&[Vec2::new(0.3, 0.7)], 0.05).unwrap();
        let (ix, iy) = grid().cell_of(Vec2::new(0.3, 0.7));
        for iyy in 0..8 {
            for ixx in 0..8 {
                let want = if (ixx, iyy) == (ix, iy) { 0.05 } else { 0.0 };
                assert_eq!(acc.visit_time()[grid().idx(ixx, iyy)], want);
            }
        }
        assert_eq!(acc.total_time(), 0.05);
    }

    #[test]
    fn dwell_bookkeeping_over_long_run() {
        // ten agents, a thousand steps of 0.05 each: 500 agent-seconds
        let mut acc = CoverageAccumulator::new(grid(), 10);
        let positions: Vec<Vec2> =
            (0..10).map(|i| Vec2::new(0.05 + 0.09 * i as f64, 0.5)).collect();
        for _ in 0..1000 {
            acc.deposit(&positions, 0.05).unwrap();
        }
        let total: f64 = acc.visit_time().iter().sum();
        assert_relative_eq!(total, 500.0, max_relative = 1e-9);
        assert_relative_eq!(acc.total_time(), 50.0, max_relative = 1e-12);
    }

    #[test]
    fn boundary_deposit_uses_lower_cell() {
        let mut acc = CoverageAccumulator::new(grid(), 1);
        let h = grid().dx();
        acc.deposit(&[Vec2::new(3.0 * h, 0.5)], 1.0).unwrap();
        let iy = grid().cell_of(Vec2::new(0.0, 0.5)).1;
        assert_eq!(acc.visit_time()[grid().idx(2, iy)], 1.0);
        assert_eq!(acc.visit_time()[grid().idx(3, iy)], 0.0);
    }

    #[test]
    fn deposit_contract_violations() {
        let mut acc = CoverageAccumulator::new(grid(), 2);
        let inside = Vec2::new(0.5, 0.5);
        assert!(acc.deposit(&[inside], 0.05).is_err());
        assert!(acc.deposit(&[inside, Vec2::new(-0.1, 0.5)], 0.05).is_err());
        assert!(acc.deposit(&[inside, inside], 0.0).is_err());
    }

    #[test]
    fn parked_agent_density_is_point_mass() {
        let mut acc = CoverageAccumulator::new(grid(), 1);
        let p = Vec2::new(0.3, 0.7);
        for _ in 0..7 {
            acc.deposit(&[p], 0.05).unwrap();
        }
        let c = acc.empirical_density().unwrap();
        let (ix, iy) = grid().cell_of(p);
        assert_relative_eq!(c.at(ix, iy), 1.0 / grid().cell_area(), max_relative = 1e-12);
        assert_relative_eq!(c.integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn equal_dwell_everywhere_gives_uniform_density() {
        let g = grid();
        let mut acc = CoverageAccumulator::new(g, 1);
        for iy in 0..g.ny() {
            for ix in 0..g.nx() {
                acc.deposit(&[g.cell_center(ix, iy)], 0.05).unwrap();
            }
        }
        let c = acc.empirical_density().unwrap();
        for &v in c.values() {
            assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn density_before_any_deposit_errors() {
        let acc = CoverageAccumulator::new(grid(), 1);
        assert!(acc.empirical_density().is_err());
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
    fn perfect_coverage_has_zero_error() {
        let mu = bimodal();
        let e = error_field(mu.field(), &mu).unwrap();
        assert_eq!(e.global_error(), 0.0);
        assert!(e.field().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fresh_coverage_error_tracks_target_away_from_agents() {
        let mu = bimodal();
        let mut acc = CoverageAccumulator::new(grid(), 1);
        acc.deposit(&[Vec2::new(0.1, 0.1)], 0.05).unwrap();
        let e = error_field(&acc.empirical_density().unwrap(), &mu).unwrap();
        let occupied = grid().cell_of(Vec2::new(0.1, 0.1));
        for iy in 0..8 {
            for ix in 0..8 {
                if (ix, iy) != occupied {
                    assert_relative_eq!(e.field().at(ix, iy), mu.field().at(ix, iy));
                }
            }
        }
        assert!(e.field().at(occupied.0, occupied.1) < 0.0);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let mu = bimodal();
        let c = ScalarField::constant(Grid2D::unit(16, 16).unwrap(), 1.0);
        assert!(error_field(&c, &mu).is_err());
    }

    #[test]
    fn global_error_of_unit_field_is_one() {
        let e = ErrorField { field: ScalarField::constant(grid(), 1.0) };
        assert_relative_eq!(e.global_error(), 1.0, epsilon = 1e-14);
        let z = ErrorField { field: ScalarField::zeros(grid()) };
        assert_eq!(z.global_error(), 0.0);
    }

    #[test]
    fn global_error_refines_at_second_order() {
        // e = (x - 1/2)^2 - 1/12 is zero-mean with continuum norm
        // sqrt(1/180); midpoint sampling converges at O(h^2)
        let exact = (1.0_f64 / 180.0).sqrt();
        let f = |x: f64, _y: f64| (x - 0.5) * (x - 0.5) - 1.0 / 12.0;
        let coarse = ErrorField { field: ScalarField::from_fn(Grid2D::unit(32, 32).unwrap(), f) };
        let fine = ErrorField { field: ScalarField::from_fn(Grid2D::unit(64, 64).unwrap(), f) };
        let ec = (coarse.global_error() - exact).abs();
        let ef = (fine.global_error() - exact).abs();
        assert!(ef < 0.3 * ec, "quadratic shrink expected: {ec} -> {ef}");
    }

    proptest! {
        #[test]
        fn deposits_conserve_dwell_time(
            seeds in prop::collection::vec((0.0_f64..1.0, 0.0_f64..1.0), 1..40),
            dt in 0.01_f64..0.5,
        ) {
            let mut acc = CoverageAccumulator::new(grid(), 3);
            let agents = [Vec2::new(0.1, 0.2), Vec2::new(0.5, 0.6), Vec2::new(0.9, 0.3)];
            let mut steps = 0;
            for (sx, sy) in &seeds {
                let shifted: Vec<Vec2> = agents
                    .iter()
                    .map(|a| Vec2::new((a.x + sx) % 1.0, (a.y + sy) % 1.0))
                    .collect();
                acc.deposit(&shifted, dt).unwrap();
                steps += 1;
            }
            let total: f64 = acc.visit_time().iter().sum();
            let want = 3.0 * steps as f64 * dt;
            prop_assert!((total - want).abs() <= 1e-9 * want);
            let c = acc.empirical_density().unwrap();
            prop_assert!((c.integral() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn error_field_is_zero_mean(
            raw in prop::collection::vec(0.0_f64..1.0, 64),
            dwell in prop::collection::vec((0usize..64, 0.01_f64..1.0), 1..30),
        ) {
            let g = grid();
            // any positive field normalizes into a target density
            let mut f = ScalarField::from_values(g, raw).unwrap();
            for v in f.values_mut() {
                *v += 0.1;
            }
            let mu = TargetDensity::from_field(f, "random").unwrap();
            let mut acc = CoverageAccumulator::new(g, 1);
            for (cell, dt) in dwell {
                let p = g.cell_center(cell % 8, cell / 8);
                acc.deposit(&[p], dt).unwrap();
            }
            let e = error_field(&acc.empirical_density().unwrap(), &mu).unwrap();
            prop_assert!(e.field().mean().abs() < 1e-9);
        }

        #[test]
        fn global_error_scales_homogeneously(
            raw in prop::collection::vec(-1.0_f64..1.0, 64),
            a in -3.0_f64..3.0,
        ) {
            let f = ScalarField::from_values(grid(), raw).unwrap();
            let mut scaled = f.clone();
            scaled.scale(a);
            let e1 = ErrorField { field: f }.global_error();
            let e2 = ErrorField { field: scaled }.global_error();
            prop_assert!((e2 - a.abs() * e1).abs() < 1e-12 + 1e-12 * e2.abs());
        }
    }
}
