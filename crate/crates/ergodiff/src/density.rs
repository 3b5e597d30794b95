//! Target probability densities.
//!
//! A `TargetDensity` is a non-negative field of unit mass describing where
//! coverage effort should go. Three built-in families are provided: a
//! square surrounded by a concentric ring (hard indicator edges), a
//! Gaussian with a zero-density stripe cut through it (a forbidden band),
//! and a smooth bimodal Gaussian mixture. Arbitrary densities can be
//! loaded from grid-dump files.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid2D;
use crate::io;
use crate::vec2::Vec2;

use serde::{Deserialize, Serialize};
use std::path::Path;

/// Symmetric 2x2 covariance for Gaussian scenario components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covariance {
    pub sxx: f64,
    pub syy: f64,
    pub sxy: f64,
}

impl Covariance {
    pub fn isotropic(sigma: f64) -> Self {
        Covariance { sxx: sigma * sigma, syy: sigma * sigma, sxy: 0.0 }
    }

    fn det(&self) -> f64 {
        self.sxx * self.syy - self.sxy * self.sxy
    }

    fn validate(&self, key: &str) -> Result<()> {
        if !(self.sxx > 0.0) || !(self.det() > 0.0) {
            return Err(Error::config(key, "covariance must be positive-definite"));
        }
        Ok(())
    }

    /// Quadratic form `d^T C^{-1} d`.
    fn quad(&self, d: Vec2) -> f64 {
        (self.syy * d.x * d.x - 2.0 * self.sxy * d.x * d.y + self.sxx * d.y * d.y) / self.det()
    }
}

/// Direction the zero-density stripe runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StripeAxis {
    /// Stripe runs along x: density is zeroed in a band of y values.
    X,
    /// Stripe runs along y: density is zeroed in a band of x values.
    Y,
}

/// Non-negative density with unit mass over the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetDensity {
    field: ScalarField,
    descriptor: String,
}

/// Compensated sum, so renormalizing an already normalized field moves
/// each value by at most a few ulps regardless of grid size.
fn neumaier_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

impl TargetDensity {
    /// Normalize an arbitrary non-negative field into a density.
    pub fn from_field(field: ScalarField, descriptor: impl Into<String>) -> Result<Self> {
        if field.values().iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::config("density", "field has negative or non-finite values"));
        }
        let mass = neumaier_sum(field.values()) * field.grid().cell_area();
        if !(mass > 0.0) {
            return Err(Error::config("density", "field has zero total mass"));
        }
        let mut field = field;
        field.scale(1.0 / mass);
        Ok(TargetDensity { field, descriptor: descriptor.into() })
    }

    /// Uniform density on a central square plus a concentric ring, zero
    /// elsewhere. Both edges are sharp indicators.
    pub fn circle_square(
        grid: Grid2D,
        square_half_width: f64,
        ring_inner_radius: f64,
        ring_outer_radius: f64,
        center: Vec2,
    ) -> Result<Self> {
        if !(square_half_width > 0.0) || !(ring_inner_radius > 0.0) {
            return Err(Error::config("density", "geometry lengths must be positive"));
        }
        if ring_inner_radius >= ring_outer_radius {
            return Err(Error::config(
                "density",
                format!(
                    "ring inner radius {ring_inner_radius} must be below outer radius {ring_outer_radius}"
                ),
            ));
        }
        let reach = ring_outer_radius.max(square_half_width);
        let fits = center.x - reach >= 0.0
            && center.x + reach <= grid.lx()
            && center.y - reach >= 0.0
            && center.y + reach <= grid.ly();
        if !fits {
            return Err(Error::config("density", "circle-square geometry leaves the domain"));
        }
        let field = ScalarField::from_fn(grid, |x, y| {
            let d = Vec2::new(x - center.x, y - center.y);
            let in_square = d.x.abs().max(d.y.abs()) <= square_half_width;
            let r = d.norm();
            let in_ring = (ring_inner_radius..=ring_outer_radius).contains(&r);
            if in_square || in_ring {
                1.0
            } else {
                0.0
            }
        });
        TargetDensity::from_field(field, "circle_square")
    }

    /// Gaussian bump with a zero-density stripe cut through it.
    pub fn gaussian_stripe(
        grid: Grid2D,
        mean: Vec2,
        covariance: Covariance,
        stripe_axis: StripeAxis,
        stripe_half_width: f64,
    ) -> Result<Self> {
        covariance.validate("density")?;
        if !(stripe_half_width >= 0.0) {
            return Err(Error::config("density", "stripe half-width must be non-negative"));
        }
        let field = ScalarField::from_fn(grid, |x, y| {
            let banded = match stripe_axis {
                StripeAxis::X => (y - mean.y).abs() <= stripe_half_width,
                StripeAxis::Y => (x - mean.x).abs() <= stripe_half_width,
            };
            if banded {
                0.0
            } else {
                let d = Vec2::new(x - mean.x, y - mean.y);
                (-0.5 * covariance.quad(d)).exp()
            }
        });
        TargetDensity::from_field(field, "gaussian_stripe").map_err(|_| {
            Error::config("density", "stripe removes all density mass")
        })
    }

    /// Equal-weight mixture of two Gaussians, strictly positive.
    pub fn bimodal_gaussian(
        grid: Grid2D,
        means: [Vec2; 2],
        covariances: [Covariance; 2],
    ) -> Result<Self> {
        covariances[0].validate("density")?;
        covariances[1].validate("density")?;
        let field = ScalarField::from_fn(grid, |x, y| {
            let p = Vec2::new(x, y);
            let g0 = (-0.5 * covariances[0].quad(p - means[0])).exp();
            let g1 = (-0.5 * covariances[1].quad(p - means[1])).exp();
            0.5 * (g0 + g1)
        });
        TargetDensity::from_field(field, "bimodal_gaussian")
    }

    /// Read a density from a grid-dump file and renormalize it.
    pub fn load(path: &Path) -> Result<Self> {
        let field = io::read_field(path)?;
        TargetDensity::from_field(field, path.display().to_string())
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn grid(&self) -> &Grid2D {
        self.field.grid()
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid() -> Grid2D {
        Grid2D::unit(64, 64).unwrap()
    }

    fn center() -> Vec2 {
        Vec2::new(0.5, 0.5)
    }

    #[test]
    fn circle_square_support() {
        let mu = TargetDensity::circle_square(grid(), 0.1, 0.3, 0.35, center()).unwrap();
        // domain center sits in the square
        assert!(mu.field().at(31, 31) > 0.0);
        // far corner is outside both shapes
        assert_eq!(mu.field().at(1, 1), 0.0);
        // the gap between square and ring is empty: r = 0.2 on the diagonal
        let (ix, iy) = grid().cell_of(Vec2::new(0.5 + 0.2, 0.5));
        assert_eq!(mu.field().at(ix, iy), 0.0);
        assert_relative_eq!(mu.field().integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn circle_square_rejects_bad_geometry() {
        assert!(TargetDensity::circle_square(grid(), 0.1, 0.35, 0.3, center()).is_err());
        assert!(TargetDensity::circle_square(grid(), 0.1, 0.3, 0.35, Vec2::new(0.9, 0.5)).is_err());
    }

    #[test]
    fn stripe_zeroes_band_and_keeps_symmetry() {
        let mu = TargetDensity::gaussian_stripe(
            grid(),
            center(),
            Covariance::isotropic(0.15),
            StripeAxis::X,
            0.05,
        )
        .unwrap();
        // a point inside the band carries no density
        let (ix, iy) = grid().cell_of(Vec2::new(0.3, 0.51));
        assert_eq!(mu.field().at(ix, iy), 0.0);
        // mirror points about the mean, both outside the band, agree
        let a = mu.field().at(20, 10);
        let b = mu.field().at(43, 53);
        assert_relative_eq!(a, b, max_relative = 1e-12);
        assert_relative_eq!(mu.field().integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn stripe_covering_domain_errors() {
        let r = TargetDensity::gaussian_stripe(
            grid(),
            center(),
            Covariance::isotropic(0.15),
            StripeAxis::X,
            2.0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn bimodal_modes_and_symmetry() {
        let means = [Vec2::new(0.3, 0.3), Vec2::new(0.7, 0.7)];
        let cov = [Covariance::isotropic(0.15); 2];
        let mu = TargetDensity::bimodal_gaussian(grid(), means, cov).unwrap();
        let f = mu.field();
        // each mode center dominates its neighbors
        for m in means {
            let (ix, iy) = grid().cell_of(m);
            let v = f.at(ix, iy);
            assert!(v > f.at(ix + 3, iy));
            assert!(v > f.at(ix, iy + 3));
        }
        // point reflection through the domain center swaps the modes
        for iy in 0..8 {
            for ix in 0..64 {
                assert_relative_eq!(
                    f.at(ix, iy),
                    f.at(63 - ix, 63 - iy),
                    max_relative = 1e-12
                );
            }
        }
        assert!(f.min() > 0.0);
        assert_relative_eq!(f.integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bimodal_rejects_degenerate_covariance() {
        let bad = Covariance { sxx: 1.0, syy: 1.0, sxy: 1.0 };
        let means = [Vec2::new(0.3, 0.3), Vec2::new(0.7, 0.7)];
        assert!(TargetDensity::bimodal_gaussian(grid(), means, [bad, bad]).is_err());
    }

    #[test]
    fn from_field_contracts() {
        let g = Grid2D::unit(8, 8).unwrap();
        let mut f = ScalarField::constant(g, 1.0);
        *f.at_mut(2, 2) = -0.1;
        assert!(TargetDensity::from_field(f, "t").is_err());
        assert!(TargetDensity::from_field(ScalarField::zeros(g), "t").is_err());
    }

    #[test]
    fn normalization_is_idempotent() {
        let g = Grid2D::unit(8, 8).unwrap();
        let raw = ScalarField::from_fn(g, |x, y| 1.0 + x + y);
        let once = TargetDensity::from_field(raw, "t").unwrap();
        let twice = TargetDensity::from_field(once.field().clone(), "t").unwrap();
        for i in 0..g.n_cells() {
            assert_relative_eq!(
                once.field().values()[i],
                twice.field().values()[i],
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn load_round_trip_and_error_cases() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid2D::unit(8, 8).unwrap();
        let mu = TargetDensity::bimodal_gaussian(
            g,
            [Vec2::new(0.3, 0.3), Vec2::new(0.7, 0.7)],
            [Covariance::isotropic(0.15); 2],
        )
        .unwrap();

        let path = dir.path().join("mu.fld");
        io::write_field(&path, mu.field()).unwrap();
        let back = TargetDensity::load(&path).unwrap();
        for i in 0..g.n_cells() {
            assert_relative_eq!(
                back.field().values()[i],
                mu.field().values()[i],
                max_relative = 1e-15
            );
        }

        let mut bad = ScalarField::constant(g, 1.0);
        *bad.at_mut(0, 0) = -1.0;
        let bad_path = dir.path().join("bad.fld");
        io::write_field(&bad_path, &bad).unwrap();
        assert!(TargetDensity::load(&bad_path).is_err());

        let zero_path = dir.path().join("zero.fld");
        io::write_field(&zero_path, &ScalarField::zeros(g)).unwrap();
        assert!(TargetDensity::load(&zero_path).is_err());
    }

    proptest! {
        #[test]
        fn constructors_always_yield_unit_mass(
            hw in 0.02_f64..0.15,
            inner in 0.2_f64..0.3,
            gap in 0.02_f64..0.1,
            sigma in 0.05_f64..0.3,
            stripe in 0.0_f64..0.2,
        ) {
            let g = Grid2D::unit(32, 32).unwrap();
            let cs = TargetDensity::circle_square(g, hw, inner, inner + gap, Vec2::new(0.5, 0.5));
            if inner + gap <= 0.5 {
                let cs = cs.unwrap();
                prop_assert!(cs.field().min() >= 0.0);
                prop_assert!((cs.field().integral() - 1.0).abs() < 1e-12);
            }
            let gs = TargetDensity::gaussian_stripe(
                g, Vec2::new(0.5, 0.5), Covariance::isotropic(sigma), StripeAxis::Y, stripe,
            ).unwrap();
            prop_assert!(gs.field().min() >= 0.0);
            prop_assert!((gs.field().integral() - 1.0).abs() < 1e-12);
            let bi = TargetDensity::bimodal_gaussian(
                g,
                [Vec2::new(0.3, 0.3), Vec2::new(0.7, 0.7)],
                [Covariance::isotropic(sigma); 2],
            ).unwrap();
            prop_assert!(bi.field().min() > 0.0);
            prop_assert!((bi.field().integral() - 1.0).abs() < 1e-12);
        }
    }
}
