//! Kerr(-de Sitter) geometry: parameters, horizons, charts, metrics and curvature.

pub mod charts;
pub mod curvature;
pub mod ergosphere;
pub mod horizons;
pub mod metric;
pub mod opspec;
pub mod params;
pub mod surface_gravity;

pub use charts::{chart_map, Chart, ChartPoint, Horizon};
pub use horizons::{find_horizons, RootSet, DEFAULT_ROOT_TOL};
pub use metric::{dual_metric_bl, metric, metric_bl, metric_extended, MetricEval};
pub use params::SpacetimeParams;

use crate::error::{Error, Result};

/// Parameters together with their horizon radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spacetime {
    pub params: SpacetimeParams,
    pub horizons: RootSet,
}

impl Spacetime {
    pub fn new(params: SpacetimeParams) -> Result<Self> {
        let horizons = find_horizons(&params, DEFAULT_ROOT_TOL)?;
        Ok(Spacetime { params, horizons })
    }

    pub fn from_values(a: f64, m: f64, lambda: f64) -> Result<Self> {
        Spacetime::new(SpacetimeParams::new(a, m, lambda)?)
    }

    pub fn has_cosmological_horizon(&self) -> bool {
        self.horizons.r_c.is_some()
    }

    pub fn r_e(&self) -> f64 {
        self.horizons.r_e
    }

    pub fn r_c(&self) -> Result<f64> {
        self.horizons.r_c.ok_or(Error::LambdaZeroUnsupported)
    }

    pub fn horizon_radius(&self, h: Horizon) -> Result<f64> {
        match h {
            Horizon::Event => Ok(self.horizons.r_e),
            Horizon::Cosmological => self.r_c(),
        }
    }

    /// Angular velocity `a / (r_h^2 + a^2)` of a horizon.
    pub fn omega(&self, h: Horizon) -> Result<f64> {
        let r = self.horizon_radius(h)?;
        let a = self.params.a;
        Ok(a / (r * r + a * a))
    }

    /// Radius at which the time and angle offsets of all charts vanish.
    pub fn r_mid(&self) -> f64 {
        match self.horizons.r_c {
            Some(rc) => 0.5 * (self.horizons.r_e + rc),
            None => 2.0 * self.horizons.r_e,
        }
    }

    /// Slope `s(r)` of the star time function: `-1` at the event horizon, `+1` at the
    /// cosmological horizon, affine in between. Identically `-1` without a cosmological horizon.
    pub fn star_slope(&self, r: f64) -> f64 {
        match self.horizons.r_c {
            Some(rc) => 2.0 * (r - self.horizons.r_e) / (rc - self.horizons.r_e) - 1.0,
            None => -1.0,
        }
    }

    /// `ds/dr` of the star slope.
    pub fn star_slope_deriv(&self) -> f64 {
        match self.horizons.r_c {
            Some(rc) => 2.0 / (rc - self.horizons.r_e),
            None => 0.0,
        }
    }

    /// `(1 - s^2) / mu` for the star slope, in a factored form that is analytic across both horizons.
    pub fn star_f(&self, r: f64) -> f64 {
        match (self.horizons.r0, self.horizons.r_c) {
            (Some(r0), Some(rc)) => {
                let w = rc - self.horizons.r_e;
                12.0 / (self.params.lambda * w * w * (r - r0) * (r - self.horizons.r_inner))
            }
            _ => 0.0,
        }
    }

    /// `d/dr` of [`Spacetime::star_f`].
    pub fn star_f_deriv(&self, r: f64) -> f64 {
        match self.horizons.r0 {
            Some(r0) => {
                let rin = self.horizons.r_inner;
                -self.star_f(r) * (1.0 / (r - r0) + 1.0 / (r - rin))
            }
            None => 0.0,
        }
    }
}
