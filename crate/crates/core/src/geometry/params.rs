use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rotation `a`, mass `m` and cosmological constant `lambda` of a Kerr(-de Sitter) spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeParams {
    pub a: f64,
    pub m: f64,
    pub lambda: f64,
}

impl SpacetimeParams {
    pub fn new(a: f64, m: f64, lambda: f64) -> Result<Self> {
        let p = SpacetimeParams { a, m, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.m.is_finite() && self.lambda.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if self.m <= 0.0 {
            return Err(Error::InvalidParams(format!("mass must be positive, got {}", self.m)));
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidParams(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        Ok(())
    }

    /// `alpha = lambda a^2 / 3`.
    pub fn alpha(&self) -> f64 {
        self.lambda * self.a * self.a / 3.0
    }

    /// `b = 1 + lambda a^2 / 3`.
    pub fn b(&self) -> f64 {
        1.0 + self.alpha()
    }

    /// `c = 1 + (lambda a^2 / 3) cos^2 theta`, as a function of `x = cos theta`.
    pub fn c_of_x(&self, x: f64) -> f64 {
        1.0 + self.alpha() * x * x
    }

    pub fn c(&self, theta: f64) -> f64 {
        self.c_of_x(theta.cos())
    }

    /// `mu(r) = (r^2 + a^2)(1 - lambda r^2 / 3) - 2 m r`.
    pub fn mu(&self, r: f64) -> f64 {
        let a2 = self.a * self.a;
        (r * r + a2) * (1.0 - self.lambda * r * r / 3.0) - 2.0 * self.m * r
    }

    pub fn dmu(&self, r: f64) -> f64 {
        let l3 = self.lambda / 3.0;
        -4.0 * l3 * r.powi(3) + 2.0 * (1.0 - self.alpha()) * r - 2.0 * self.m
    }

    pub fn ddmu(&self, r: f64) -> f64 {
        -4.0 * self.lambda * r * r + 2.0 * (1.0 - self.alpha())
    }

    /// Coefficients of `mu` in ascending powers of `r`.
    pub fn mu_coeffs(&self) -> [f64; 5] {
        let a2 = self.a * self.a;
        [a2, -2.0 * self.m, 1.0 - self.alpha(), 0.0, -self.lambda / 3.0]
    }

    pub fn rho2(&self, r: f64, theta: f64) -> f64 {
        let x = theta.cos();
        r * r + self.a * self.a * x * x
    }

    /// Length scale used to make tolerances relative.
    pub fn scale(&self) -> f64 {
        self.m.max(self.a.abs()).max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(SpacetimeParams::new(0.1, 0.0, 0.0).is_err());
        assert!(SpacetimeParams::new(0.1, 1.0, -0.1).is_err());
        assert!(SpacetimeParams::new(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn mu_matches_coefficients_and_derivative() {
        let p = SpacetimeParams::new(0.3, 1.0, 0.05).unwrap();
        let c = p.mu_coeffs();
        for &r in &[-3.0f64, 0.5, 2.2, 7.0] {
            let poly: f64 = c.iter().enumerate().map(|(k, ck)| ck * r.powi(k as i32)).sum();
            assert!((poly - p.mu(r)).abs() < 1e-12 * (1.0 + poly.abs()));
            let fd = crate::numerics::fd::d1(|s| p.mu(s), r, 1e-3);
            assert!((fd - p.dmu(r)).abs() < 1e-9);
        }
    }
}
