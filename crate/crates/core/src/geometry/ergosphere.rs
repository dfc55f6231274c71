//! Whether `mu(r) > a^2` somewhere between the event and cosmological horizons.
//!
//! Since `mu - a^2 = r (beta r - lambda r^3 / 3 - 2 m)` with `beta = 1 - lambda a^2 / 3`,
//! the region is non-empty exactly when `beta^3 > 9 m^2 lambda`.

use serde::{Deserialize, Serialize};

use super::horizons::{find_horizons, DEFAULT_ROOT_TOL};
use super::params::SpacetimeParams;
use crate::error::Result;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ErgoCheck {
    pub closed_form: bool,
    pub numeric: bool,
    /// Radius maximising `mu` on the searched interval, when one exists.
    pub r_max: Option<f64>,
    pub mu_max_minus_a2: Option<f64>,
}

pub fn ergoregion_closed_form(p: &SpacetimeParams) -> bool {
    let beta = 1.0 - p.alpha();
    p.lambda == 0.0 || (beta > 0.0 && beta.powi(3) > 9.0 * p.m * p.m * p.lambda)
}

/// Dense bracketing followed by golden-section refinement of `max mu` on `(r_e, r_c)`;
/// without a cosmological horizon the window `(r_e, r_e + 10 m)` is searched.
pub fn ergoregion_numeric(p: &SpacetimeParams) -> Result<(bool, Option<f64>, Option<f64>)> {
    p.validate()?;
    let h = match find_horizons(p, DEFAULT_ROOT_TOL) {
        Ok(h) => h,
        // No open interval between distinct horizons.
        Err(_) => return Ok((false, None, None)),
    };
    let lo = h.r_e;
    let hi = h.r_c.unwrap_or(h.r_e + 10.0 * p.m);
    let n = 400;
    let (mut best_i, mut best) = (1, f64::NEG_INFINITY);
    for i in 1..n {
        let r = lo + (hi - lo) * i as f64 / n as f64;
        let v = p.mu(r);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let step = (hi - lo) / n as f64;
    let (mut a, mut b) = (lo + step * (best_i as f64 - 1.0), lo + step * (best_i as f64 + 1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (p.mu(x1), p.mu(x2));
    for _ in 0..200 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = p.mu(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = p.mu(x2);
        }
        if b - a < 1e-14 * hi {
            break;
        }
    }
    let r_max = 0.5 * (a + b);
    let excess = p.mu(r_max).max(best) - p.a * p.a;
    Ok((excess > 0.0, Some(r_max), Some(excess)))
}

pub fn ergoregion_nonempty(p: &SpacetimeParams) -> Result<ErgoCheck> {
    let (numeric, r_max, mu_max_minus_a2) = ergoregion_numeric(p)?;
    Ok(ErgoCheck { closed_form: ergoregion_closed_form(p), numeric, r_max, mu_max_minus_a2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let p = SpacetimeParams::new(0.3, 1.0, 0.05).unwrap();
        let e = ergoregion_nonempty(&p).unwrap();
        assert!(e.closed_form && e.numeric);
        let p = SpacetimeParams::new(0.0, 1.0, 1.0 / 9.0).unwrap();
        let e = ergoregion_nonempty(&p).unwrap();
        assert!(!e.closed_form && !e.numeric);
        let p = SpacetimeParams::new(0.9, 1.0, 0.0).unwrap();
        assert!(ergoregion_nonempty(&p).unwrap().numeric);
    }
}
