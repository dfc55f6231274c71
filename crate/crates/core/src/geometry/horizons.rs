use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::params::SpacetimeParams;
use crate::error::{Error, Result};

/// Real roots of `mu`, labelled `r0 < rC < re < rc` (or `rC < re` without a cosmological constant).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    /// Negative root, present only for `lambda > 0`.
    pub r0: Option<f64>,
    /// Cauchy (inner) horizon.
    pub r_inner: f64,
    /// Event horizon.
    pub r_e: f64,
    /// Cosmological horizon, present only for `lambda > 0`.
    pub r_c: Option<f64>,
}

impl RootSet {
    pub fn roots(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(4);
        v.extend(self.r0);
        v.push(self.r_inner);
        v.push(self.r_e);
        v.extend(self.r_c);
        v
    }
}

/// Default minimal root separation, relative to the parameter length scale.
pub const DEFAULT_ROOT_TOL: f64 = 1e-6;

/// Real horizon radii from the eigenvalues of the companion matrix of `mu`,
/// polished by two Newton steps.
///
/// Roots closer than `tol * scale` (real or complex) are reported as
/// degenerate; a wrong number of real roots means the parameters are not
/// subextremal.
pub fn find_horizons(p: &SpacetimeParams, tol: f64) -> Result<RootSet> {
    p.validate()?;
    let c = p.mu_coeffs();
    let deg = if p.lambda > 0.0 { 4 } else { 2 };
    let lead = c[deg];
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -c[i] / lead;
    }
    let eig = comp.complex_eigenvalues();
    let scale = p.scale();
    let sep_tol = tol * scale;
    let mut min_sep = f64::INFINITY;
    for i in 0..deg {
        for j in (i + 1)..deg {
            min_sep = min_sep.min((eig[i] - eig[j]).norm());
        }
    }
    if min_sep < sep_tol {
        return Err(Error::DegenerateRoots { separation: min_sep });
    }
    let mut real: Vec<f64> = eig
        .iter()
        .filter(|z| z.im.abs() <= 0.25 * sep_tol)
        .map(|z| {
            let mut r = z.re;
            for _ in 0..2 {
                let d = p.dmu(r);
                if d != 0.0 {
                    r -= p.mu(r) / d;
                }
            }
            r
        })
        .collect();
    real.sort_by(f64::total_cmp);
    if real.len() != deg {
        return Err(Error::NotSubextremal { found: real.len(), expected: deg });
    }
    let set = if deg == 4 {
        RootSet { r0: Some(real[0]), r_inner: real[1], r_e: real[2], r_c: Some(real[3]) }
    } else {
        RootSet { r0: None, r_inner: real[0], r_e: real[1], r_c: None }
    };
    if set.r_e <= 0.0 {
        return Err(Error::NotSubextremal { found: real.len(), expected: deg });
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kerr_closed_form() {
        let p = SpacetimeParams::new(0.6, 1.0, 0.0).unwrap();
        let h = find_horizons(&p, DEFAULT_ROOT_TOL).unwrap();
        assert!((h.r_e - 1.8).abs() < 1e-12);
        assert!((h.r_inner - 0.2).abs() < 1e-12);
        assert!(h.r0.is_none() && h.r_c.is_none());
    }

    #[test]
    fn schwarzschild() {
        let p = SpacetimeParams::new(0.0, 1.0, 0.0).unwrap();
        let h = find_horizons(&p, DEFAULT_ROOT_TOL).unwrap();
        assert!((h.r_e - 2.0).abs() < 1e-14);
        assert!(h.r_inner.abs() < 1e-14);
    }

    #[test]
    fn extremal_and_superextremal() {
        let p = SpacetimeParams::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(find_horizons(&p, DEFAULT_ROOT_TOL), Err(Error::DegenerateRoots { .. })));
        let p = SpacetimeParams::new(1.2, 1.0, 0.0).unwrap();
        assert!(matches!(find_horizons(&p, DEFAULT_ROOT_TOL), Err(Error::NotSubextremal { .. })));
        // Nariai-type coincidence of event and cosmological horizons.
        let p = SpacetimeParams::new(0.0, 1.0, 1.0 / 9.0).unwrap();
        assert!(matches!(find_horizons(&p, DEFAULT_ROOT_TOL), Err(Error::DegenerateRoots { .. })));
        let p = SpacetimeParams::new(0.0, 1.0, 0.2).unwrap();
        assert!(find_horizons(&p, DEFAULT_ROOT_TOL).is_err());
    }
}
