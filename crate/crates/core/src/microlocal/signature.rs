use serde::{Deserialize, Serialize};

use crate::geometry::params::SpacetimeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    Elliptic,
    Lorentzian,
    Degenerate,
}

/// Class of the `(r, theta)` principal part `mu xi_r^2 + c xi_theta^2`; `c > 0`, so `mu` decides.
pub fn symbol_signature(p: &SpacetimeParams, r: f64, _theta: f64) -> Signature {
    let mu = p.mu(r);
    let tol = 1e-12 * p.scale().powi(2).max(r * r);
    if mu > tol {
        Signature::Elliptic
    } else if mu < -tol {
        Signature::Lorentzian
    } else {
        Signature::Degenerate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Spacetime;

    #[test]
    fn classes_around_the_event_horizon() {
        let st = Spacetime::from_values(0.3, 1.0, 0.05).unwrap();
        let (re, rc) = (st.r_e(), st.r_c().unwrap());
        assert_eq!(symbol_signature(&st.params, 0.5 * (re + rc), 1.0), Signature::Elliptic);
        assert_eq!(symbol_signature(&st.params, re, 1.0), Signature::Degenerate);
        assert_eq!(symbol_signature(&st.params, re - 0.05, 1.0), Signature::Lorentzian);
        assert_eq!(symbol_signature(&st.params, rc + 0.05, 1.0), Signature::Lorentzian);
    }
}
