use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::charts::{Chart, ChartPoint, Horizon};
use crate::geometry::metric::metric;
use crate::geometry::Spacetime;
use crate::gnc::normal_form::psi;

/// Point of the cotangent bundle of the quotient `(x1, x2, x3)` of a horizon-adapted chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotangentPoint {
    pub horizon: Horizon,
    pub x: [f64; 3],
    pub xi: [f64; 3],
}

impl CotangentPoint {
    pub fn new(horizon: Horizon, x: [f64; 3], xi: [f64; 3]) -> Self {
        CotangentPoint { horizon, x, xi }
    }

    /// Point of the conormal bundle `N*{x1 = 0}` over `(x2, x3)`.
    pub fn conormal(horizon: Horizon, x2: f64, x3: f64, xi1: f64) -> Self {
        CotangentPoint { horizon, x: [0.0, x2, x3], xi: [xi1, 0.0, 0.0] }
    }
}

/// Quotient block `g^{ij} / psi`, `i, j in {1, 2, 3}`, of the rescaled inverse metric.
pub fn quotient_inverse(st: &Spacetime, h: Horizon, x: &[f64; 3]) -> Result<Matrix3<f64>> {
    let m = metric(st, &ChartPoint::new(Chart::Gnc(h), [0.0, x[0], x[1], x[2]]))?;
    let ps = psi(st, h, x[2])?;
    Ok(Matrix3::from_fn(|i, j| m.g_inv[(i + 1, j + 1)] / ps))
}

pub fn principal_symbol(st: &Spacetime, pt: &CotangentPoint) -> Result<f64> {
    let g = quotient_inverse(st, pt.horizon, &pt.x)?;
    let mut p = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            p += g[(i, j)] * pt.xi[i] * pt.xi[j];
        }
    }
    Ok(p)
}

/// Default relative step for symbol derivatives.
pub const DEFAULT_SYMBOL_STEP: f64 = 1e-3;
const MIN_SYMBOL_STEP: f64 = 1e-8;

/// `H_p = (d_xi p, -d_x p)` by five-point central differences of [`principal_symbol`].
pub fn hamiltonian_field(st: &Spacetime, pt: &CotangentPoint, h_rel: f64) -> Result<[f64; 6]> {
    if !(h_rel >= MIN_SYMBOL_STEP) {
        return Err(Error::StepUnderflow { step: h_rel, floor: MIN_SYMBOL_STEP });
    }
    let mut out = [0.0; 6];
    for k in 0..6 {
        let base = if k < 3 { pt.xi[k] } else { pt.x[k - 3] };
        let h = h_rel * base.abs().max(1.0);
        let eval = |d: f64| -> Result<f64> {
            let mut q = *pt;
            if k < 3 {
                q.xi[k] += d;
            } else {
                q.x[k - 3] += d;
            }
            principal_symbol(st, &q)
        };
        let v = (eval(-2.0 * h)? - 8.0 * eval(-h)? + 8.0 * eval(h)? - eval(2.0 * h)?) / (12.0 * h);
        out[k] = if k < 3 { v } else { -v };
    }
    // Order as (x-dot, xi-dot).
    Ok([out[0], out[1], out[2], out[3], out[4], out[5]])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConormalReport {
    pub horizon: Horizon,
    pub points: usize,
    /// Largest `|p(x, (xi1, 0, 0))| / xi1^2` over the grid.
    pub max_conormal_symbol: f64,
    /// Smallest eigenvalue of the angular block of `p` over the grid.
    pub min_angular_constant: f64,
    pub violations: usize,
}

/// Checks `{p = 0} ∩ {x1 = 0} = N*{x1 = 0}` on an `n2 x n3` grid of horizon points.
pub fn conormal_check(st: &Spacetime, h: Horizon, n2: usize, n3: usize, tol: f64) -> Result<ConormalReport> {
    let mut max_con = 0.0f64;
    let mut min_c = f64::INFINITY;
    let mut violations = 0;
    let mut witness = None;
    for i in 0..n2 {
        let x2 = 2.0 * std::f64::consts::PI * i as f64 / n2 as f64;
        for j in 0..n3 {
            let x3 = std::f64::consts::PI * (j as f64 + 0.5) / n3 as f64;
            let g = quotient_inverse(st, h, &[0.0, x2, x3])?;
            for xi1 in [1.0, -1.0, 2.5] {
                let p = principal_symbol(st, &CotangentPoint::conormal(h, x2, x3, xi1))?;
                let v = (p / (xi1 * xi1)).abs();
                max_con = max_con.max(v);
                if v > tol {
                    violations += 1;
                    witness.get_or_insert((x2, x3, p));
                }
            }
            let block = Matrix2::new(g[(1, 1)], g[(1, 2)], g[(2, 1)], g[(2, 2)]);
            let ev = block.symmetric_eigenvalues();
            let c = ev[0].min(ev[1]);
            min_c = min_c.min(c);
            if c <= 0.0 {
                violations += 1;
                witness.get_or_insert((x2, x3, c));
            }
        }
    }
    if let Some((_, _, v)) = witness {
        return Err(Error::CharSetViolation { value: v });
    }
    Ok(ConormalReport {
        horizon: h,
        points: n2 * n3,
        max_conormal_symbol: max_con,
        min_angular_constant: min_c,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// `|xi1|` grows along the flow on `xi1 > 0` and the conormal bundle attracts.
    Sink,
    /// `|xi1|` decays along the flow on `xi1 > 0` and the conormal bundle repels.
    Source,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialSample {
    pub x2: f64,
    pub x3: f64,
    pub xi1: f64,
    pub p: f64,
    pub dp_norm: f64,
    pub hp: [f64; 6],
    /// `H_p` component along `d_xi1` divided by `xi1^2`.
    pub rate: f64,
    pub rel_error: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialPointReport {
    pub horizon: Horizon,
    /// `-d_x1(psi g00) / 2` at `x1 = 0`, the expected rate being `-2 kappa_chart`.
    pub kappa_chart: f64,
    pub samples: Vec<RadialSample>,
    pub max_rel_error: f64,
    pub max_base_component: f64,
    pub max_angular_fiber_component: f64,
    pub classification: Classification,
}

/// Radial-point check at `n` conormal samples with `xi1` alternating in sign.
pub fn radial_point_check(st: &Spacetime, h: Horizon, n: usize, kappa_chart: f64, tol: f64) -> Result<RadialPointReport> {
    let mut samples = Vec::with_capacity(n);
    let (mut max_rel, mut max_base, mut max_ang) = (0.0f64, 0.0f64, 0.0f64);
    let expected = -2.0 * kappa_chart;
    for s in 0..n {
        let x2 = 2.0 * std::f64::consts::PI * crate::numerics::halton::radical_inverse(s as u64 + 1, 2);
        let x3 = std::f64::consts::PI * (0.05 + 0.9 * crate::numerics::halton::radical_inverse(s as u64 + 1, 3));
        let xi1 = if s % 2 == 0 { 1.0 } else { -1.0 };
        let pt = CotangentPoint::conormal(h, x2, x3, xi1);
        let p = principal_symbol(st, &pt)?;
        let hp = hamiltonian_field(st, &pt, DEFAULT_SYMBOL_STEP)?;
        let dp_norm = hp.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rate = hp[3] / (xi1 * xi1);
        let rel = (rate - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        let base = hp[0].abs().max(hp[1].abs()).max(hp[2].abs());
        let ang = hp[4].abs().max(hp[5].abs());
        max_rel = max_rel.max(rel);
        max_base = max_base.max(base);
        max_ang = max_ang.max(ang);
        let classification = if rate > 0.0 { Classification::Sink } else { Classification::Source };
        samples.push(RadialSample { x2, x3, xi1, p, dp_norm, hp, rate, rel_error: rel, classification });
    }
    let classification = samples.first().map(|s| s.classification).unwrap_or(Classification::Sink);
    let consistent = samples.iter().all(|s| s.classification == classification);
    let worst = max_base.max(max_ang) / expected.abs().max(1.0);
    if worst > tol || !consistent || samples.iter().any(|s| s.dp_norm == 0.0) {
        return Err(Error::NotRadial { deviation: worst });
    }
    Ok(RadialPointReport {
        horizon: h,
        kappa_chart,
        samples,
        max_rel_error: max_rel,
        max_base_component: max_base,
        max_angular_fiber_component: max_ang,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_vanishes_on_conormal_and_at_zero() {
        let st = Spacetime::from_values(0.3, 1.0, 0.05).unwrap();
        let pt = CotangentPoint::new(Horizon::Event, [0.0, 0.3, 1.0], [0.0; 3]);
        assert_eq!(principal_symbol(&st, &pt).unwrap(), 0.0);
        let pt = CotangentPoint::conormal(Horizon::Event, 0.3, 1.0, 1.0);
        assert!(principal_symbol(&st, &pt).unwrap().abs() < 1e-15);
    }

    #[test]
    fn angular_entry_matches_full_inversion() {
        let st = Spacetime::from_values(0.3, 1.0, 0.05).unwrap();
        let (x2, x3) = (0.4, 1.0);
        let pt = CotangentPoint::new(Horizon::Event, [0.0, x2, x3], [0.0, 1.0, 0.0]);
        let p = principal_symbol(&st, &pt).unwrap();
        let g = metric(&st, &ChartPoint::new(Chart::Gnc(Horizon::Event), [0.0, 0.0, x2, x3])).unwrap().g;
        let lu = nalgebra::DMatrix::from_fn(4, 4, |i, j| g[(i, j)]).lu();
        let inv = lu.try_inverse().unwrap();
        let expect = inv[(2, 2)] / psi(&st, Horizon::Event, x3).unwrap();
        assert!(p > 0.0);
        assert!((p - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn schwarzschild_field_at_conormal_point() {
        let st = Spacetime::from_values(0.0, 1.0, 0.0).unwrap();
        let pt = CotangentPoint::conormal(Horizon::Event, 0.0, 1.0, 1.0);
        let hp = hamiltonian_field(&st, &pt, DEFAULT_SYMBOL_STEP).unwrap();
        let expect = [0.0, 0.0, 0.0, 0.5, 0.0, 0.0];
        for (a, b) in hp.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9, "{hp:?}");
        }
        let zero = CotangentPoint::new(Horizon::Event, [0.1, 0.0, 1.0], [0.0; 3]);
        assert!(hamiltonian_field(&st, &zero, DEFAULT_SYMBOL_STEP).unwrap().iter().all(|v| v.abs() < 1e-14));
        assert!(matches!(hamiltonian_field(&st, &pt, 1e-12), Err(Error::StepUnderflow { .. })));
    }

    #[test]
    fn schwarzschild_angular_constant() {
        let st = Spacetime::from_values(0.0, 1.0, 0.0).unwrap();
        let rep = conormal_check(&st, Horizon::Event, 8, 8, 1e-14).unwrap();
        assert!((rep.min_angular_constant - 0.25).abs() < 1e-12);
        assert_eq!(rep.violations, 0);
    }
}
