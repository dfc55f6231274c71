//! Normal form of `psi g` on a horizon in the horizon-adapted chart.
//!
//! In the chart `x = (t~, r_h - r, phi~ - omega t~, theta)` the rescaled metric
//! `psi g` satisfies, at `x1 = 0`: `g00 = g02 = g03 = g11 = g13 = g23 = 0` and
//! `|g01| = 1`. The shift `g12 = s_h a sin^2(theta) (r_h^2 + a^2) / rho_h^2`
//! survives when `a != 0`; replacing `d_x1` by the null transversal
//! `L = d_x1 + h d_x0 - f d_x2` with `f = g12 / g22` and `h = f g12 / (2 g01)`
//! removes it without changing `g01` or the Killing derivative of `g00`.

use nalgebra::{Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::charts::{Chart, ChartPoint, Horizon};
use crate::geometry::metric::metric;
use crate::geometry::Spacetime;
use crate::numerics::fd;

/// `psi = b (r_h^2 + a^2) / (r_h^2 + a^2 cos^2 theta)`.
pub fn psi(st: &Spacetime, h: Horizon, theta: f64) -> Result<f64> {
    let r = st.horizon_radius(h)?;
    let p = &st.params;
    let x = theta.cos();
    Ok(p.b() * (r * r + p.a * p.a) / (r * r + p.a * p.a * x * x))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalFormSample {
    pub theta: f64,
    pub psi: f64,
    /// `psi g` at `x1 = 0` in the horizon-adapted chart.
    pub psi_g: [[f64; 4]; 4],
    /// `psi g` at `x1 = 0` after replacing `d_x1` by the null transversal.
    pub psi_g_adapted: [[f64; 4]; 4],
    /// `d_x1 (psi g00)` at `x1 = 0`.
    pub d1_psi_g00: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalFormReport {
    pub horizon: Horizon,
    pub r_h: f64,
    pub omega: f64,
    pub samples: Vec<NormalFormSample>,
    /// Sign of `psi g01`: `+1` at the event horizon, `-1` at the cosmological horizon.
    pub g01_sign: f64,
    /// Largest of `|g00|, |g02|, |g03|, |g11|, |g13|, |g23|, ||g01| - 1|` in the adapted chart.
    pub max_violation: f64,
    /// Largest `|psi g12|` in the adapted chart (zero only for `a = 0`).
    pub max_shift: f64,
    /// Largest deviation of `psi g12` from its closed form.
    pub shift_closed_form_error: f64,
    /// Largest violation, including `g12`, after the null-transversal correction.
    pub max_violation_null_adapted: f64,
    /// Smallest eigenvalue of the angular block `(psi g)_{ij}`, `i, j in {2, 3}`.
    pub lower_block_min_eig: f64,
    /// `-d_x1(psi g00) / 2`, averaged over the samples.
    pub kappa_chart: f64,
    pub kappa_chart_spread: f64,
}

fn to_array(m: &Matrix4<f64>) -> [[f64; 4]; 4] {
    let mut a = [[0.0; 4]; 4];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    a
}

fn required_violation(g: &Matrix4<f64>) -> f64 {
    [g[(0, 0)], g[(0, 2)], g[(0, 3)], g[(1, 1)], g[(1, 3)], g[(2, 3)], g[(0, 1)].abs() - 1.0]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Null-transversal change of frame at `x1 = 0`.
pub fn null_adapted_frame(g: &Matrix4<f64>) -> Matrix4<f64> {
    let f = g[(1, 2)] / g[(2, 2)];
    let h = f * g[(1, 2)] / (2.0 * g[(0, 1)]);
    let mut a = Matrix4::identity();
    a[(0, 1)] = h;
    a[(2, 1)] = -f;
    a
}

/// Evaluates the rescaled metric at `x1 = 0` for each `theta` and checks the normal form to `tol`.
pub fn normal_form_check(st: &Spacetime, h: Horizon, thetas: &[f64], tol: f64) -> Result<NormalFormReport> {
    let r_h = st.horizon_radius(h)?;
    let omega = st.omega(h)?;
    let s_h = match h {
        Horizon::Event => -1.0,
        Horizon::Cosmological => 1.0,
    };
    let a = st.params.a;
    let mut samples = Vec::with_capacity(thetas.len());
    let (mut viol, mut shift, mut shift_err, mut viol_null) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut min_eig = f64::INFINITY;
    let mut kappas = Vec::new();
    let mut sign = 0.0;
    for &th in thetas {
        let ps = psi(st, h, th)?;
        let at = |x1: f64| -> Result<Matrix4<f64>> {
            Ok(metric(st, &ChartPoint::new(Chart::Gnc(h), [0.0, x1, 0.0, th]))?.g * ps)
        };
        let g = at(0.0)?;
        let step = 1e-3 * r_h.max(1.0);
        let mut err = None;
        let d1 = fd::d1(
            |x1| match at(x1) {
                Ok(m) => m[(0, 0)],
                Err(e) => {
                    err = Some(e);
                    f64::NAN
                }
            },
            0.0,
            step,
        );
        if let Some(e) = err {
            return Err(e);
        }
        let frame = null_adapted_frame(&g);
        let gn = frame.transpose() * g * frame;
        viol = viol.max(required_violation(&g));
        shift = shift.max(g[(1, 2)].abs());
        let rho2 = r_h * r_h + a * a * th.cos().powi(2);
        let closed = s_h * a * th.sin().powi(2) * (r_h * r_h + a * a) / rho2;
        shift_err = shift_err.max((g[(1, 2)] - closed).abs());
        viol_null = viol_null.max(required_violation(&gn)).max(gn[(1, 2)].abs());
        let lower = Matrix2::new(g[(2, 2)], g[(2, 3)], g[(3, 2)], g[(3, 3)]);
        let ev = lower.symmetric_eigenvalues();
        min_eig = min_eig.min(ev[0].min(ev[1]));
        sign = g[(0, 1)].signum();
        kappas.push(-0.5 * d1);
        samples.push(NormalFormSample {
            theta: th,
            psi: ps,
            psi_g: to_array(&g),
            psi_g_adapted: to_array(&gn),
            d1_psi_g00: d1,
        });
    }
    if viol > tol || viol_null > tol {
        return Err(Error::BlockFormViolation(format!(
            "violation {viol:.3e}, after null correction {viol_null:.3e}"
        )));
    }
    if min_eig <= 0.0 {
        return Err(Error::BlockFormViolation(format!("angular block not positive ({min_eig:.3e})")));
    }
    let n = kappas.len().max(1) as f64;
    let kappa = kappas.iter().sum::<f64>() / n;
    let spread = kappas.iter().map(|k| (k - kappa).abs()).fold(0.0, f64::max);
    Ok(NormalFormReport {
        horizon: h,
        r_h,
        omega,
        samples,
        g01_sign: sign,
        max_violation: viol,
        max_shift: shift,
        shift_closed_form_error: shift_err,
        max_violation_null_adapted: viol_null,
        lower_block_min_eig: min_eig,
        kappa_chart: kappa,
        kappa_chart_spread: spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thetas() -> Vec<f64> {
        (1..8).map(|k| std::f64::consts::PI * k as f64 / 8.0).collect()
    }

    #[test]
    fn kds_event_horizon() {
        let st = Spacetime::from_values(0.3, 1.0, 0.05).unwrap();
        let rep = normal_form_check(&st, Horizon::Event, &thetas(), 1e-10).unwrap();
        assert_eq!(rep.g01_sign, 1.0);
        assert!(rep.max_violation < 1e-10 && rep.max_violation_null_adapted < 1e-10);
        assert!(rep.max_shift > 0.1);
        assert!(rep.shift_closed_form_error < 1e-12);
        let p = &st.params;
        let re = st.r_e();
        let k = -p.dmu(re) / (2.0 * p.b() * (re * re + p.a * p.a));
        assert!((rep.kappa_chart - k).abs() < 1e-9, "{} vs {k}", rep.kappa_chart);
        assert!(rep.kappa_chart_spread < 1e-9);
    }

    #[test]
    fn cosmological_horizon_has_opposite_orientation() {
        let st = Spacetime::from_values(0.3, 1.0, 0.05).unwrap();
        let rep = normal_form_check(&st, Horizon::Cosmological, &thetas(), 1e-10).unwrap();
        assert_eq!(rep.g01_sign, -1.0);
        assert!(rep.kappa_chart > 0.0);
    }

    #[test]
    fn schwarzschild_has_psi_equal_b_and_no_shift() {
        let st = Spacetime::from_values(0.0, 1.0, 0.02).unwrap();
        let rep = normal_form_check(&st, Horizon::Event, &thetas(), 1e-10).unwrap();
        for s in &rep.samples {
            assert_eq!(s.psi, st.params.b());
        }
        assert!(rep.max_shift < 1e-14);
    }
}
