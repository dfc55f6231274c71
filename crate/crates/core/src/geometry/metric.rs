//! Metric and inverse metric in every chart.
//!
//! Kerr(-de Sitter) charts share one closed form parametrised by the slope `s`
//! of the time function and `F = (1 - s^2) / mu`: with `E = dt - a sin^2 dphi`,
//!
//! `g = rho^2 F dr^2 + (2 s / b) E dr - mu/(b^2 rho^2) E^2
//!      + c sin^2/(b^2 rho^2) (a dt - (r^2+a^2) dphi)^2 + rho^2/c dtheta^2`.
//!
//! Boyer–Lindquist is the case `s = 0`, `F = 1/mu`.

use nalgebra::Matrix4;

use super::charts::{Chart, ChartPoint, Horizon};
use super::params::SpacetimeParams;
use super::Spacetime;
use crate::error::{Error, Result};

/// Coordinate indices shared by the `(t, r, phi, theta)` charts.
pub const T: usize = 0;
pub const R: usize = 1;
pub const PHI: usize = 2;
pub const TH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEval {
    pub point: ChartPoint,
    pub g: Matrix4<f64>,
    pub g_inv: Matrix4<f64>,
}

impl MetricEval {
    pub fn det(&self) -> f64 {
        self.g.determinant()
    }
}

/// Lower-index metric for slope `s` and radial coefficient `f`.
pub fn metric_sf(p: &SpacetimeParams, r: f64, theta: f64, s: f64, f: f64) -> Matrix4<f64> {
    let a = p.a;
    let b = p.b();
    let (sn, cs) = theta.sin_cos();
    let s2 = sn * sn;
    let c = p.c_of_x(cs);
    let rho2 = r * r + a * a * cs * cs;
    let mu = p.mu(r);
    let r2a2 = r * r + a * a;
    let k = 1.0 / (b * b * rho2);
    let mut g = Matrix4::zeros();
    g[(T, T)] = k * (-mu + c * a * a * s2);
    g[(T, PHI)] = k * s2 * a * (mu - c * r2a2);
    g[(PHI, PHI)] = k * s2 * (-mu * a * a * s2 + c * r2a2 * r2a2);
    g[(R, R)] = rho2 * f;
    g[(T, R)] = s / b;
    g[(PHI, R)] = -a * s2 * s / b;
    g[(TH, TH)] = rho2 / c;
    g[(PHI, T)] = g[(T, PHI)];
    g[(R, T)] = g[(T, R)];
    g[(R, PHI)] = g[(PHI, R)];
    g
}

/// `rho^2` times the inverse metric for slope `s` and radial coefficient `f`.
pub fn dual_metric_scaled_sf(p: &SpacetimeParams, r: f64, theta: f64, s: f64, f: f64) -> Matrix4<f64> {
    let a = p.a;
    let b = p.b();
    let (sn, cs) = theta.sin_cos();
    let s2 = sn * sn;
    let c = p.c_of_x(cs);
    let r2a2 = r * r + a * a;
    let b2 = b * b;
    let mut h = Matrix4::zeros();
    h[(R, R)] = p.mu(r);
    h[(TH, TH)] = c;
    h[(R, T)] = b * s * r2a2;
    h[(R, PHI)] = b * s * a;
    h[(T, T)] = -b2 * f * r2a2 * r2a2 + b2 * a * a * s2 / c;
    h[(T, PHI)] = -b2 * f * a * r2a2 + b2 * a / c;
    h[(PHI, PHI)] = -b2 * f * a * a + b2 / (c * s2);
    h[(T, R)] = h[(R, T)];
    h[(PHI, R)] = h[(R, PHI)];
    h[(PHI, T)] = h[(T, PHI)];
    h
}

fn bl_f(p: &SpacetimeParams, r: f64) -> f64 {
    1.0 / p.mu(r)
}

/// Boyer–Lindquist metric in the order `(t, r, phi, theta)`.
pub fn metric_bl(p: &SpacetimeParams, r: f64, theta: f64) -> Matrix4<f64> {
    metric_sf(p, r, theta, 0.0, bl_f(p, r))
}

/// Closed-form Boyer–Lindquist inverse metric.
pub fn dual_metric_bl(p: &SpacetimeParams, r: f64, theta: f64) -> Matrix4<f64> {
    let rho2 = p.rho2(r, theta);
    dual_metric_scaled_sf(p, r, theta, 0.0, bl_f(p, r)) / rho2
}

impl Spacetime {
    /// Slope and radial coefficient of the `(t, r, phi, theta)`-type charts.
    pub fn slope_and_f(&self, chart: Chart, r: f64) -> (f64, f64) {
        match chart {
            Chart::BoyerLindquist => (0.0, bl_f(&self.params, r)),
            Chart::Star => (self.star_slope(r), self.star_f(r)),
            Chart::Intermediate(Horizon::Event) | Chart::Gnc(Horizon::Event) => (-1.0, 0.0),
            Chart::Intermediate(Horizon::Cosmological) | Chart::Gnc(Horizon::Cosmological) => (1.0, 0.0),
            Chart::Misner => (0.0, 0.0),
        }
    }
}

/// Metric of the star chart (or an intermediate chart) at `(r, theta)`; independent of `t` and `phi`.
pub fn metric_extended(st: &Spacetime, chart: Chart, r: f64, theta: f64) -> Result<MetricEval> {
    match chart {
        Chart::Star | Chart::Intermediate(_) => metric(st, &ChartPoint::new(chart, [0.0, r, 0.0, theta])),
        other => Err(Error::OutOfChart { chart: other.to_string(), reason: "not an extended chart".into() }),
    }
}

/// Closed-form inverse of the Misner model metric.
pub fn misner_metric(x1: f64) -> (Matrix4<f64>, Matrix4<f64>) {
    let mut g = Matrix4::identity();
    g[(0, 0)] = x1;
    g[(0, 1)] = 1.0;
    g[(1, 0)] = 1.0;
    g[(1, 1)] = 0.0;
    let mut gi = Matrix4::identity();
    gi[(0, 0)] = 0.0;
    gi[(0, 1)] = 1.0;
    gi[(1, 0)] = 1.0;
    gi[(1, 1)] = -x1;
    (g, gi)
}

/// Jacobian `d(t~, r, phi~, theta) / d(x0, x1, x2, x3)` of a horizon-adapted chart.
pub fn gnc_jacobian(omega: f64) -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 0)] = 1.0;
    j[(1, 1)] = -1.0;
    j[(2, 0)] = omega;
    j[(2, 2)] = 1.0;
    j[(3, 3)] = 1.0;
    j
}

/// Metric and inverse at a chart point.
pub fn metric(st: &Spacetime, p: &ChartPoint) -> Result<MetricEval> {
    st.check_in_chart(p)?;
    let pr = &st.params;
    let (g, g_inv) = match p.chart {
        Chart::Misner => misner_metric(p.coords[1]),
        Chart::Gnc(h) => {
            let r = st.radius_of(p)?;
            let th = p.coords[3];
            let (s, f) = st.slope_and_f(p.chart, r);
            let gi = metric_sf(pr, r, th, s, f);
            let j = gnc_jacobian(st.omega(h)?);
            let g = j.transpose() * gi * j;
            (g, invert(&g, p)?)
        }
        chart => {
            let (r, th) = (p.coords[1], p.coords[3]);
            let (s, f) = st.slope_and_f(chart, r);
            let g = metric_sf(pr, r, th, s, f);
            (g, invert(&g, p)?)
        }
    };
    Ok(MetricEval { point: *p, g, g_inv })
}

fn invert(g: &Matrix4<f64>, p: &ChartPoint) -> Result<Matrix4<f64>> {
    g.try_inverse().ok_or_else(|| Error::OutOfChart {
        chart: p.chart.to_string(),
        reason: "metric is degenerate".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix4<f64>, b: &Matrix4<f64>, tol: f64) -> bool {
        (a - b).abs().max() <= tol * (1.0 + b.abs().max())
    }

    #[test]
    fn bl_dual_is_inverse() {
        let p = SpacetimeParams::new(0.3, 1.0, 0.05).unwrap();
        let g = metric_bl(&p, 3.0, 1.0);
        let gi = g.try_inverse().unwrap();
        assert!(close(&dual_metric_bl(&p, 3.0, 1.0), &gi, 1e-12));
    }

    #[test]
    fn schwarzschild_bl_components() {
        let p = SpacetimeParams::new(0.0, 1.0, 0.0).unwrap();
        let g = metric_bl(&p, 4.0, std::f64::consts::FRAC_PI_2);
        assert!((g[(T, T)] + 0.5).abs() < 1e-15);
        assert!((g[(R, R)] - 2.0).abs() < 1e-15);
        assert!((g[(PHI, PHI)] - 16.0).abs() < 1e-13);
        assert!((g[(TH, TH)] - 16.0).abs() < 1e-13);
    }

    #[test]
    fn star_closed_form_inverse_and_determinant() {
        let st = Spacetime::from_values(0.3, 1.0, 0.05).unwrap();
        for &r in &[st.r_e(), 1.0, 2.5, st.r_c().unwrap(), 20.0] {
            for &th in &[0.3, 1.1, 2.8] {
                let m = metric_extended(&st, Chart::Star, r, th).unwrap();
                let (s, f) = st.slope_and_f(Chart::Star, r);
                let h = dual_metric_scaled_sf(&st.params, r, th, s, f) / st.params.rho2(r, th);
                assert!(close(&m.g_inv, &h, 1e-11), "r={r} th={th}");
                let b = st.params.b();
                let expect = -st.params.rho2(r, th).powi(2) * th.sin().powi(2) / b.powi(4);
                assert!((m.det() - expect).abs() < 1e-10 * expect.abs());
            }
        }
    }

    #[test]
    fn misner_inverse() {
        let (g, gi) = misner_metric(0.37);
        assert!(close(&(g * gi), &Matrix4::identity(), 1e-15));
    }
}
