//! Surface gravity of the Killing horizons from the geodesic equation of their generators.

use serde::{Deserialize, Serialize};

use super::charts::{Chart, ChartPoint, Horizon};
use super::curvature::{christoffel, ricci};
use super::Spacetime;
use crate::error::{Error, Result};
use crate::numerics::legendre::gauss_legendre;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HorizonData {
    pub horizon: Horizon,
    pub r_h: f64,
    /// Angular velocity of the generator `W = d_t + omega d_phi`.
    pub omega: f64,
    /// Mean of `kappa` over the sampled polar angles, from `nabla_W W = kappa W`.
    pub kappa: f64,
    /// Largest deviation of a sample from the mean.
    pub kappa_spread: f64,
    /// Largest `|nabla_W W - kappa W| / |kappa|` over the samples.
    pub parallel_defect: f64,
    /// `kappa * 2 b (r_h^2 + a^2) / mu'(r_h)`: `-1` at the event horizon, `+1` at the cosmological one.
    pub kappa_ratio: f64,
    /// Largest `|Ric(W, X)|` over `X` in `{d_t, d_phi, d_theta}` and the samples.
    pub ricci_w_tangent: f64,
    pub nondegenerate: bool,
}

/// Closed-form surface gravity for the generator normalised by `dt_*(W) = 1`.
pub fn kappa_closed_form(st: &Spacetime, h: Horizon) -> Result<f64> {
    let r = st.horizon_radius(h)?;
    let p = &st.params;
    let k = p.dmu(r) / (2.0 * p.b() * (r * r + p.a * p.a));
    Ok(match h {
        Horizon::Event => -k,
        Horizon::Cosmological => k,
    })
}

/// Samples `theta_j = arccos(x_j)` at Gauss–Legendre nodes on the horizon, in the star chart.
pub fn surface_gravity_geom(st: &Spacetime, h: Horizon, n_theta: usize, h_rel: f64, tol: f64) -> Result<HorizonData> {
    let r_h = st.horizon_radius(h)?;
    let om = st.omega(h)?;
    let w = [1.0, 0.0, om, 0.0];
    let (nodes, _) = gauss_legendre(n_theta.max(1));
    let mut kappas = Vec::with_capacity(nodes.len());
    let mut defect = 0.0f64;
    let mut ric_wt = 0.0f64;
    for &x in &nodes {
        let p = ChartPoint::new(Chart::Star, [0.0, r_h, 0.0, x.acos()]);
        let gam = christoffel(st, &p, h_rel)?;
        let mut acc = [0.0; 4];
        for (l, a) in acc.iter_mut().enumerate() {
            for m in 0..4 {
                for n in 0..4 {
                    *a += gam[l][m][n] * w[m] * w[n];
                }
            }
        }
        let kappa = acc[0];
        let dev = (0..4).map(|l| (acc[l] - kappa * w[l]).abs()).fold(0.0, f64::max);
        let rel = dev / kappa.abs().max(f64::MIN_POSITIVE);
        if rel > tol && dev > tol {
            return Err(Error::NotParallel { deviation: rel });
        }
        defect = defect.max(rel.min(dev));
        kappas.push(kappa);
        let ric = ricci(st, &p, h_rel)?;
        for x_idx in [0usize, 2, 3] {
            let v: f64 = (0..4).map(|m| ric[(m, x_idx)] * w[m]).sum();
            ric_wt = ric_wt.max(v.abs());
        }
    }
    let mean = kappas.iter().sum::<f64>() / kappas.len() as f64;
    let spread = kappas.iter().map(|k| (k - mean).abs()).fold(0.0, f64::max);
    let p = &st.params;
    let ratio = mean * 2.0 * p.b() * (r_h * r_h + p.a * p.a) / p.dmu(r_h);
    Ok(HorizonData {
        horizon: h,
        r_h,
        omega: om,
        kappa: mean,
        kappa_spread: spread,
        parallel_defect: defect,
        kappa_ratio: ratio,
        ricci_w_tangent: ric_wt,
        nondegenerate: mean.abs() > tol,
    })
}
