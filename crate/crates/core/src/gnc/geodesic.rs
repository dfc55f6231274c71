//! Transversal null geodesics from a horizon and the Jacobi fields that transport the
//! horizon coordinates along them.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::normal_form::{null_adapted_frame, psi};
use crate::error::{Error, Result};
use crate::geometry::charts::{Chart, ChartPoint, Horizon};
use crate::geometry::curvature::{christoffel, Christoffel, DEFAULT_STEP};
use crate::geometry::metric::metric;
use crate::geometry::Spacetime;
use crate::numerics::fd;
use crate::numerics::ode::{self, OdeOptions};

/// Initial direction of the transversal geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transversal {
    /// `psi d_x1` of the horizon-adapted chart.
    HorizonChart,
    /// `psi L`, with `L` the null transversal orthogonal to the horizon's angular directions.
    NullAdapted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameSample {
    /// Affine parameter, which is the new transversal coordinate.
    pub s: f64,
    /// Star-chart position.
    pub x: [f64; 4],
    pub v: [f64; 4],
    /// Transported `d_x0`, `d_x2`, `d_x3` in star-chart components.
    pub jacobi: [[f64; 4]; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicFrame {
    pub horizon: Horizon,
    pub theta: f64,
    pub transversal: Transversal,
    pub window: f64,
    pub samples: Vec<FrameSample>,
    /// Largest `|g(v, v)|`.
    pub null_drift: f64,
    /// `g(v, d_x0)` at the horizon.
    pub w_pairing: f64,
    pub w_pairing_drift: f64,
    /// `g(v, J_j)` at the horizon for the three transported fields.
    pub jacobi_pairing: [f64; 3],
    pub jacobi_pairing_drift: f64,
    /// Largest deviation of the transported `d_x0` and `d_x2` from the Killing fields.
    pub killing_drift: f64,
}

fn gamma_contract(g: &Christoffel, u: &[f64], w: &[f64]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (l, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for m in 0..4 {
            for n in 0..4 {
                s += g[l][m][n] * u[m] * w[n];
            }
        }
        *o = s;
    }
    out
}

struct Field<'a> {
    st: &'a Spacetime,
    h_rel: f64,
}

impl Field<'_> {
    fn gamma(&self, x: &[f64]) -> Result<Christoffel> {
        christoffel(self.st, &ChartPoint::new(Chart::Star, [x[0], x[1], x[2], x[3]]), self.h_rel)
    }

    /// Christoffel symbols and their derivatives in `r` and `theta` (other coordinates are Killing).
    fn gamma_with_derivs(&self, x: &[f64]) -> Result<(Christoffel, [Christoffel; 2])> {
        let g0 = self.gamma(x)?;
        let mut dg = [[[[0.0; 4]; 4]; 4]; 2];
        for (k, dir) in [1usize, 3].into_iter().enumerate() {
            let h = 1e-3 * x[dir].abs().max(1.0);
            let at = |delta: f64| -> Result<Christoffel> {
                let mut y = [x[0], x[1], x[2], x[3]];
                y[dir] += delta;
                self.gamma(&y)
            };
            let m2 = at(-2.0 * h)?;
            let m1 = at(-h)?;
            let p1 = at(h)?;
            let p2 = at(2.0 * h)?;
            for l in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        dg[k][l][m][n] =
                            (m2[l][m][n] - 8.0 * m1[l][m][n] + 8.0 * p1[l][m][n] - p2[l][m][n]) / (12.0 * h);
                    }
                }
            }
        }
        Ok((g0, dg))
    }

    /// State layout: position, velocity, then three (position, velocity) variations.
    fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let (x, v) = (&y[0..4], &y[4..8]);
        let (gam, dgam) = self.gamma_with_derivs(x)?;
        dy[0..4].copy_from_slice(v);
        let acc = gamma_contract(&gam, v, v);
        for l in 0..4 {
            dy[4 + l] = -acc[l];
        }
        for j in 0..3 {
            let o = 8 + 8 * j;
            let (dx, dv) = (&y[o..o + 4], &y[o + 4..o + 8]);
            let t1 = gamma_contract(&dgam[0], v, v);
            let t3 = gamma_contract(&dgam[1], v, v);
            let cross = gamma_contract(&gam, v, dv);
            dy[o..o + 4].copy_from_slice(dv);
            for l in 0..4 {
                dy[o + 4 + l] = -(t1[l] * dx[1] + t3[l] * dx[3]) - 2.0 * cross[l];
            }
        }
        Ok(())
    }
}

/// Star-chart components of the initial transversal at polar angle `theta`.
fn initial_velocity(st: &Spacetime, h: Horizon, theta: f64, kind: Transversal) -> Result<Vector4<f64>> {
    let r_h = st.horizon_radius(h)?;
    let om = st.omega(h)?;
    let (dd, de) = st.offset_derivs(Chart::Intermediate(h), r_h);
    let e0 = Vector4::new(1.0, 0.0, om, 0.0);
    let e1 = Vector4::new(-dd, -1.0, -de, 0.0);
    let e2 = Vector4::new(0.0, 0.0, 1.0, 0.0);
    let ps = psi(st, h, theta)?;
    let dir = match kind {
        Transversal::HorizonChart => e1,
        Transversal::NullAdapted => {
            let g = metric(st, &ChartPoint::new(Chart::Gnc(h), [0.0, 0.0, 0.0, theta]))?.g;
            let a = null_adapted_frame(&g);
            e1 + e0 * a[(0, 1)] + e2 * a[(2, 1)]
        }
    };
    Ok(dir * ps)
}

/// Integrates the transversal null geodesic through `(r_h, theta)` over
/// `|s| <= window_frac * min(horizon gaps)` together with the Jacobi fields
/// whose initial values are `d_x0`, `d_x2`, `d_x3`.
pub fn geodesic_normalize(
    st: &Spacetime,
    h: Horizon,
    theta: f64,
    window_frac: f64,
    transversal: Transversal,
    opts: OdeOptions,
) -> Result<GeodesicFrame> {
    let r_h = st.horizon_radius(h)?;
    let om = st.omega(h)?;
    let hz = &st.horizons;
    let mut gap = hz.r_e - hz.r_inner;
    if let Some(rc) = hz.r_c {
        gap = gap.min(rc - hz.r_e);
    }
    let window = window_frac * gap;
    let v0 = initial_velocity(st, h, theta, transversal)?;
    let th_step = 1e-3;
    let dv3 = fd::d1_array(
        |t| {
            initial_velocity(st, h, t, transversal)
                .map(|v| [v[0], v[1], v[2], v[3]])
                .unwrap_or([f64::NAN; 4])
        },
        theta,
        th_step,
    );
    if dv3.iter().any(|x| !x.is_finite()) {
        return Err(Error::IntegrationFailure("initial data not defined near theta".into()));
    }
    let mut y0 = vec![0.0; 32];
    y0[0..4].copy_from_slice(&[0.0, r_h, 0.0, theta]);
    y0[4..8].copy_from_slice(v0.as_slice());
    // J0 = d_x0 = W, J2 = d_x2 = d_phi: both Killing, so their variations start with zero velocity.
    y0[8..12].copy_from_slice(&[1.0, 0.0, om, 0.0]);
    y0[16..20].copy_from_slice(&[0.0, 0.0, 1.0, 0.0]);
    y0[24..28].copy_from_slice(&[0.0, 0.0, 0.0, 1.0]);
    y0[28..32].copy_from_slice(&dv3);

    let field = Field { st, h_rel: DEFAULT_STEP };
    let r_min = hz.r_inner;
    let run = |t1: f64| -> Result<ode::Trajectory> {
        let mut exit = None;
        let tr = ode::integrate(
            |_s, y, dy| field.rhs(y, dy),
            0.0,
            &y0,
            t1,
            opts,
            |s, y| {
                let bad = !(y[1] > r_min) || !(y[3] > 0.0 && y[3] < std::f64::consts::PI);
                if bad {
                    exit = Some(s);
                }
                bad
            },
        )?;
        if let Some(at) = exit {
            return Err(Error::ChartExit { at });
        }
        Ok(tr)
    };
    let fwd = run(window)?;
    let bwd = run(-window)?;
    let mut raw: Vec<(f64, Vec<f64>)> = bwd.t.into_iter().zip(bwd.y).skip(1).collect();
    raw.reverse();
    raw.extend(fwd.t.into_iter().zip(fwd.y));

    let w = Vector4::new(1.0, 0.0, om, 0.0);
    let dphi = Vector4::new(0.0, 0.0, 1.0, 0.0);
    let mut samples = Vec::with_capacity(raw.len());
    let mut null_drift = 0.0f64;
    let mut killing_drift = 0.0f64;
    let mut pair_w = Vec::new();
    let mut pair_j: Vec<[f64; 3]> = Vec::new();
    let mut initial = (0.0, [0.0; 3]);
    for (s, y) in raw {
        let x = [y[0], y[1], y[2], y[3]];
        let g: Matrix4<f64> = metric(st, &ChartPoint::new(Chart::Star, x))?.g;
        let v = Vector4::new(y[4], y[5], y[6], y[7]);
        let js: Vec<Vector4<f64>> = (0..3).map(|j| Vector4::from_column_slice(&y[8 + 8 * j..12 + 8 * j])).collect();
        null_drift = null_drift.max((v.transpose() * g * v)[0].abs());
        killing_drift = killing_drift.max((js[0] - w).abs().max()).max((js[1] - dphi).abs().max());
        let pw = (v.transpose() * g * w)[0];
        let pj = [(v.transpose() * g * js[0])[0], (v.transpose() * g * js[1])[0], (v.transpose() * g * js[2])[0]];
        if s == 0.0 {
            initial = (pw, pj);
        }
        pair_w.push(pw);
        pair_j.push(pj);
        samples.push(FrameSample {
            s,
            x,
            v: [v[0], v[1], v[2], v[3]],
            jacobi: [
                [js[0][0], js[0][1], js[0][2], js[0][3]],
                [js[1][0], js[1][1], js[1][2], js[1][3]],
                [js[2][0], js[2][1], js[2][2], js[2][3]],
            ],
        });
    }
    let w_drift = pair_w.iter().map(|p| (p - initial.0).abs()).fold(0.0, f64::max);
    let j_drift = pair_j
        .iter()
        .flat_map(|p| (0..3).map(move |j| (p[j] - initial.1[j]).abs()))
        .fold(0.0, f64::max);
    Ok(GeodesicFrame {
        horizon: h,
        theta,
        transversal,
        window,
        samples,
        null_drift,
        w_pairing: initial.0,
        w_pairing_drift: w_drift,
        jacobi_pairing: initial.1,
        jacobi_pairing_drift: j_drift,
        killing_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schwarzschild_transversal_is_radial() {
        let st = Spacetime::from_values(0.0, 1.0, 0.0).unwrap();
        let f = geodesic_normalize(&st, Horizon::Event, 1.0, 0.1, Transversal::HorizonChart, OdeOptions::default())
            .unwrap();
        for s in &f.samples {
            assert!((s.x[3] - 1.0).abs() < 1e-12 && s.x[2].abs() < 1e-12);
        }
        assert!((f.w_pairing - 1.0).abs() < 1e-12);
        assert!(f.null_drift < 1e-9 && f.w_pairing_drift < 1e-8 && f.jacobi_pairing_drift < 1e-8);
    }

    #[test]
    fn null_adapted_transversal_is_orthogonal_to_the_horizon() {
        let st = Spacetime::from_values(0.3, 1.0, 0.05).unwrap();
        let f = geodesic_normalize(&st, Horizon::Event, 1.1, 0.1, Transversal::NullAdapted, OdeOptions::default())
            .unwrap();
        assert!((f.w_pairing - 1.0).abs() < 1e-10);
        for p in f.jacobi_pairing.iter().skip(1) {
            assert!(p.abs() < 1e-10);
        }
        assert!(f.null_drift < 1e-9 && f.jacobi_pairing_drift < 1e-8 && f.killing_drift < 1e-8);
    }
}
