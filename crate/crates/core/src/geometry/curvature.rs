//! Christoffel symbols and Ricci curvature by fourth-order central differences.

use nalgebra::Matrix4;

use super::charts::{Chart, ChartPoint};
use super::metric::metric;
use super::Spacetime;
use crate::error::{Error, Result};

/// `gamma[l][m][n]` is `Gamma^l_{mn}`, symmetric in the lower pair.
pub type Christoffel = [[[f64; 4]; 4]; 4];

/// Default relative finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Smallest accepted relative step.
pub const MIN_STEP: f64 = 1e-7;

/// Step along `dir`: relative to `max(1, |x|)`, except for the polar angle, where it is
/// relative to the distance to the nearer pole (capped at `h_rel`).
fn step_for(p: &ChartPoint, dir: usize, h_rel: f64) -> f64 {
    let x = p.coords[dir];
    if dir == 3 && p.chart != Chart::Misner {
        h_rel * x.min(std::f64::consts::PI - x).min(1.0)
    } else {
        h_rel * x.abs().max(1.0)
    }
}

fn check_step(h_rel: f64) -> Result<()> {
    if !(h_rel >= MIN_STEP) {
        return Err(Error::StepUnderflow { step: h_rel, floor: MIN_STEP });
    }
    Ok(())
}

fn shifted(p: &ChartPoint, dir: usize, delta: f64) -> ChartPoint {
    let mut q = *p;
    q.coords[dir] += delta;
    q
}

/// Five-point central derivative of a matrix-valued function of the chart point.
fn d_matrix<F>(p: &ChartPoint, dir: usize, h_rel: f64, mut f: F) -> Result<Matrix4<f64>>
where
    F: FnMut(&ChartPoint) -> Result<Matrix4<f64>>,
{
    let h = step_for(p, dir, h_rel);
    let m2 = f(&shifted(p, dir, -2.0 * h))?;
    let m1 = f(&shifted(p, dir, -h))?;
    let p1 = f(&shifted(p, dir, h))?;
    let p2 = f(&shifted(p, dir, 2.0 * h))?;
    Ok((m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * h))
}

/// Whether the metric of a chart depends on the coordinate `dir`.
fn depends_on(chart: Chart, dir: usize) -> bool {
    match chart {
        Chart::Misner => dir == 1,
        _ => dir == 1 || dir == 3,
    }
}

/// `Gamma^l_{mn} = g^{ls} (d_m g_{sn} + d_n g_{sm} - d_s g_{mn}) / 2`.
pub fn christoffel(st: &Spacetime, p: &ChartPoint, h_rel: f64) -> Result<Christoffel> {
    check_step(h_rel)?;
    let me = metric(st, p)?;
    let mut dg = [Matrix4::<f64>::zeros(); 4];
    for (dir, slot) in dg.iter_mut().enumerate() {
        // Killing directions are skipped: the metric components do not vary along them.
        if depends_on(p.chart, dir) {
            *slot = d_matrix(p, dir, h_rel, |q| metric(st, q).map(|m| m.g))?;
        }
    }
    Ok(assemble_christoffel(&me.g_inv, &dg))
}

/// Christoffel symbols from the inverse metric and the coordinate derivatives of the metric.
pub fn assemble_christoffel(g_inv: &Matrix4<f64>, dg: &[Matrix4<f64>; 4]) -> Christoffel {
    let mut gam = [[[0.0; 4]; 4]; 4];
    for m in 0..4 {
        for n in m..4 {
            let mut lower = [0.0; 4];
            for (s, l) in lower.iter_mut().enumerate() {
                *l = 0.5 * (dg[m][(s, n)] + dg[n][(s, m)] - dg[s][(m, n)]);
            }
            for l in 0..4 {
                let v: f64 = (0..4).map(|s| g_inv[(l, s)] * lower[s]).sum();
                gam[l][m][n] = v;
                gam[l][n][m] = v;
            }
        }
    }
    gam
}

/// Ricci tensor `R_{mn} = d_l G^l_{mn} - d_n G^l_{lm} + G^l_{ls} G^s_{mn} - G^l_{ns} G^s_{lm}`,
/// with derivatives of the Christoffel symbols taken by the same stencil.
pub fn ricci(st: &Spacetime, p: &ChartPoint, h_rel: f64) -> Result<Matrix4<f64>> {
    let gam = christoffel(st, p, h_rel)?;
    // dgam[d][l] is the matrix d_d Gamma^l_{..}
    let mut dgam = [[Matrix4::<f64>::zeros(); 4]; 4];
    for (dir, slot) in dgam.iter_mut().enumerate() {
        if !depends_on(p.chart, dir) {
            continue;
        }
        for (l, out) in slot.iter_mut().enumerate() {
            *out = d_matrix(p, dir, h_rel, |q| {
                let g = christoffel(st, q, h_rel)?;
                Ok(Matrix4::from_fn(|m, n| g[l][m][n]))
            })?;
        }
    }
    let mut ric = Matrix4::zeros();
    for m in 0..4 {
        for n in 0..4 {
            let mut v = 0.0;
            for l in 0..4 {
                v += dgam[l][l][(m, n)] - dgam[n][l][(l, m)];
                for s in 0..4 {
                    v += gam[l][l][s] * gam[s][m][n] - gam[l][n][s] * gam[s][l][m];
                }
            }
            ric[(m, n)] = v;
        }
    }
    Ok(ric)
}

/// `max |R_{mn} - lambda g_{mn}|` at a point; the Misner model is vacuum with zero lambda.
pub fn einstein_residual(st: &Spacetime, p: &ChartPoint, h_rel: f64) -> Result<f64> {
    let ric = ricci(st, p, h_rel)?;
    let g = metric(st, p)?.g;
    let lam = if p.chart == Chart::Misner { 0.0 } else { st.params.lambda };
    Ok((ric - g * lam).abs().max())
}
