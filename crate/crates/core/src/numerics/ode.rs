//! Adaptive Dormand–Prince 5(4) integration.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, h_init: 1e-3, h_min: 1e-14, max_steps: 200_000 }
    }
}

/// Accepted steps of an integration, including the initial point.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    /// True when the stop predicate ended the integration early.
    pub stopped: bool,
}

impl Trajectory {
    pub fn last(&self) -> (f64, &[f64]) {
        (*self.t.last().expect("non-empty"), self.y.last().expect("non-empty"))
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `stop(t, y)` is checked after every accepted step; returning true ends the
/// integration with `stopped = true`.
pub fn integrate<F, S>(f: F, t0: f64, y0: &[f64], t1: f64, opts: OdeOptions, stop: S) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    S: FnMut(f64, &[f64]) -> bool,
{
    integrate_weighted(f, t0, y0, t1, opts, &vec![opts.atol; y0.len()], stop)
}

/// As [`integrate`], with a separate absolute tolerance per component (`opts.atol` is ignored).
pub fn integrate_weighted<F, S>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: OdeOptions,
    atol: &[f64],
    mut stop: S,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    S: FnMut(f64, &[f64]) -> bool,
{
    let n = y0.len();
    if atol.len() != n {
        return Err(Error::InvalidParams(format!("{} tolerances for {n} components", atol.len())));
    }
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut out = Trajectory { t: vec![t0], y: vec![y.clone()], stopped: false };
    if t0 == t1 {
        return Ok(out);
    }
    let mut h = opts.h_init.min((t1 - t0).abs());
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y5 = vec![0.0; n];
    f(t, &y, &mut k[0])?;
    let mut steps = 0;
    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::IntegrationFailure(format!("exceeded {} steps at t = {t}", opts.max_steps)));
        }
        if h < opts.h_min {
            return Err(Error::IntegrationFailure(format!("step size underflow at t = {t}")));
        }
        let last = h >= (t1 - t).abs();
        if last {
            h = (t1 - t).abs();
        }
        let hs = h * dir;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += hs * A[s][j] * kj[i];
                }
                tmp[i] = acc;
            }
            let mut ks = std::mem::take(&mut k[s]);
            f(t + C[s] * hs, &tmp, &mut ks)?;
            k[s] = ks;
        }
        let mut err = 0.0f64;
        for i in 0..n {
            let mut v5 = y[i];
            let mut v4 = y[i];
            for s in 0..7 {
                v5 += hs * B5[s] * k[s][i];
                v4 += hs * B4[s] * k[s][i];
            }
            y5[i] = v5;
            let sc = atol[i] + opts.rtol * y[i].abs().max(v5.abs());
            err = err.max(((v5 - v4) / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y.copy_from_slice(&y5);
            k.swap(0, 6);
            out.t.push(t);
            out.y.push(y.clone());
            if stop(t, &y) {
                out.stopped = true;
                return Ok(out);
            }
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |_t: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = -y[0];
            Ok(())
        };
        let tr = integrate(f, 0.0, &[1.0, 0.0], 2.0 * std::f64::consts::PI, OdeOptions::default(), |_, _| false)
            .unwrap();
        let (_, y) = tr.last();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9);
    }

    #[test]
    fn backwards_and_stop() {
        let f = |_t: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[0];
            Ok(())
        };
        let tr = integrate(f, 0.0, &[1.0], -1.0, OdeOptions::default(), |_, _| false).unwrap();
        assert!((tr.last().1[0] - (-1f64).exp()).abs() < 1e-10);
        let tr = integrate(f, 0.0, &[1.0], 5.0, OdeOptions::default(), |_, y| y[0] > 2.0).unwrap();
        assert!(tr.stopped);
        assert!(tr.last().0 < 5.0);
    }
}
