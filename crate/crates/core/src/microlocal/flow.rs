use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::charts::{Chart, Horizon};
use crate::geometry::Spacetime;
use crate::numerics::ode::{integrate_weighted, OdeOptions};

use super::symbol::{hamiltonian_field, principal_symbol, quotient_inverse, CotangentPoint, DEFAULT_SYMBOL_STEP};

#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    /// Length of the integration in the rescaled parameter `tau`, `dtau = 2 |xi1| dt`.
    pub tau_max: f64,
    /// Integration stops once `|x1|` exceeds this.
    pub x1_max: f64,
    /// Integration stops once `|xi_ang| / |xi1|` exceeds this.
    pub eta_max: f64,
    /// Leading fraction of the trajectory excluded from rate fits.
    pub discard: f64,
    pub ode: OdeOptions,
}

impl FlowOptions {
    pub fn for_horizon(st: &Spacetime, kappa_chart: f64) -> Self {
        let width = match st.r_c() {
            Ok(rc) => rc - st.r_e(),
            Err(_) => st.r_e(),
        };
        FlowOptions {
            tau_max: 8.0 / kappa_chart.abs(),
            x1_max: 0.05 * width,
            eta_max: 0.05,
            discard: 0.2,
            ode: OdeOptions { rtol: 1e-11, atol: 1e-30, ..OdeOptions::default() },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowSample {
    pub tau: f64,
    pub t: f64,
    pub x: [f64; 3],
    pub xi: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowResult {
    pub samples: Vec<FlowSample>,
    /// Largest `|p - p0| / (|xi|^2 max(1, |G|))` along the trajectory.
    pub p_drift: f64,
    /// Fitted `d log|x1| / dtau`.
    pub x1_rate: f64,
    /// Fitted `d log(|xi_ang| / |xi1|) / dtau`.
    pub angular_rate: f64,
    /// Fitted `d log(1 / |xi1|) / dtau`.
    pub fiber_rate: f64,
    /// True when the distance to the conormal bundle shrinks along the flow.
    pub approaches: bool,
    pub stopped_early: bool,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Integrates the bicharacteristic flow of the rescaled symbol from `start`.
///
/// The flow is `H_p / (2 |xi1|)`, which preserves `p` and turns the radial dynamics
/// near the conormal bundle into exponentials in `tau`. A negative `tau_max` runs
/// the flow backward.
pub fn flow_bicharacteristic(st: &Spacetime, start: &CotangentPoint, opts: &FlowOptions) -> Result<FlowResult> {
    let h = start.horizon;
    let (lo, hi) = st.chart_r_range(Chart::Gnc(h))?;
    let r_h = st.horizon_radius(h)?;
    let point = |y: &[f64]| CotangentPoint::new(h, [y[0], y[1], y[2]], [y[3], y[4], y[5]]);
    let size = |y: &[f64]| y[3..6].iter().map(|v| v * v).sum::<f64>();
    let p0 = principal_symbol(st, start)?;

    let mut y0 = vec![0.0; 7];
    y0[..3].copy_from_slice(&start.x);
    y0[3..6].copy_from_slice(&start.xi);
    if start.xi[0] == 0.0 {
        return Err(Error::InvalidParams("flow start needs xi1 != 0".into()));
    }
    let rhs = |tau: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let r = r_h - y[0];
        if !(r > lo && r < hi) {
            return Err(Error::LeftChart { at: tau });
        }
        let hp = hamiltonian_field(st, &point(y), DEFAULT_SYMBOL_STEP)?;
        let scale = 1.0 / (2.0 * y[3].abs());
        for k in 0..6 {
            dy[k] = hp[k] * scale;
        }
        dy[6] = scale;
        Ok(())
    };
    let stop = |_tau: f64, y: &[f64]| {
        let eta = y[4].hypot(y[5]) / y[3].abs();
        y[0].abs() > opts.x1_max || eta > opts.eta_max || y[3] == 0.0
    };
    // Only `x1` is integrated down to `opts.ode.atol`; the angles and the fiber have
    // absolute floors at the finite-difference noise level of `H_p`.
    let fiber_floor = 1e-15 * start.xi[0].abs();
    let atol = [opts.ode.atol, 1e-15, 1e-15, fiber_floor, fiber_floor, fiber_floor, opts.ode.atol];
    let traj = integrate_weighted(rhs, 0.0, &y0, opts.tau_max, opts.ode, &atol, stop)?;

    let mut samples = Vec::with_capacity(traj.t.len());
    let mut p_drift = 0.0f64;
    for (tau, y) in traj.t.iter().zip(&traj.y) {
        let pt = point(y);
        let p = principal_symbol(st, &pt)?;
        let g = quotient_inverse(st, h, &pt.x)?;
        p_drift = p_drift.max((p - p0).abs() / (size(y) * g.amax().max(1.0)));
        samples.push(FlowSample { tau: *tau, t: y[6], x: pt.x, xi: pt.xi });
    }

    let tau_end = *traj.t.last().expect("non-empty");
    let cut = opts.discard * tau_end;
    let tail: Vec<&FlowSample> = samples.iter().filter(|s| s.tau.abs() >= cut.abs()).collect();
    if tail.len() < 3 {
        return Err(Error::IntegrationFailure(format!("only {} samples past the discarded lead", tail.len())));
    }
    let taus: Vec<f64> = tail.iter().map(|s| s.tau).collect();
    let lx: Vec<f64> = tail.iter().map(|s| s.x[0].abs().ln()).collect();
    let la: Vec<f64> = tail.iter().map(|s| (s.xi[1].hypot(s.xi[2]) / s.xi[0].abs()).ln()).collect();
    let lf: Vec<f64> = tail.iter().map(|s| -s.xi[0].abs().ln()).collect();
    let x1_rate = slope(&taus, &lx);
    let dir = tau_end.signum();
    Ok(FlowResult {
        samples,
        p_drift,
        x1_rate,
        angular_rate: slope(&taus, &la),
        fiber_rate: slope(&taus, &lf),
        approaches: x1_rate * dir < 0.0,
        stopped_early: traj.stopped,
    })
}

/// Start point `(x1, x2, x3; xi1, eta xi1, eta xi1)` near the conormal bundle.
pub fn perturbed_conormal(h: Horizon, x1: f64, x2: f64, x3: f64, xi1: f64, eta: f64) -> CotangentPoint {
    CotangentPoint::new(h, [x1, x2, x3], [xi1, eta * xi1, eta * xi1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::surface_gravity::kappa_closed_form;

    fn kappa_chart(st: &Spacetime, h: Horizon) -> f64 {
        let r = st.horizon_radius(h).unwrap();
        -st.params.dmu(r) / (2.0 * st.params.b() * (r * r + st.params.a * st.params.a))
    }

    #[test]
    fn event_horizon_is_attracting_for_positive_xi1() {
        let st = Spacetime::from_values(0.2, 1.0, 0.04).unwrap();
        let k = kappa_chart(&st, Horizon::Event);
        assert!((k.abs() - kappa_closed_form(&st, Horizon::Event).unwrap().abs()).abs() < 1e-12);
        let opts = FlowOptions::for_horizon(&st, k);
        let start = perturbed_conormal(Horizon::Event, 1e-4, 0.3, 1.1, 1.0, 1e-3);
        let res = flow_bicharacteristic(&st, &start, &opts).unwrap();
        assert!(res.approaches);
        assert!(res.p_drift < 1e-8, "{}", res.p_drift);
        assert!((res.x1_rate + 2.0 * k.abs()).abs() < 0.02 * k.abs(), "{} vs {}", res.x1_rate, k);
        assert!((res.angular_rate + k.abs()).abs() < 0.02 * k.abs());
        assert!((res.fiber_rate + k.abs()).abs() < 0.02 * k.abs());
    }

    #[test]
    fn schwarzschild_xi1_on_conormal_matches_closed_form() {
        // On N* the flow in t is xi1' = -2 kappa xi1^2 with kappa = -1/4.
        let st = Spacetime::from_values(0.0, 1.0, 0.0).unwrap();
        let mut opts = FlowOptions::for_horizon(&st, -0.25);
        opts.tau_max = 4.0;
        let start = CotangentPoint::conormal(Horizon::Event, 0.0, 1.0, 1.0);
        let res = flow_bicharacteristic(&st, &start, &opts).unwrap();
        assert!(res.samples.len() > 10);
        for s in &res.samples {
            let expect = 1.0 / (1.0 - 0.5 * s.t);
            assert!((s.xi[0] - expect).abs() < 1e-8 * expect);
            assert_eq!(s.x[0], 0.0);
        }
    }

    #[test]
    fn reversal_symmetry() {
        let st = Spacetime::from_values(0.2, 1.0, 0.04).unwrap();
        let k = kappa_chart(&st, Horizon::Cosmological);
        let mut opts = FlowOptions::for_horizon(&st, k);
        opts.tau_max = 2.0 / k.abs();
        let fwd = flow_bicharacteristic(&st, &perturbed_conormal(Horizon::Cosmological, 1e-4, 0.3, 1.1, 1.0, 1e-3), &opts).unwrap();
        let (tau, end) = fwd.samples.last().map(|s| (s.tau, s.clone())).unwrap();
        // (x(-s), -xi(-s)) is again an integral curve, so the reversed start runs forward.
        let mut back = opts;
        back.tau_max = tau;
        back.x1_max = f64::INFINITY;
        back.eta_max = f64::INFINITY;
        let rev = CotangentPoint::new(Horizon::Cosmological, end.x, [-end.xi[0], -end.xi[1], -end.xi[2]]);
        let res = flow_bicharacteristic(&st, &rev, &back).unwrap();
        let last = res.samples.last().unwrap();
        assert!((last.x[0] - 1e-4).abs() < 1e-9);
        assert!((last.xi[0] + 1.0).abs() < 1e-8);
    }
}
