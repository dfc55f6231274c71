//! Acceptance criteria for `kdsqnm`, each reduced to a pass/fail verdict with a
//! one-line summary of the measured quantities.

use std::time::Instant;

use nalgebra::Matrix4;
use num_complex::Complex64;

use kdsqnm::geometry::charts::{Chart, ChartPoint, Horizon};
use kdsqnm::geometry::curvature::einstein_residual;
use kdsqnm::geometry::ergosphere::{ergoregion_closed_form, ergoregion_numeric};
use kdsqnm::geometry::metric::{dual_metric_bl, dual_metric_scaled_sf, metric, metric_bl, metric_extended};
use kdsqnm::geometry::opspec::WaveOperatorSpec;
use kdsqnm::geometry::surface_gravity::surface_gravity_geom;
use kdsqnm::geometry::{Spacetime, SpacetimeParams};
use kdsqnm::gnc::{normal_form_check, MisnerModel};
use kdsqnm::microlocal::{
    conormal_check, flow_bicharacteristic, perturbed_conormal, radial_point_check, Classification, FlowOptions,
};
use kdsqnm::modes::{
    analyticity_fit, assemble_reduced_operator, chebyshev_decay, misner_cross_check, qnm_solve, separated_oracle,
    Eigenfunction, Frame, ModeProblem, QnmResult, SolveOptions, SpectralGrid, Verdict, Window,
};
use kdsqnm::numerics::halton::Halton;
use kdsqnm::numerics::poly::MultiPoly;
use kdsqnm::numerics::tensor::TensorGrid;

pub struct Outcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {} [{:.1} s]", self.name, self.detail, self.seconds)
    }
}

fn timed(name: &'static str, run: impl FnOnce() -> Result<(bool, String), kdsqnm::Error>) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = match run() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { name, pass, detail, seconds: start.elapsed().as_secs_f64() }
}

/// Parameter sets shared by the geometric criteria: `(a, m, lambda)`.
pub const GEOMETRY_SETS: [(f64, f64, f64); 4] = [(0.0, 1.0, 0.02), (0.3, 1.0, 0.05), (0.6, 1.0, 0.01), (0.5, 1.0, 0.0)];

fn spacetimes() -> Vec<Spacetime> {
    GEOMETRY_SETS.iter().map(|&(a, m, l)| Spacetime::from_values(a, m, l).expect("subextremal")).collect()
}

fn horizons(st: &Spacetime) -> Vec<Horizon> {
    if st.has_cosmological_horizon() {
        vec![Horizon::Event, Horizon::Cosmological]
    } else {
        vec![Horizon::Event]
    }
}

fn max_abs(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Boyer–Lindquist metric assembled from the Carter one-forms
/// `a dt - (r^2 + a^2) dphi` and `dt - a sin^2 dphi`, coordinates `(t, r, phi, theta)`.
pub fn carter_metric(p: &SpacetimeParams, r: f64, theta: f64) -> Matrix4<f64> {
    let (a, m, l) = (p.a, p.m, p.lambda);
    let (sn, cs) = theta.sin_cos();
    let rho2 = r * r + a * a * cs * cs;
    let delta_r = (r * r + a * a) * (1.0 - l * r * r / 3.0) - 2.0 * m * r;
    let delta_t = 1.0 + l * a * a * cs * cs / 3.0;
    let xi = 1.0 + l * a * a / 3.0;
    let w1 = [a, 0.0, -(r * r + a * a), 0.0];
    let w2 = [1.0, 0.0, -a * sn * sn, 0.0];
    let c1 = delta_t * sn * sn / (xi * xi * rho2);
    let c2 = -delta_r / (xi * xi * rho2);
    let mut g = Matrix4::from_fn(|i, j| c1 * w1[i] * w1[j] + c2 * w2[i] * w2[j]);
    g[(1, 1)] = rho2 / delta_r;
    g[(3, 3)] = rho2 / delta_t;
    g
}

fn chart_coords(st: &Spacetime, chart: Chart, t: f64, r: f64, phi: f64, theta: f64) -> kdsqnm::Result<[f64; 4]> {
    Ok(match chart {
        Chart::Gnc(h) => [t, st.horizon_radius(h)? - r, phi, theta],
        _ => [t, r, phi, theta],
    })
}

/// Jacobian of `(t_X, r, phi_X, theta)` with respect to Boyer–Lindquist coordinates.
fn bl_to_chart(st: &Spacetime, chart: Chart, r: f64) -> Matrix4<f64> {
    let (d_bl, e_bl) = st.offset_derivs(Chart::BoyerLindquist, r);
    let (d_x, e_x) = st.offset_derivs(chart, r);
    let mut j = Matrix4::identity();
    j[(0, 1)] = d_bl - d_x;
    j[(2, 1)] = e_bl - e_x;
    j
}

pub fn displayed_formula_fidelity() -> Outcome {
    timed("displayed-formula fidelity", || {
        let sts = spacetimes();
        let mut seq = Halton::new(2, 11);
        let (mut display, mut inverse, mut transport) = (0.0f64, 0.0f64, 0.0f64);
        let n = 100;
        for i in 0..n {
            let st = &sts[i % 3];
            let p = &st.params;
            let (re, rc) = (st.r_e(), st.r_c()?);
            let u = seq.next_in(&[(0.02, 0.98), (0.05, std::f64::consts::PI - 0.05)]);
            let (r, th) = (re + u[0] * (rc - re), u[1]);
            let oracle = carter_metric(p, r, th);
            display = display.max(max_abs(&(metric_bl(p, r, th) - oracle)) / max_abs(&oracle));
            inverse = inverse.max(max_abs(&(oracle * dual_metric_bl(p, r, th) - Matrix4::identity())));
            for chart in [Chart::Star, Chart::Intermediate(Horizon::Event), Chart::Intermediate(Horizon::Cosmological)] {
                let e = metric_extended(st, chart, r, th)?;
                let (s, f) = st.slope_and_f(chart, r);
                let dual = dual_metric_scaled_sf(p, r, th, s, f) / p.rho2(r, th);
                inverse = inverse.max(max_abs(&(e.g * dual - Matrix4::identity())));
                let j = bl_to_chart(st, chart, r);
                transport = transport.max(max_abs(&(j.transpose() * e.g * j - oracle)) / max_abs(&oracle));
            }
            for h in [Horizon::Event, Horizon::Cosmological] {
                let om = st.omega(h)?;
                // d/dx0 = d/dt + omega d/dphi, d/dx1 = -d/dr in the intermediate chart.
                let mut k = Matrix4::zeros();
                k[(0, 0)] = 1.0;
                k[(2, 0)] = om;
                k[(1, 1)] = -1.0;
                k[(2, 2)] = 1.0;
                k[(3, 3)] = 1.0;
                let j = bl_to_chart(st, Chart::Intermediate(h), r);
                let gnc = metric(st, &ChartPoint::new(Chart::Gnc(h), chart_coords(st, Chart::Gnc(h), 0.2, r, 0.4, th)?))?.g;
                // Pull the oracle back through both maps.
                let ji = j.try_inverse().expect("unimodular");
                let from_oracle = k.transpose() * ji.transpose() * oracle * ji * k;
                transport = transport.max(max_abs(&(gnc - from_oracle)) / max_abs(&from_oracle));
            }
        }
        let pass = display < 1e-12 && inverse < 1e-12 && transport < 1e-10;
        Ok((
            pass,
            format!(
                "{n} points: display {display:.2e} (tol 1e-12), inverse pair {inverse:.2e} (tol 1e-12), transport {transport:.2e} (tol 1e-10)"
            ),
        ))
    })
}

/// A point of the chart's regular interior: at least a tenth of `r_c - r_e` away from
/// `r_e` and `r_c` when they bound the chart, and no closer to the inner roots than
/// halfway to `r_e`.
fn sample_point(st: &Spacetime, chart: Chart, u: &[f64]) -> kdsqnm::Result<ChartPoint> {
    let (lo, hi) = st.chart_r_range(chart)?;
    let re = st.r_e();
    let outer = st.r_c().map(|rc| rc - re).unwrap_or(re);
    let lo = if lo < re { 0.5 * (lo + re) } else { lo + 0.1 * outer };
    let hi = if hi.is_finite() { hi - 0.1 * outer } else { re + 2.0 * outer };
    let r = lo + u[0] * (hi - lo);
    let th = 0.1 + u[1] * (std::f64::consts::PI - 0.2);
    Ok(ChartPoint::new(chart, chart_coords(st, chart, 0.3, r, 1.1, th)?))
}

fn charts_for(st: &Spacetime) -> Vec<Chart> {
    let mut c = vec![Chart::BoyerLindquist, Chart::Star, Chart::Intermediate(Horizon::Event), Chart::Gnc(Horizon::Event)];
    if st.has_cosmological_horizon() {
        c.push(Chart::Intermediate(Horizon::Cosmological));
        c.push(Chart::Gnc(Horizon::Cosmological));
    }
    c
}

pub fn vacuum_residual() -> Outcome {
    timed("vacuum residual", || {
        let (mut worst, mut points) = (0.0f64, 0usize);
        let (mut coarse, mut fine) = (0.0f64, 0.0f64);
        for st in spacetimes() {
            for chart in charts_for(&st) {
                let mut seq = Halton::new(2, 5);
                for i in 0..100 {
                    let p = sample_point(&st, chart, &seq.next_point())?;
                    worst = worst.max(einstein_residual(&st, &p, 1e-3)?);
                    points += 1;
                    if i < 10 {
                        // Mid-chart points keep the coarse stencils inside the chart.
                        let u = seq.next_point();
                        let q = sample_point(&st, chart, &[0.3 + 0.4 * u[0], 0.3 + 0.4 * u[1]])?;
                        coarse = coarse.max(einstein_residual(&st, &q, 2e-2)?);
                        fine = fine.max(einstein_residual(&st, &q, 1e-2)?);
                    }
                }
            }
        }
        let ratio = coarse / fine;
        let pass = worst < 1e-5 && (12.0..=20.0).contains(&ratio);
        Ok((pass, format!("max |Ric - Lambda g| {worst:.2e} over {points} points (tol 1e-5); step-halving ratio {ratio:.2} (h^4: 16)")))
    })
}

pub fn surface_gravity() -> Outcome {
    timed("surface gravity", || {
        let (mut spread, mut ric, mut chart_gap) = (0.0f64, 0.0f64, 0.0f64);
        let thetas: Vec<f64> = (1..32).map(|j| std::f64::consts::PI * j as f64 / 32.0).collect();
        for st in spacetimes() {
            for h in horizons(&st) {
                let d = surface_gravity_geom(&st, h, 16, 1e-3, 1e-6)?;
                spread = spread.max(d.kappa_spread / d.kappa.abs());
                ric = ric.max(d.ricci_w_tangent);
                let nf = normal_form_check(&st, h, &thetas, f64::INFINITY)?;
                chart_gap = chart_gap.max((d.kappa.abs() - nf.kappa_chart.abs()).abs() / d.kappa.abs());
            }
        }
        // With lambda = 0 the star chart is ingoing Eddington–Finkelstein-like: g_tt = -(1 - 2m/r),
        // g^{tr} = -1, so Gamma^t_tt = -g^{tr} d_r g_tt / 2 has magnitude m / r^2.
        let schw = Spacetime::from_values(0.0, 1.0, 0.0)?;
        let oracle = schw.params.m / schw.r_e().powi(2);
        let k = surface_gravity_geom(&schw, Horizon::Event, 16, 1e-3, 1e-6)?.kappa.abs();
        let pass = spread < 1e-8 && ric < 1e-5 && chart_gap < 1e-6 && (k - 0.25).abs() < 1e-6 && (oracle - 0.25).abs() < 1e-15;
        Ok((
            pass,
            format!(
                "spread {spread:.2e} (tol 1e-8), Ric(W,X) {ric:.2e} (tol 1e-5), |k_geom|-|k_chart| {chart_gap:.2e} (tol 1e-6), Schwarzschild |k| {k:.10} (oracle {oracle})"
            ),
        ))
    })
}

pub fn normal_form() -> Outcome {
    timed("normal form", || {
        let thetas: Vec<f64> = (1..32).map(|j| std::f64::consts::PI * j as f64 / 32.0).collect();
        let (mut viol, mut viol_null, mut shift) = (0.0f64, 0.0f64, 0.0f64);
        let mut min_eig = f64::INFINITY;
        let mut psi_exact = true;
        for st in spacetimes() {
            for h in horizons(&st) {
                let rep = normal_form_check(&st, h, &thetas, f64::INFINITY)?;
                viol = viol.max(rep.max_violation);
                viol_null = viol_null.max(rep.max_violation_null_adapted);
                shift = shift.max(rep.max_shift);
                min_eig = min_eig.min(rep.lower_block_min_eig);
                if st.params.a == 0.0 {
                    psi_exact &= rep.samples.iter().all(|s| s.psi == st.params.b());
                }
            }
        }
        let pass = viol < 1e-10 && viol_null < 1e-10 && min_eig > 0.0 && psi_exact;
        Ok((
            pass,
            format!(
                "required components {viol:.2e}, with null transversal (incl. g12) {viol_null:.2e} (tol 1e-10); lower block min eig {min_eig:.3e}; psi == b at a = 0: {psi_exact}; shift g12 before correction {shift:.3e}"
            ),
        ))
    })
}

fn kappa_chart(st: &Spacetime, h: Horizon) -> kdsqnm::Result<f64> {
    let r = st.horizon_radius(h)?;
    let p = &st.params;
    Ok(-p.dmu(r) / (2.0 * p.b() * (r * r + p.a * p.a)))
}

pub fn radial_points() -> Outcome {
    timed("radial point structure", || {
        let (mut rel, mut rate_err) = (0.0f64, 0.0f64);
        let mut opposite = true;
        let mut rates = Vec::new();
        for (a, m, l) in [(0.3, 1.0, 0.05), (0.1, 1.0, 0.02)] {
            let st = Spacetime::from_values(a, m, l)?;
            let mut classes = Vec::new();
            for h in [Horizon::Event, Horizon::Cosmological] {
                let kc = kappa_chart(&st, h)?;
                let rep = radial_point_check(&st, h, 32, kc, 1e-6)?;
                rel = rel.max(rep.max_rel_error);
                classes.push(rep.classification);
                let (x1, eta) = match rep.classification {
                    Classification::Sink => (1e-4, 1e-3),
                    Classification::Source => (1e-8, 1e-3),
                };
                let opts = FlowOptions::for_horizon(&st, kc);
                let flow = flow_bicharacteristic(&st, &perturbed_conormal(h, x1, 0.4, 1.0, 1.0, eta), &opts)?;
                let want = 2.0 * kc.abs();
                rate_err = rate_err.max((flow.x1_rate.abs() - want).abs() / want);
                rates.push(format!("{:+.4}/{:.4}", flow.x1_rate, want));
            }
            opposite &= classes == [Classification::Sink, Classification::Source];
        }
        let pass = rel < 1e-6 && rate_err < 0.1 && opposite;
        Ok((
            pass,
            format!(
                "H_p vs -2 kappa xi1^2 d_xi1 {rel:.2e} (tol 1e-6); x1 rates {} max rel dev {rate_err:.2e} (tol 0.1); r_e sink / r_c source: {opposite}",
                rates.join(" ")
            ),
        ))
    })
}

pub fn conormal_set() -> Outcome {
    timed("conormal characteristic set", || {
        let (mut violations, mut pure, mut c) = (0usize, 0.0f64, f64::INFINITY);
        for st in spacetimes() {
            for h in horizons(&st) {
                let rep = conormal_check(&st, h, 32, 32, 1e-12)?;
                violations += rep.violations;
                pure = pure.max(rep.max_conormal_symbol);
                c = c.min(rep.min_angular_constant);
            }
        }
        let pass = violations == 0 && c > 0.0;
        Ok((pass, format!("{violations} violations on 32x32 grids; max |p| on pure xi1 {pure:.2e}; min angular constant {c:.4}")))
    })
}

pub fn misner_reduction() -> Outcome {
    timed("Misner Keldysh reduction", || {
        let grid = TensorGrid::new(&[(-0.5, 0.5), (-1.0, 1.0), (-1.0, 1.0)], &[7, 6, 6])?;
        let mut coeffs = Halton::new(2, 17);
        let mut freqs = Halton::new(2, 23);
        let (mut displayed, mut derived) = (0.0f64, 0.0f64);
        for _ in 0..20 {
            let f = freqs.next_in(&[(-1.0, 1.0), (-0.5, 0.5)]);
            let model = MisnerModel::new(4, Complex64::new(f[0], f[1]))?;
            let poly = MultiPoly::quasi_random(3, 3, &mut coeffs);
            let chk = misner_cross_check(&model, &grid, std::slice::from_ref(&poly))?;
            displayed = displayed.max(chk.max_diff_displayed);
            derived = derived.max(chk.max_diff_derived);
        }
        Ok((
            displayed < 1e-10,
            format!("general vs displayed (+2i sigma v) {displayed:.2e} (tol 1e-10); general vs +2i sigma d1 v {derived:.2e}"),
        ))
    })
}

pub fn ergosphere() -> Outcome {
    timed("ergosphere equivalence", || {
        let mut seq = Halton::new(3, 29);
        let (mut checked, mut disagree, mut banded, mut drawn) = (0, 0, 0, 0);
        while checked < 50 {
            drawn += 1;
            let u = seq.next_in(&[(0.0, 1.2), (0.3, 1.2), (0.001, 0.25)]);
            let Ok(p) = SpacetimeParams::new(u[0] * u[1], u[1], u[2] / (u[1] * u[1])) else { continue };
            if Spacetime::new(p).is_err() {
                continue;
            }
            checked += 1;
            let (numeric, _, gap) = ergoregion_numeric(&p)?;
            let beta = 1.0 - p.alpha();
            let closed_gap = beta.powi(3) - 9.0 * p.m * p.m * p.lambda;
            if gap.is_some_and(|g| g.abs() <= 1e-10) || closed_gap.abs() <= 1e-10 {
                banded += 1;
                continue;
            }
            if numeric != ergoregion_closed_form(&p) {
                disagree += 1;
            }
        }
        Ok((disagree == 0, format!("{checked} subextremal triples ({drawn} drawn): {disagree} disagreements, {banded} inside the 1e-10 band")))
    })
}

/// Spectra shared by the mode criteria.
pub struct ModeRuns {
    pub window: Window,
    pub seconds: f64,
    /// `(a, k, problem, result)` in the star frame.
    pub star: Vec<(f64, i32, ModeProblem, QnmResult)>,
    pub error: Option<String>,
}

pub const MODE_SPINS: [f64; 3] = [0.0, 0.05, 0.1];
pub const MODE_K: [i32; 2] = [0, 1];
const LAMBDA: f64 = 0.02;
const N_R: usize = 48;
const N_THETA: usize = 12;

fn mode_problem(a: f64, k: i32, frame: Frame) -> kdsqnm::Result<ModeProblem> {
    let st = Spacetime::from_values(a, 1.0, LAMBDA)?;
    let grid = SpectralGrid::with_default_margins(&st, N_R, N_THETA, k)?;
    assemble_reduced_operator(&st, &WaveOperatorSpec::wave(), &grid, frame)
}

impl ModeRuns {
    pub fn compute() -> Self {
        let start = Instant::now();
        let window = Window::new(-0.5, 0.5, -0.01, 0.2);
        let mut star = Vec::new();
        let mut error = None;
        'outer: for &a in &MODE_SPINS {
            for &k in &MODE_K {
                match mode_problem(a, k, Frame::Star).and_then(|p| qnm_solve(&p, &window, &SolveOptions::default()).map(|r| (p, r))) {
                    Ok((p, r)) => star.push((a, k, p, r)),
                    Err(e) => {
                        error = Some(format!("solve a = {a}, k = {k}: {e}"));
                        break 'outer;
                    }
                }
            }
        }
        ModeRuns { window, seconds: start.elapsed().as_secs_f64(), star, error }
    }

    fn get(&self, a: f64, k: i32) -> Option<&(f64, i32, ModeProblem, QnmResult)> {
        self.star.iter().find(|e| e.0 == a && e.1 == k)
    }

    fn check(&self) -> kdsqnm::Result<()> {
        match &self.error {
            Some(e) => Err(kdsqnm::Error::EigensolverFailure(e.clone())),
            None => Ok(()),
        }
    }
}

fn nearest(z: Complex64, set: &[Complex64]) -> f64 {
    set.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min)
}

pub fn qnm_oracle(runs: &ModeRuns) -> Outcome {
    timed("QNM oracle equivalence", || {
        runs.check()?;
        let (_, _, prob, res) = runs.get(0.0, 0).expect("a = 0, k = 0 solve");
        let two_d: Vec<Complex64> = res.modes.iter().map(|m| m.sigma).collect();
        let st = prob.spacetime;
        let mut worst = 0.0f64;
        let mut counts = Vec::new();
        let mut enough = true;
        for ell in 0..3u32 {
            let mut modes = separated_oracle(&st, &WaveOperatorSpec::wave(), ell, &runs.window, N_R, prob.grid.c1, prob.grid.c2)?;
            modes.sort_by(|x, y| x.sigma.im.total_cmp(&y.sigma.im).then(x.sigma.re.total_cmp(&y.sigma.re)));
            enough &= modes.len() >= 3;
            counts.push(modes.len());
            for m in modes.iter().take(3) {
                worst = worst.max(nearest(m.sigma, &two_d));
            }
        }
        Ok((
            enough && worst < 1e-6,
            format!(
                "oracle modes per l {counts:?}; max |sigma_2D - sigma_1D| over first 3 per l {worst:.2e} (tol 1e-6); {} 2-D modes; shared solves took {:.1} s",
                two_d.len(),
                runs.seconds
            ),
        ))
    })
}

pub fn rotating_continuity(runs: &ModeRuns) -> Outcome {
    timed("rotating continuity", || {
        runs.check()?;
        let (mut drift, mut resid, mut agree) = (0.0f64, 0.0f64, 0.0f64);
        let mut counts = Vec::new();
        for &k in &MODE_K {
            let spectra: Vec<Vec<Complex64>> = MODE_SPINS
                .iter()
                .map(|&a| runs.get(a, k).expect("solve").3.modes.iter().map(|m| m.sigma).collect())
                .collect();
            counts.push(spectra.iter().map(Vec::len).collect::<Vec<_>>());
            for pair in spectra.windows(2) {
                for z in &pair[1] {
                    drift = drift.max(nearest(*z, &pair[0]));
                }
                for z in &pair[0] {
                    drift = drift.max(nearest(*z, &pair[1]));
                }
            }
            for &a in &MODE_SPINS {
                for m in &runs.get(a, k).expect("solve").3.modes {
                    resid = resid.max(m.residual).max(m.refined_residual);
                    agree = agree.max(m.agreement);
                }
            }
        }
        let nonempty = counts.iter().flatten().all(|&c| c > 0);
        Ok((
            nonempty && drift < 0.2 && resid < 1e-8 && agree < 1e-7,
            format!("modes per (k, a) {counts:?}; nearest-neighbour drift {drift:.3e} (tol 0.2); residual {resid:.2e} (tol 1e-8); refinement {agree:.2e} (tol 1e-7)"),
        ))
    })
}

pub fn analyticity(runs: &ModeRuns) -> Outcome {
    timed("analyticity certificate", || {
        runs.check()?;
        let (mut total, mut certified) = (0, 0);
        let (mut worst_slope, mut worst_r2) = (f64::NEG_INFINITY, f64::INFINITY);
        for (_, _, prob, res) in &runs.star {
            let st = &prob.spacetime;
            for mode in &res.modes {
                let ef = Eigenfunction::from_mode(prob, mode)?;
                for (rh, delta) in [(st.r_e(), 0.5 * prob.grid.c1), (st.r_c()?, 0.5 * prob.grid.c2)] {
                    let fit = analyticity_fit(&ef, rh, delta, 1.0, 64, 0.05)?;
                    total += 1;
                    worst_slope = worst_slope.max(fit.slope);
                    worst_r2 = worst_r2.min(fit.r_squared);
                    if fit.verdict == Verdict::AnalyticConsistent && fit.slope <= -0.05 && fit.r_squared >= 0.9 {
                        certified += 1;
                    }
                }
            }
        }
        let rh = 2.0;
        let bump = |r: f64| Complex64::from(if r > rh { (-1.0 / (r - rh)).exp() } else { 0.0 });
        let fit = chebyshev_decay(bump, rh - 0.4, rh + 0.4, 64, 0.05);
        let flagged = fit.verdict != Verdict::AnalyticConsistent;
        Ok((
            total > 0 && certified == total && flagged,
            format!(
                "{certified}/{total} eigenfunction intervals analytic-consistent (worst slope {worst_slope:.3}, worst R^2 {worst_r2:.4}); bump verdict {:?}",
                fit.verdict
            ),
        ))
    })
}

pub fn joint_mode_shift(runs: &ModeRuns) -> Outcome {
    timed("joint-mode shift", || {
        runs.check()?;
        let mut worst = 0.0f64;
        let mut compared = 0;
        for &a in MODE_SPINS.iter().filter(|&&a| a > 0.0) {
            for &k in &MODE_K {
                let (_, _, _, star) = runs.get(a, k).expect("solve");
                for h in [Horizon::Event, Horizon::Cosmological] {
                    let prob = mode_problem(a, k, Frame::Horizon(h))?;
                    let shift = prob.omega * k as f64;
                    let w = &runs.window;
                    let window = Window::new(w.re_min + shift, w.re_max + shift, w.im_min, w.im_max);
                    let res = qnm_solve(&prob, &window, &SolveOptions::default())?;
                    let shifted: Vec<Complex64> = res.modes.iter().map(|m| m.sigma - shift).collect();
                    if shifted.len() != star.modes.len() {
                        return Ok((false, format!("a = {a}, k = {k}, {h:?}: {} vs {} modes", shifted.len(), star.modes.len())));
                    }
                    for m in &star.modes {
                        worst = worst.max(nearest(m.sigma, &shifted));
                        compared += 1;
                    }
                }
            }
        }
        Ok((worst < 1e-8, format!("{compared} modes: max |sigma_W - Omega k - sigma| {worst:.2e} (tol 1e-8)")))
    })
}
