use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use kdsqnm::geometry::charts::{Chart, ChartPoint, Horizon};
use kdsqnm::geometry::curvature::einstein_residual;
use kdsqnm::geometry::ergosphere::ergoregion_nonempty;
use kdsqnm::geometry::metric;
use kdsqnm::geometry::surface_gravity::{kappa_closed_form, surface_gravity_geom};
use kdsqnm::geometry::Spacetime;
use kdsqnm::gnc::{geodesic_normalize, normal_form_check, MisnerModel, Transversal};
use kdsqnm::microlocal::{
    conormal_check, flow_bicharacteristic, perturbed_conormal, principal_symbol, radial_point_check, symbol_signature,
    Classification, CotangentPoint, FlowOptions,
};
use kdsqnm::modes::{
    analyticity_fit, assemble_reduced_operator, chebyshev_decay, misner_cross_check, qnm_solve, separated_oracle,
    DecayFit, Eigenfunction, ModeProblem, QnmResult, SpectralGrid, Verdict,
};
use kdsqnm::numerics::halton::Halton;
use kdsqnm::numerics::ode::OdeOptions;
use kdsqnm::numerics::poly::MultiPoly;
use kdsqnm::numerics::tensor::TensorGrid;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{float, Csv, Emitter};

/// Inputs shared by every command.
pub struct Context {
    pub cfg: RunConfig,
    pub seed: u64,
}

fn horizons_of(st: &Spacetime) -> Vec<Horizon> {
    if st.has_cosmological_horizon() {
        vec![Horizon::Event, Horizon::Cosmological]
    } else {
        vec![Horizon::Event]
    }
}

fn horizon_name(h: Horizon) -> &'static str {
    match h {
        Horizon::Event => "event",
        Horizon::Cosmological => "cosmological",
    }
}

/// Polar angles strictly inside `(0, pi)`, equally spaced.
fn interior_thetas(n: usize) -> Vec<f64> {
    (1..=n).map(|j| PI * j as f64 / (n + 1) as f64).collect()
}

fn kappa_chart(st: &Spacetime, h: Horizon) -> Result<f64, CliError> {
    let r = st.horizon_radius(h)?;
    let p = &st.params;
    Ok(-p.dmu(r) / (2.0 * p.b() * (r * r + p.a * p.a)))
}

pub fn horizons(ctx: &Context, out: &mut Emitter) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let g = &cfg.geometry;
    let st = cfg.spacetime()?;
    let mut per = serde_json::Map::new();
    let mut kappas = Vec::new();
    for h in horizons_of(&st) {
        let d = surface_gravity_geom(&st, h, g.n_theta, g.fd_step, g.parallel_tol)?;
        kappas.push(format!("{} |kappa| = {:.10}", horizon_name(h), d.kappa.abs()));
        per.insert(
            horizon_name(h).into(),
            json!({
                "r": d.r_h,
                "omega": d.omega,
                "kappa_geom": d.kappa,
                "kappa_closed_form": kappa_closed_form(&st, h)?,
                "kappa_chart": kappa_chart(&st, h)?,
                "kappa_spread": d.kappa_spread,
                "parallel_defect": d.parallel_defect,
                "ricci_w_tangent": d.ricci_w_tangent,
                "nondegenerate": d.nondegenerate,
            }),
        );
    }
    let hz = &st.horizons;
    let margins = match st.r_c() {
        Ok(rc) => {
            let d = SpectralGrid::with_default_margins(&st, cfg.solver.n_r, cfg.solver.n_theta, 0)?;
            json!({ "gap_inner_event": hz.r_e - hz.r_inner, "gap_event_cosmological": rc - hz.r_e, "c1": d.c1, "c2": d.c2 })
        }
        Err(_) => json!({ "gap_inner_event": hz.r_e - hz.r_inner }),
    };
    let report = json!({
        "params": st.params,
        "roots": { "r0": hz.r0, "r_inner": hz.r_inner, "r_e": hz.r_e, "r_c": hz.r_c },
        "horizons": per,
        "ergoregion": ergoregion_nonempty(&st.params)?,
        "margins": margins,
    });
    out.json("horizons.json", &report)?;
    Ok(format!("r_e = {}; {}", float(hz.r_e), kappas.join(", ")))
}

fn charts_for(st: &Spacetime) -> Vec<Chart> {
    let mut c = vec![Chart::BoyerLindquist, Chart::Star, Chart::Intermediate(Horizon::Event), Chart::Gnc(Horizon::Event)];
    if st.has_cosmological_horizon() {
        c.push(Chart::Intermediate(Horizon::Cosmological));
        c.push(Chart::Gnc(Horizon::Cosmological));
    }
    c
}

/// Radius and polar angle in the regular interior of a chart, from a unit-square sample.
fn interior_sample(st: &Spacetime, chart: Chart, u: &[f64]) -> Result<ChartPoint, CliError> {
    let (lo, hi) = st.chart_r_range(chart)?;
    let re = st.r_e();
    let outer = st.r_c().map(|rc| rc - re).unwrap_or(re);
    let lo = if lo < re { 0.5 * (lo + re) } else { lo + 0.1 * outer };
    let hi = if hi.is_finite() { hi - 0.1 * outer } else { re + 2.0 * outer };
    let r = lo + u[0] * (hi - lo);
    let th = 0.1 + u[1] * (PI - 0.2);
    let x1 = match chart {
        Chart::Gnc(h) => st.horizon_radius(h)? - r,
        _ => r,
    };
    Ok(ChartPoint::new(chart, [0.3, x1, 1.1, th]))
}

pub fn geometry_check(ctx: &Context, out: &mut Emitter) -> Result<String, CliError> {
    let g = &ctx.cfg.geometry;
    let st = ctx.cfg.spacetime()?;
    let mut csv = Csv::new(&["chart", "r", "theta", "einstein_residual", "inverse_defect"]);
    let mut charts = serde_json::Map::new();
    let mut worst_all = 0.0f64;
    for chart in charts_for(&st) {
        let mut seq = Halton::new(2, ctx.seed);
        let (mut worst, mut inv) = (0.0f64, 0.0f64);
        for _ in 0..g.n_points {
            let p = interior_sample(&st, chart, &seq.next_point())?;
            let res = einstein_residual(&st, &p, g.fd_step)?;
            let m = metric(&st, &p)?;
            let prod = m.g * m.g_inv;
            let defect = prod.iter().enumerate().fold(0.0f64, |a, (n, v)| {
                let delta = if n % 4 == n / 4 { 1.0 } else { 0.0 };
                a.max((v - delta).abs())
            });
            worst = worst.max(res);
            inv = inv.max(defect);
            let r = st.radius_of(&p)?;
            csv.row(&[chart.to_string(), float(r), float(p.coords[3]), float(res), float(defect)]);
        }
        worst_all = worst_all.max(worst);
        charts.insert(
            chart.to_string(),
            json!({ "points": g.n_points, "max_einstein_residual": worst, "max_inverse_defect": inv, "pass": worst < g.residual_tol }),
        );
    }
    let mut sg = serde_json::Map::new();
    for h in horizons_of(&st) {
        sg.insert(horizon_name(h).into(), serde_json::to_value(surface_gravity_geom(&st, h, g.n_theta, g.fd_step, g.parallel_tol)?)?);
    }
    let report = json!({
        "params": st.params,
        "seed": ctx.seed,
        "fd_step": g.fd_step,
        "residual_tol": g.residual_tol,
        "charts": charts,
        "surface_gravity": sg,
        "pass": worst_all < g.residual_tol,
    });
    out.json("geometry_check.json", &report)?;
    out.csv("geometry_points.csv", csv)?;
    Ok(format!("max |Ric - Lambda g| = {worst_all:.3e} (tol {:.1e})", g.residual_tol))
}

pub fn gnc_check(ctx: &Context, out: &mut Emitter) -> Result<String, CliError> {
    let g = &ctx.cfg.geometry;
    let st = ctx.cfg.spacetime()?;
    let thetas = interior_thetas(g.n_theta);
    let mut csv = Csv::new(&["horizon", "theta", "s", "x0", "x1", "x2", "x3", "v0", "v1", "v2", "v3"]);
    let mut per = serde_json::Map::new();
    let mut worst = 0.0f64;
    for h in horizons_of(&st) {
        let nf = normal_form_check(&st, h, &thetas, f64::INFINITY)?;
        worst = worst.max(nf.max_violation).max(nf.max_violation_null_adapted);
        let mut frames = Vec::new();
        for &th in &[0.25 * PI, 0.5 * PI, 0.75 * PI] {
            let f = geodesic_normalize(&st, h, th, g.geodesic_window, Transversal::NullAdapted, OdeOptions::default())?;
            for s in &f.samples {
                let mut row = vec![horizon_name(h).to_string(), float(th), float(s.s)];
                row.extend(s.x.iter().chain(&s.v).map(|&v| float(v)));
                csv.row(&row);
            }
            frames.push(json!({
                "theta": th,
                "window": f.window,
                "null_drift": f.null_drift,
                "w_pairing": f.w_pairing,
                "w_pairing_drift": f.w_pairing_drift,
                "jacobi_pairing": f.jacobi_pairing,
                "jacobi_pairing_drift": f.jacobi_pairing_drift,
                "killing_drift": f.killing_drift,
            }));
        }
        per.insert(
            horizon_name(h).into(),
            json!({
                "r": nf.r_h,
                "omega": nf.omega,
                "kappa_chart": nf.kappa_chart,
                "kappa_chart_spread": nf.kappa_chart_spread,
                "g01_sign": nf.g01_sign,
                "max_violation": nf.max_violation,
                "max_violation_null_adapted": nf.max_violation_null_adapted,
                "max_shift": nf.max_shift,
                "shift_closed_form_error": nf.shift_closed_form_error,
                "lower_block_min_eig": nf.lower_block_min_eig,
                "psi": nf.samples.iter().map(|s| json!({ "theta": s.theta, "psi": s.psi })).collect::<Vec<_>>(),
                "geodesic_frames": frames,
            }),
        );
    }
    let misner = misner_summary(ctx.seed)?;
    let report = json!({
        "params": st.params,
        "normal_form_tol": g.normal_form_tol,
        "horizons": per,
        "misner": misner,
        "pass": worst < g.normal_form_tol,
    });
    out.json("gnc_check.json", &report)?;
    out.csv("geodesic_frames.csv", csv)?;
    Ok(format!("max normal-form violation {worst:.3e} (tol {:.1e})", g.normal_form_tol))
}

/// Misner-model reduction on random cubic polynomials against both lower-order forms.
fn misner_summary(seed: u64) -> Result<Value, CliError> {
    let grid = TensorGrid::new(&[(-0.5, 0.5), (-1.0, 1.0), (-1.0, 1.0)], &[7, 6, 6])?;
    let mut coeffs = Halton::new(2, seed.wrapping_add(17));
    let mut freqs = Halton::new(2, seed.wrapping_add(23));
    let (mut displayed, mut derived) = (0.0f64, 0.0f64);
    for _ in 0..8 {
        let f = freqs.next_in(&[(-1.0, 1.0), (-0.5, 0.5)]);
        let model = MisnerModel::new(4, Complex64::new(f[0], f[1]))?;
        let poly = MultiPoly::quasi_random(3, 3, &mut coeffs);
        let chk = misner_cross_check(&model, &grid, std::slice::from_ref(&poly))?;
        displayed = displayed.max(chk.max_diff_displayed);
        derived = derived.max(chk.max_diff_derived);
    }
    Ok(json!({ "max_diff_zeroth_order_sigma": displayed, "max_diff_first_order_sigma": derived }))
}

pub fn radial_points(ctx: &Context, out: &mut Emitter) -> Result<String, CliError> {
    let g = &ctx.cfg.geometry;
    let st = ctx.cfg.spacetime()?;
    let thetas = interior_thetas(g.n_theta);
    let mut csv = Csv::new(&["horizon", "tau", "t", "x1", "xi1", "p"]);
    let mut per = serde_json::Map::new();
    let mut summary = Vec::new();
    for h in horizons_of(&st) {
        let nf = normal_form_check(&st, h, &thetas, f64::INFINITY)?;
        let kc = nf.kappa_chart;
        let rep = radial_point_check(&st, h, g.radial_samples, kc, g.radial_tol)?;
        let con = conormal_check(&st, h, g.conormal_grid, g.conormal_grid, g.conormal_tol)?;
        let x1 = match rep.classification {
            Classification::Sink => g.flow_x1_sink,
            Classification::Source => g.flow_x1_source,
        };
        let flow = flow_bicharacteristic(&st, &perturbed_conormal(h, x1, 0.4, 1.0, 1.0, g.flow_eta), &FlowOptions::for_horizon(&st, kc))?;
        for s in &flow.samples {
            let p = principal_symbol(&st, &CotangentPoint::new(h, s.x, s.xi))?;
            csv.row(&[horizon_name(h).into(), float(s.tau), float(s.t), float(s.x[0]), float(s.xi[0]), float(p)]);
        }
        let r_h = st.horizon_radius(h)?;
        let signature: Vec<Value> = [-1e-3, 0.0, 1e-3]
            .iter()
            .map(|d| {
                let r = r_h + d * r_h;
                json!({ "r": r, "signature": symbol_signature(&st.params, r, 0.5 * PI) })
            })
            .collect();
        summary.push(format!("{} {:?} rate {:+.4}", horizon_name(h), rep.classification, flow.x1_rate));
        per.insert(
            horizon_name(h).into(),
            json!({
                "kappa_chart": kc,
                "normal_form_max_violation": nf.max_violation,
                "normal_form_max_violation_null_adapted": nf.max_violation_null_adapted,
                "classification": rep.classification,
                "radial_max_rel_error": rep.max_rel_error,
                "radial_max_base_component": rep.max_base_component,
                "radial_max_angular_fiber_component": rep.max_angular_fiber_component,
                "conormal_points": con.points,
                "conormal_violations": con.violations,
                "conormal_max_symbol": con.max_conormal_symbol,
                "min_angular_constant": con.min_angular_constant,
                "flow": {
                    "x1_start": x1,
                    "eta": g.flow_eta,
                    "x1_rate": flow.x1_rate,
                    "expected_x1_rate": 2.0 * kc.abs(),
                    "angular_rate": flow.angular_rate,
                    "fiber_rate": flow.fiber_rate,
                    "p_drift": flow.p_drift,
                    "approaches": flow.approaches,
                    "stopped_early": flow.stopped_early,
                    "samples": flow.samples.len(),
                },
                "signature_near_horizon": signature,
            }),
        );
    }
    let report = json!({ "params": st.params, "radial_tol": g.radial_tol, "horizons": per });
    out.json("radial_points.json", &report)?;
    out.csv("trajectories.csv", csv)?;
    Ok(summary.join("; "))
}

/// Problem and spectrum for every configured azimuthal number.
fn solve_all(cfg: &RunConfig) -> Result<(Spacetime, Vec<(ModeProblem, QnmResult)>), CliError> {
    let st = cfg.spacetime()?;
    st.r_c()?;
    let op = cfg.op();
    let mut runs = Vec::new();
    for &k in &cfg.solver.k {
        let grid = cfg.grid(&st, k)?;
        let problem = assemble_reduced_operator(&st, &op, &grid, cfg.frame())?;
        let res = qnm_solve(&problem, &cfg.window(), &cfg.solve_options())?;
        runs.push((problem, res));
    }
    Ok((st, runs))
}

/// Decay fits of one mode on both horizons' intervals.
fn mode_fits(cfg: &RunConfig, problem: &ModeProblem, ef: &Eigenfunction) -> Result<Vec<(Horizon, DecayFit)>, CliError> {
    let an = &cfg.analyticity;
    let st = &problem.spacetime;
    let mut fits = Vec::new();
    for (h, margin) in [(Horizon::Event, problem.grid.c1), (Horizon::Cosmological, problem.grid.c2)] {
        let delta = an.delta.unwrap_or(0.5 * margin);
        fits.push((h, analyticity_fit(ef, st.horizon_radius(h)?, delta, an.theta, an.n_cheb, an.slope_min)?));
    }
    Ok(fits)
}

const FIT_HEADER: [&str; 13] = [
    "k", "mode", "horizon", "lo", "hi", "slope", "r_squared", "rss_linear", "rss_root", "significant", "resolved", "noise_floor", "verdict",
];

fn fit_row(k: i32, mode: usize, h: Horizon, f: &DecayFit) -> Vec<String> {
    vec![
        k.to_string(),
        mode.to_string(),
        horizon_name(h).into(),
        float(f.interval.0),
        float(f.interval.1),
        float(f.slope),
        float(f.r_squared),
        float(f.rss_linear),
        float(f.rss_root),
        f.significant.to_string(),
        f.resolved.to_string(),
        float(f.noise_floor),
        verdict_name(f.verdict).into(),
    ]
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::AnalyticConsistent => "analytic_consistent",
        Verdict::Inconclusive => "inconclusive",
        Verdict::NonAnalyticFlagged => "non_analytic_flagged",
    }
}

pub fn qnm(ctx: &Context, out: &mut Emitter) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let (st, runs) = solve_all(cfg)?;
    let mut spectrum = Csv::new(&["k", "re_sigma", "im_sigma", "residual", "agreement"]);
    let mut fits = Csv::new(&FIT_HEADER);
    let mut per_k = Vec::new();
    let mut total = 0;
    for (problem, res) in &runs {
        let k = res.k;
        for (i, mode) in res.modes.iter().enumerate() {
            spectrum.row(&[k.to_string(), float(mode.sigma.re), float(mode.sigma.im), float(mode.residual), float(mode.agreement)]);
            let ef = Eigenfunction::from_mode(problem, mode)?;
            let mut grid = Csv::new(&["r", "theta", "re_v", "im_v"]);
            for (ir, &r) in ef.r.iter().enumerate() {
                for (jx, &x) in ef.x.iter().enumerate() {
                    let th = x.acos();
                    let v = ef.w[ir * ef.x.len() + jx] * th.sin().powi(ef.m as i32);
                    grid.floats(&[r, th, v.re, v.im]);
                }
            }
            out.csv(&format!("eigenfunction_k{k}_{i}.csv"), grid)?;
            for (h, f) in mode_fits(cfg, problem, &ef)? {
                fits.row(&fit_row(k, i, h, &f));
            }
        }
        total += res.modes.len();
        per_k.push(json!({
            "k": k,
            "grid": problem.grid,
            "frame_omega": problem.omega,
            "candidates": res.candidates,
            "modes": res.modes.iter().map(|m| json!({
                "sigma": m.sigma,
                "refined_sigma": m.refined_sigma,
                "residual": m.residual,
                "refined_residual": m.refined_residual,
                "agreement": m.agreement,
                "parity": m.parity,
            })).collect::<Vec<_>>(),
        }));
    }
    let oracle = if st.params.a == 0.0 { Some(oracle_comparison(cfg, &st, &runs)?) } else { None };
    let report = json!({
        "params": st.params,
        "window": cfg.window(),
        "spectra": per_k,
        "oracle": oracle,
    });
    out.csv("spectrum.csv", spectrum)?;
    out.csv("decay_fits.csv", fits)?;
    out.json("qnm.json", &report)?;
    let mut msg = format!("{total} modes over k = {:?}", cfg.solver.k);
    if let Some(o) = oracle {
        msg.push_str(&format!("; oracle max |sigma_2D - sigma_1D| = {:.3e}", o["max_diff"].as_f64().unwrap_or(f64::NAN)));
    }
    Ok(msg)
}

/// Separated-problem spectra for `l <= oracle_l_max` against the 2-D spectra with `|k| <= l`.
fn oracle_comparison(cfg: &RunConfig, st: &Spacetime, runs: &[(ModeProblem, QnmResult)]) -> Result<Value, CliError> {
    let op = cfg.op();
    let window = cfg.window();
    let mut per_l = Vec::new();
    let mut worst = 0.0f64;
    for l in 0..=cfg.solver.oracle_l_max {
        let Some((problem, _)) = runs.iter().find(|(_, r)| r.k.unsigned_abs() <= l) else { continue };
        let modes = separated_oracle(st, &op, l, &window, cfg.solver.n_r, problem.grid.c1, problem.grid.c2)?;
        let mut diffs = Vec::new();
        for (_, res) in runs.iter().filter(|(_, r)| r.k.unsigned_abs() <= l) {
            for m in &modes {
                let d = res.modes.iter().map(|w| (w.sigma - m.sigma).norm()).fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
                diffs.push(json!({ "k": res.k, "sigma": m.sigma, "nearest_distance": d }));
            }
        }
        per_l.push(json!({ "l": l, "modes": modes, "comparisons": diffs }));
    }
    Ok(json!({ "per_l": per_l, "max_diff": worst }))
}

pub fn analyticity(ctx: &Context, out: &mut Emitter) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let an = &cfg.analyticity;
    let (st, runs) = solve_all(cfg)?;
    let mut fits = Csv::new(&FIT_HEADER);
    let mut coeffs = Csv::new(&["k", "mode", "horizon", "n", "abs_coefficient"]);
    let (mut consistent, mut inconclusive, mut flagged) = (0usize, 0usize, 0usize);
    let mut worst_slope = f64::NEG_INFINITY;
    for (problem, res) in &runs {
        for (i, mode) in res.modes.iter().enumerate() {
            let ef = Eigenfunction::from_mode(problem, mode)?;
            for (h, f) in mode_fits(cfg, problem, &ef)? {
                match f.verdict {
                    Verdict::AnalyticConsistent => consistent += 1,
                    Verdict::Inconclusive => inconclusive += 1,
                    Verdict::NonAnalyticFlagged => flagged += 1,
                }
                worst_slope = worst_slope.max(f.slope);
                fits.row(&fit_row(res.k, i, h, &f));
                for (n, c) in f.coefficients.iter().enumerate() {
                    coeffs.row(&[res.k.to_string(), i.to_string(), horizon_name(h).into(), n.to_string(), float(*c)]);
                }
            }
        }
    }
    // A smooth function with every derivative zero at `r_e` must not pass as analytic there.
    let re = st.r_e();
    let delta = an.delta.unwrap_or(0.5 * runs[0].0.grid.c1);
    let bump = |r: f64| Complex64::from(if r > re { (-delta / (r - re)).exp() } else { 0.0 });
    let control = chebyshev_decay(bump, re - delta, re + delta, an.n_cheb, an.slope_min);
    for (n, c) in control.coefficients.iter().enumerate() {
        coeffs.row(&["control".into(), "0".into(), "event".into(), n.to_string(), float(*c)]);
    }
    let total = consistent + inconclusive + flagged;
    let report = json!({
        "params": st.params,
        "n_cheb": an.n_cheb,
        "slope_min": an.slope_min,
        "theta": an.theta,
        "intervals": total,
        "analytic_consistent": consistent,
        "inconclusive": inconclusive,
        "non_analytic_flagged": flagged,
        "worst_slope": if total > 0 { Some(worst_slope) } else { None },
        "control_bump": {
            "verdict": control.verdict,
            "slope": control.slope,
            "r_squared": control.r_squared,
            "rejected": control.verdict != Verdict::AnalyticConsistent,
        },
    });
    out.json("analyticity.json", &report)?;
    out.csv("analyticity_fits.csv", fits)?;
    out.csv("analyticity_coefficients.csv", coeffs)?;
    Ok(format!("{consistent}/{total} intervals analytic-consistent; control bump {}", verdict_name(control.verdict)))
}
