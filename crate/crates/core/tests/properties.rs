use nalgebra::Matrix4;
use num_complex::Complex64;
use proptest::prelude::*;

use kdsqnm::geometry::charts::{Chart, ChartPoint, Horizon};
use kdsqnm::geometry::ergosphere::{ergoregion_closed_form, ergoregion_numeric};
use kdsqnm::geometry::metric::{metric, metric_bl, metric_extended};
use kdsqnm::geometry::opspec::WaveOperatorSpec;
use kdsqnm::geometry::surface_gravity::{kappa_closed_form, surface_gravity_geom};
use kdsqnm::geometry::{SpacetimeParams, Spacetime};
use kdsqnm::gnc::normal_form_check;
use kdsqnm::microlocal::{
    flow_bicharacteristic, hamiltonian_field, perturbed_conormal, principal_symbol, symbol_signature, CotangentPoint,
    FlowOptions, Signature,
};
use kdsqnm::modes::{assemble_reduced_operator, chebyshev_decay, Frame, SpectralGrid, Verdict};

fn kds() -> impl Strategy<Value = Spacetime> {
    (0.6f64..1.5, 0.0f64..0.4, 0.005f64..0.06).prop_map(|(m, af, lm)| {
        Spacetime::from_values(af * m, m, lm / (m * m)).expect("subextremal by construction")
    })
}

fn kerr_or_kds() -> impl Strategy<Value = Spacetime> {
    prop_oneof![
        kds(),
        (0.6f64..1.5, 0.0f64..0.8).prop_map(|(m, af)| Spacetime::from_values(af * m, m, 0.0).unwrap())
    ]
}

fn horizons(st: &Spacetime) -> Vec<Horizon> {
    if st.has_cosmological_horizon() {
        vec![Horizon::Event, Horizon::Cosmological]
    } else {
        vec![Horizon::Event]
    }
}

/// A radius inside the chart, kept a tenth of the nearest horizon gap away from its ends.
fn radius_in(st: &Spacetime, chart: Chart, u: f64) -> f64 {
    let (lo, hi) = st.chart_r_range(chart).unwrap();
    let gap = match st.r_c() {
        Ok(rc) => (rc - st.r_e()).min(st.r_e() - st.horizons.r_inner),
        Err(_) => st.r_e() - st.horizons.r_inner,
    };
    let lo = lo + 0.1 * gap;
    let hi = if hi.is_finite() { hi - 0.1 * gap } else { lo + 6.0 * st.r_e() };
    lo + u * (hi - lo)
}

fn charts(st: &Spacetime) -> Vec<Chart> {
    let mut c = vec![Chart::BoyerLindquist, Chart::Star, Chart::Intermediate(Horizon::Event), Chart::Gnc(Horizon::Event)];
    if st.has_cosmological_horizon() {
        c.push(Chart::Intermediate(Horizon::Cosmological));
        c.push(Chart::Gnc(Horizon::Cosmological));
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_are_zeros_of_mu_and_strictly_ordered(st in kerr_or_kds()) {
        let roots = st.horizons.roots();
        let m = st.params.m;
        for r in &roots {
            prop_assert!(st.params.mu(*r).abs() <= 1e-12 * (m * m).max(1.0) * r.abs().max(1.0).powi(2));
        }
        for w in roots.windows(2) {
            prop_assert!(w[1] - w[0] > 1e-8);
        }
    }

    #[test]
    fn metric_times_inverse_is_identity(st in kerr_or_kds(), u in 0.0f64..1.0, th in 0.1f64..3.0, pick in 0usize..6) {
        let cs = charts(&st);
        let chart = cs[pick % cs.len()];
        let r = radius_in(&st, chart, u);
        let coords = match chart {
            Chart::Gnc(h) => [0.3, st.horizon_radius(h).unwrap() - r, 0.7, th],
            _ => [0.3, r, 0.7, th],
        };
        let e = metric(&st, &ChartPoint::new(chart, coords)).unwrap();
        let err = (e.g * e.g_inv - Matrix4::identity()).abs().max();
        prop_assert!(err < 1e-12 * e.g.abs().max().max(1.0) * e.g_inv.abs().max().max(1.0), "{chart}: {err}");
    }

    #[test]
    fn boyer_lindquist_and_star_agree_under_transport(st in kerr_or_kds(), u in 0.0f64..1.0, th in 0.1f64..3.0) {
        let r = radius_in(&st, Chart::BoyerLindquist, u);
        let (dd, de) = st.offset_derivs(Chart::BoyerLindquist, r);
        let mut j = Matrix4::identity();
        j[(0, 1)] = dd;
        j[(2, 1)] = de;
        let star = metric_extended(&st, Chart::Star, r, th).unwrap().g;
        let moved = j.transpose() * star * j;
        let bl = metric_bl(&st.params, r, th);
        prop_assert!((moved - bl).abs().max() < 1e-10 * bl.abs().max());
    }

    #[test]
    fn horizon_generator_is_null(st in kerr_or_kds(), th in 0.05f64..3.1) {
        for h in horizons(&st) {
            let r = st.horizon_radius(h).unwrap();
            let om = st.omega(h).unwrap();
            let g = metric_extended(&st, Chart::Star, r, th).unwrap().g;
            let w = nalgebra::Vector4::new(1.0, 0.0, om, 0.0);
            prop_assert!((w.transpose() * g * w)[(0, 0)].abs() < 1e-10);
        }
    }

    #[test]
    fn ergoregion_closed_form_matches_direct_search(m in 0.3f64..1.2, af in 0.0f64..1.3, lm in 0.0f64..0.2) {
        let p = SpacetimeParams::new(af * m, m, lm / (m * m)).unwrap();
        let beta = 1.0 - p.alpha();
        prop_assume!((beta.powi(3) - 9.0 * m * m * p.lambda).abs() > 1e-10);
        if Spacetime::new(p).is_ok() {
            let (numeric, _, gap) = ergoregion_numeric(&p).unwrap();
            prop_assume!(gap.map_or(true, |g| g.abs() > 1e-10));
            prop_assert_eq!(numeric, ergoregion_closed_form(&p));
        }
    }

    #[test]
    fn signature_follows_the_sign_of_mu(st in kds(), u in 0.02f64..0.98, th in 0.1f64..3.0) {
        let (re, rc) = (st.r_e(), st.r_c().unwrap());
        prop_assert_eq!(symbol_signature(&st.params, re + u * (rc - re), th), Signature::Elliptic);
        prop_assert_eq!(symbol_signature(&st.params, re - u * 0.5 * (re - st.horizons.r_inner), th), Signature::Lorentzian);
        prop_assert_eq!(symbol_signature(&st.params, rc + u, th), Signature::Lorentzian);
    }

    #[test]
    fn symbol_is_quadratic_in_the_covector(st in kds(), x1 in -0.05f64..0.05, x3 in 0.2f64..2.9,
                                           xi in proptest::array::uniform3(-2.0f64..2.0), lam in -3.0f64..3.0) {
        let pt = CotangentPoint::new(Horizon::Event, [x1, 0.4, x3], xi);
        let scaled = CotangentPoint::new(Horizon::Event, [x1, 0.4, x3], [lam * xi[0], lam * xi[1], lam * xi[2]]);
        let p = principal_symbol(&st, &pt).unwrap();
        let ps = principal_symbol(&st, &scaled).unwrap();
        prop_assert!((ps - lam * lam * p).abs() < 1e-12 * (1.0 + (lam * lam * p).abs()));
    }

    #[test]
    fn conjugation_maps_k_to_minus_k(st in kds(), k in 0i32..3, sr in -0.5f64..0.5, si in -0.2f64..0.2, mass in 0.0f64..0.4) {
        let op = WaveOperatorSpec::klein_gordon(mass);
        let gp = SpectralGrid::with_default_margins(&st, 16, 8, k).unwrap();
        let gm = SpectralGrid { k: -k, ..gp };
        let pp = assemble_reduced_operator(&st, &op, &gp, Frame::Star).unwrap();
        let pm = assemble_reduced_operator(&st, &op, &gm, Frame::Star).unwrap();
        let sigma = Complex64::new(sr, si);
        for (bp, bm) in pp.blocks.iter().zip(&pm.blocks) {
            let w: Vec<Complex64> = (0..bp.dim()).map(|i| Complex64::new((1.3 * i as f64).sin(), (0.7 * i as f64).cos())).collect();
            let wc: Vec<Complex64> = w.iter().map(|z| z.conj()).collect();
            let a = bp.apply(sigma, &w);
            let b = bm.apply(-sigma.conj(), &wc);
            let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.conj() - y).norm() < 1e-11 * scale);
            }
        }
    }

    #[test]
    fn horizon_frame_shifts_the_frequency(st in kds(), k in -2i32..3, sr in -0.5f64..0.5, si in -0.2f64..0.2) {
        let op = WaveOperatorSpec::wave();
        let grid = SpectralGrid::with_default_margins(&st, 16, 8, k).unwrap();
        let star = assemble_reduced_operator(&st, &op, &grid, Frame::Star).unwrap();
        for h in [Horizon::Event, Horizon::Cosmological] {
            let hor = assemble_reduced_operator(&st, &op, &grid, Frame::Horizon(h)).unwrap();
            let sigma = Complex64::new(sr, si);
            let sw = sigma + hor.omega * k as f64;
            for (bs, bh) in star.blocks.iter().zip(&hor.blocks) {
                let w: Vec<Complex64> = (0..bs.dim()).map(|i| Complex64::new((0.9 * i as f64).cos(), 0.1)).collect();
                let a = bs.apply(sigma, &w);
                let b = bh.apply(sw, &w);
                let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).norm() < 1e-11 * scale);
                }
            }
        }
    }

    #[test]
    fn polynomials_have_analytic_consistent_coefficients(deg in 0usize..12, lo in 0.5f64..3.0, w in 0.1f64..2.0,
                                                         c in proptest::collection::vec(-1.0f64..1.0, 12)) {
        let f = |r: f64| Complex64::from(c[..=deg].iter().rev().fold(0.0, |acc, ci| acc * r + ci) + 2.0);
        let fit = chebyshev_decay(f, lo, lo + w, 64, 0.05);
        prop_assert_eq!(fit.verdict, Verdict::AnalyticConsistent);
        prop_assert!(fit.slope <= -0.05);
        prop_assert!(fit.significant <= deg + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn surface_gravity_is_constant_and_matches_the_chart_value(st in kerr_or_kds()) {
        let thetas: Vec<f64> = (0..16).map(|j| 0.1 + 2.9 * j as f64 / 15.0).collect();
        for h in horizons(&st) {
            let geom = surface_gravity_geom(&st, h, 16, 1e-3, 1e-6).unwrap();
            let closed = kappa_closed_form(&st, h).unwrap();
            prop_assert!(geom.kappa_spread <= 1e-8 * geom.kappa.abs());
            prop_assert!((geom.kappa - closed).abs() <= 1e-6 * closed.abs());
            let nf = normal_form_check(&st, h, &thetas, 1e-10).unwrap();
            prop_assert!((nf.kappa_chart.abs() - geom.kappa.abs()).abs() <= 1e-6 * closed.abs());
            prop_assert!(nf.kappa_chart_spread <= 1e-8 * nf.kappa_chart.abs());
        }
    }

    #[test]
    fn radial_rate_on_the_conormal_bundle(st in kerr_or_kds(), x2 in 0.0f64..6.28, x3 in 0.1f64..3.0, xi1 in 0.2f64..3.0) {
        for h in horizons(&st) {
            let r = st.horizon_radius(h).unwrap();
            let kc = -st.params.dmu(r) / (2.0 * st.params.b() * (r * r + st.params.a * st.params.a));
            for s in [xi1, -xi1] {
                let hp = hamiltonian_field(&st, &CotangentPoint::conormal(h, x2, x3, s), 1e-3).unwrap();
                prop_assert!(hp[0].abs().max(hp[1].abs()).max(hp[2].abs()) < 1e-8 * s * s);
                prop_assert!(hp[4].abs().max(hp[5].abs()) < 1e-8 * s * s);
                prop_assert!((hp[3] - (-2.0 * kc * s * s)).abs() < 1e-6 * (2.0 * kc * s * s).abs());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn bicharacteristics_conserve_the_symbol(st in kds(), x3 in 0.3f64..2.8) {
        for h in [Horizon::Event, Horizon::Cosmological] {
            let r = st.horizon_radius(h).unwrap();
            let kc = -st.params.dmu(r) / (2.0 * st.params.b() * (r * r + st.params.a * st.params.a));
            let mut opts = FlowOptions::for_horizon(&st, kc);
            opts.tau_max = 3.0 / kc.abs();
            let res = flow_bicharacteristic(&st, &perturbed_conormal(h, 1e-5, 0.2, x3, 1.0, 1e-3), &opts).unwrap();
            prop_assert!(res.p_drift < 1e-8, "{}", res.p_drift);
            // (x(-s), -xi(-s)) is again an integral curve.
            let last = res.samples.last().unwrap();
            let mut back = opts;
            back.tau_max = last.tau;
            back.x1_max = f64::INFINITY;
            back.eta_max = f64::INFINITY;
            let rev = CotangentPoint::new(h, last.x, [-last.xi[0], -last.xi[1], -last.xi[2]]);
            let res2 = flow_bicharacteristic(&st, &rev, &back).unwrap();
            let end = res2.samples.last().unwrap();
            prop_assert!((end.x[0] - 1e-5).abs() < 1e-9);
            prop_assert_eq!(res.approaches, !res2.approaches);
        }
    }
}
