use nalgebra::Matrix2;

use kdsqnm::geometry::charts::Horizon;
use kdsqnm::geometry::Spacetime;
use kdsqnm::microlocal::{
    conormal_check, flow_bicharacteristic, hamiltonian_field, perturbed_conormal, principal_symbol, quotient_inverse,
    radial_point_check, Classification, CotangentPoint, FlowOptions,
};

fn kappa_chart(st: &Spacetime, h: Horizon) -> f64 {
    let r = st.horizon_radius(h).unwrap();
    let p = &st.params;
    -p.dmu(r) / (2.0 * p.b() * (r * r + p.a * p.a))
}

#[test]
fn angular_constant_agrees_with_a_dense_direction_search() {
    let st = Spacetime::from_values(0.3, 1.0, 0.05).unwrap();
    for h in [Horizon::Event, Horizon::Cosmological] {
        let report = conormal_check(&st, h, 32, 32, 1e-10).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.min_angular_constant > 0.0);
        for j in 0..16 {
            let x3 = 0.05 + 3.0 * j as f64 / 15.0;
            let mut dense = f64::INFINITY;
            for q in 0..3600 {
                let phi = std::f64::consts::PI * q as f64 / 3600.0;
                let pt = CotangentPoint::new(h, [0.0, 0.8, x3], [0.0, phi.cos(), phi.sin()]);
                dense = dense.min(principal_symbol(&st, &pt).unwrap());
            }
            let g = quotient_inverse(&st, h, &[0.0, 0.8, x3]).unwrap();
            let block = Matrix2::new(g[(1, 1)], g[(1, 2)], g[(2, 1)], g[(2, 2)]);
            let ev = block.symmetric_eigenvalues();
            let eig = ev[0].min(ev[1]);
            assert!(dense > 0.0);
            assert!((dense - eig).abs() <= 1e-5 * eig, "{h:?} theta {x3}: {dense} vs {eig}");
            assert!(eig >= report.min_angular_constant * (1.0 - 1e-9) || x3 < 0.1 || x3 > 3.0);
        }
    }
}

#[test]
fn horizons_carry_opposite_radial_classifications() {
    let st = Spacetime::from_values(0.3, 1.0, 0.05).unwrap();
    let ev = radial_point_check(&st, Horizon::Event, 32, kappa_chart(&st, Horizon::Event), 1e-6).unwrap();
    let co = radial_point_check(&st, Horizon::Cosmological, 32, kappa_chart(&st, Horizon::Cosmological), 1e-6).unwrap();
    assert_eq!(ev.classification, Classification::Sink);
    assert_eq!(co.classification, Classification::Source);
    assert!(ev.max_rel_error < 1e-6 && co.max_rel_error < 1e-6);
}

#[test]
fn conormal_bundle_is_invariant() {
    let st = Spacetime::from_values(0.3, 1.0, 0.05).unwrap();
    for h in [Horizon::Event, Horizon::Cosmological] {
        let kc = kappa_chart(&st, h);
        let mut opts = FlowOptions::for_horizon(&st, kc);
        opts.tau_max = 4.0 / kc.abs();
        let res = flow_bicharacteristic(&st, &perturbed_conormal(h, 0.0, 0.3, 1.1, 1.0, 0.0), &opts).unwrap();
        for s in &res.samples {
            assert!(s.x[0].abs() < 1e-10, "{h:?}: x1 = {}", s.x[0]);
            assert!(s.xi[1].abs().max(s.xi[2].abs()) < 1e-10 * s.xi[0].abs());
        }
    }
}

#[test]
fn schwarzschild_normal_rate_matches_the_linearised_field() {
    let st = Spacetime::from_values(0.0, 1.0, 0.0).unwrap();
    let h = Horizon::Event;
    let kc = kappa_chart(&st, h);
    assert!((kc + 0.25).abs() < 1e-14);

    // d(x1-dot)/dx1 of H_p / (2 |xi1|) at the conormal point.
    let d = 1e-5;
    let field = |x1: f64| hamiltonian_field(&st, &CotangentPoint::new(h, [x1, 0.0, 1.2], [1.0, 0.0, 0.0]), 1e-3).unwrap()[0] / 2.0;
    let jac = (field(d) - field(-d)) / (2.0 * d);
    assert!((jac + 2.0 * kc.abs()).abs() < 1e-3 * 2.0 * kc.abs(), "{jac}");

    let opts = FlowOptions::for_horizon(&st, kc);
    let res = flow_bicharacteristic(&st, &perturbed_conormal(h, 1e-4, 0.0, 1.2, 1.0, 0.0), &opts).unwrap();
    assert!((res.x1_rate - jac).abs() < 0.1 * jac.abs(), "{} vs {jac}", res.x1_rate);
    assert!(res.approaches);
}
