use kdsqnm_validation as v;

fn main() {
    let mut outcomes = vec![
        v::displayed_formula_fidelity(),
        v::vacuum_residual(),
        v::surface_gravity(),
        v::normal_form(),
        v::radial_points(),
        v::conormal_set(),
        v::misner_reduction(),
    ];
    for o in &outcomes {
        println!("{o}");
    }
    let runs = v::ModeRuns::compute();
    for o in [v::qnm_oracle(&runs), v::rotating_continuity(&runs), v::analyticity(&runs)] {
        println!("{o}");
        outcomes.push(o);
    }
    for o in [v::ergosphere(), v::joint_mode_shift(&runs)] {
        println!("{o}");
        outcomes.push(o);
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
