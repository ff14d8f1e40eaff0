use bose2d::asymptotics::{to_csv, BoundKind};
use bose2d::lower_bound::{optimize_lower_bound, ScheduleConstants};
use bose2d::upper_bound::{bound_at_b, optimize_b};
use bose2d::{run_sweep, solve_radial, GasParameters, RadialPotential, RunConfig};

#[test]
fn solve_then_bound_square_well() {
    let v = RadialPotential::square_well(4.0, 1.0).unwrap();
    let sol = solve_radial(&v, 1.0, 2).unwrap();
    let rho = 1e-30 / (sol.a() * sol.a());
    let gas = GasParameters::new(1.0, rho).unwrap();
    let up = optimize_b(&gas, &sol).unwrap();
    assert!(up.ratio > 1.0 && up.ratio < 1.1, "{}", up.ratio);
    for f in [0.5, 2.0] {
        let other = bound_at_b(&gas, &sol, up.b * f).unwrap();
        assert!(other.energy_per_particle >= up.energy_per_particle);
    }
}

#[test]
fn lower_bound_below_upper_where_feasible() {
    let v = RadialPotential::hard_disc(1.0).unwrap();
    let sol = solve_radial(&v, 1.0, 2).unwrap();
    let gas = GasParameters::new(1.0, 1e-300).unwrap();
    let lo = optimize_lower_bound(&gas, sol.ln_a(), 1.0, &ScheduleConstants::default()).unwrap();
    let up = optimize_b(&gas, &sol).unwrap();
    assert!(lo.valid);
    assert!(lo.energy_per_particle.unwrap() < up.energy_per_particle);
}

#[test]
fn config_driven_sweep() {
    let cfg = RunConfig::from_json(
        r#"{"potential": "ignored"}"#.replace("\"ignored\"", r#"{"kind":"square_well","height":1.0,"range":1.0}"#).as_str(),
    )
    .unwrap();
    let mut spec = cfg.sweep_spec().unwrap();
    spec.densities = vec![1e-10, 1e-40];
    spec.outputs = vec![BoundKind::Upper];
    let t = run_sweep(&spec).unwrap();
    assert!(t.rows.iter().all(|r| r.upper.is_some() && r.lower.is_none()));
    let csv = to_csv(&t);
    assert_eq!(csv, to_csv(&run_sweep(&spec).unwrap()));
}
