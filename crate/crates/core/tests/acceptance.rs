//! End-to-end acceptance checks. Each test prints a single PASS/FAIL line
//! with the measured quantity, the threshold and the wall time.

use std::f64::consts::SQRT_2;
use std::time::{Duration, Instant};

use cride::bounds::{discriminant, p_roots, q_critical, zeta_curve};
use cride::fields::{GridSpec, SpectralField};
use cride::oracle::{
    compare_trajectories, euler_solve, integrate_trajectories, lattice_seeds,
    taylor_trajectories,
};
use cride::presets::Preset;
use cride::stepper::{adaptive_step, step, FlowState, StepConfig};
use cride::taylor::{radius_from_norms, TaylorSeries};

fn report(id: u32, name: &str, pass: bool, detail: String, elapsed: Duration, budget: Duration) -> bool {
    let pass = pass && elapsed <= budget;
    println!(
        "criterion {id:>2} {name}: {} ({detail}; {:.2} s of {:.0} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    pass
}

fn tg32() -> SpectralField {
    Preset::TaylorGreen.velocity(GridSpec::with_two_thirds(32).unwrap())
}

#[test]
fn c01_critical_q_at_unit_theta() {
    let start = Instant::now();
    let expected = 3.0 * SQRT_2 - 38.0 / 9.0;
    let err = (q_critical(1.0) - expected).abs();
    let ok = report(1, "Q_c(1) closed form", err <= 1e-12, format!("|err| = {err:.3e} <= 1e-12"), start.elapsed(), Duration::from_secs(1));
    assert!(ok);
}

#[test]
fn c02_critical_q_asymptotics() {
    let start = Instant::now();
    let theta = 1e4;
    let dev = (48.0 * theta * theta * q_critical(theta) - 1.0).abs();
    let ok = report(2, "Q_c large-theta asymptotics", dev <= 1e-3, format!("|48 theta^2 Q_c - 1| = {dev:.3e} <= 1e-3"), start.elapsed(), Duration::from_secs(1));
    assert!(ok);
}

#[test]
fn c03_discriminant_and_monotone_roots() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for theta in [0.5, 1.0, 10.0, 1e3] {
        let scaled = discriminant(theta, q_critical(theta)).abs() / (972.0 * theta.powi(6));
        worst = worst.max(scaled);
    }
    let mut monotone = true;
    for theta in [0.5, 1.0, 10.0] {
        let curve = zeta_curve(theta, 100).unwrap();
        for w in curve.windows(2) {
            monotone &= w[1].1 > w[0].1 && w[1].2 < w[0].2;
        }
        // the curve must stay in the three-real-root regime
        monotone &= p_roots(theta, curve[99].0).unwrap().three_real;
    }
    let ok = report(
        3,
        "discriminant at Q_c and root monotonicity",
        worst <= 1e-8 && monotone,
        format!("max |D|/(972 theta^6) = {worst:.3e} <= 1e-8, monotone = {monotone}"),
        start.elapsed(),
        Duration::from_secs(1),
    );
    assert!(ok);
}

#[test]
fn c04_shear_depletion() {
    let start = Instant::now();
    let v0 = Preset::Shear.velocity(GridSpec::with_two_thirds(32).unwrap());
    let series = TaylorSeries::build(&v0, 10).unwrap();
    let worst = (2..=10)
        .map(|s| series.coefficient(s).max_amplitude())
        .fold(0.0, f64::max);
    let ok = report(4, "shear depletion", worst <= 1e-12, format!("max_s>=2 |xi^(s)| = {worst:.3e} <= 1e-12"), start.elapsed(), Duration::from_secs(10));
    assert!(ok);
}

#[test]
fn c05_c06_unit_jacobian_and_cauchy_invariants() {
    let start = Instant::now();
    let v0 = tg32();
    let mut series = TaylorSeries::build(&v0, 8).unwrap();
    let mut det = Vec::new();
    let mut cauchy = Vec::new();
    for target in [8, 12, 16] {
        while series.order() < target {
            series.next_coefficient().unwrap();
        }
        det.push(series.jacobian(0.2).max_det_error());
        cauchy.push(series.cauchy_invariant_residual(0.2));
    }
    let elapsed = start.elapsed();
    let det_ok = det[2] <= 1e-6 && det[0] > det[1] && det[1] > det[2];
    let ok5 = report(
        5,
        "unit Jacobian, S = 8/12/16",
        det_ok,
        format!("max|det - 1| = {:.3e} / {:.3e} / {:.3e}, last <= 1e-6", det[0], det[1], det[2]),
        elapsed,
        Duration::from_secs(60),
    );
    let cauchy_ok = cauchy[2] <= 1e-6 && cauchy[0] > cauchy[1] && cauchy[1] > cauchy[2];
    let ok6 = report(
        6,
        "Cauchy invariants, S = 8/12/16",
        cauchy_ok,
        format!("residual = {:.3e} / {:.3e} / {:.3e}, last <= 1e-6", cauchy[0], cauchy[1], cauchy[2]),
        elapsed,
        Duration::from_secs(60),
    );
    assert!(ok5 && ok6);
}

#[test]
fn c07_second_coefficient_closed_form() {
    let start = Instant::now();
    let grid = GridSpec::with_two_thirds(32).unwrap();
    let series = TaylorSeries::build(&Preset::TaylorGreen.velocity(grid), 2).unwrap();
    // Hand-derived second-order displacement of the Taylor-Green flow: minus
    // half the pressure gradient with p = (cos 2q1 + cos 2q2)(cos 2q3 + 2)/16.
    let exact = SpectralField::vector_from_fn(grid, |q| {
        let (c1, c2, c3) = ((2.0 * q[0]).cos(), (2.0 * q[1]).cos(), (2.0 * q[2]).cos());
        [
            (c3 + 2.0) * (2.0 * q[0]).sin() / 16.0,
            (c3 + 2.0) * (2.0 * q[1]).sin() / 16.0,
            (c1 + c2) * (2.0 * q[2]).sin() / 16.0,
        ]
    });
    let rel = series.coefficient(2).max_difference(&exact).unwrap() / exact.max_amplitude();
    let ok = report(7, "xi^(2) closed form", rel <= 1e-10, format!("relative error = {rel:.3e} <= 1e-10"), start.elapsed(), Duration::from_secs(10));
    assert!(ok);
}

#[test]
fn c08_taylor_paths_match_eulerian_oracle() {
    let start = Instant::now();
    let v0 = tg32();
    let seeds = lattice_seeds(4);
    let history = euler_solve(&v0, 0.1, 0.0025).unwrap();
    let reference = integrate_trajectories(&history, &seeds).unwrap();
    let series = TaylorSeries::build(&v0, 16).unwrap();
    let taylor = taylor_trajectories(&series, &seeds, &reference.times).unwrap();
    let rows = compare_trajectories(&reference, &taylor).unwrap();
    let last = rows.last().unwrap();
    let ok = report(
        8,
        "Taylor vs Eulerian trajectories at t = 0.1",
        (last.t - 0.1).abs() < 1e-12 && last.max_rel_err <= 1e-6,
        format!("max relative error = {:.3e} <= 1e-6 (abs {:.3e})", last.max_rel_err, last.max_err),
        start.elapsed(),
        Duration::from_secs(300),
    );
    assert!(ok);
}

#[test]
fn c09_radius_estimate_stability() {
    let start = Instant::now();
    let mut series = TaylorSeries::build(&tg32(), 12).unwrap();
    let r12 = series.estimate_radius().unwrap();
    while series.order() < 20 {
        series.next_coefficient().unwrap();
    }
    let r20 = series.estimate_radius().unwrap();
    let spread = (r12 - r20).abs() / r20;
    let radius: f64 = 0.37;
    let norms: Vec<f64> = (1..=20).map(|s| radius.powi(-(s as i32))).collect();
    let synth = (radius_from_norms(&norms) - radius).abs() / radius;
    let ok = report(
        9,
        "radius estimate stability",
        spread <= 0.1 && synth <= 0.01,
        format!("R12 = {r12:.4}, R20 = {r20:.4}, spread = {spread:.3e} <= 0.1; synthetic error = {synth:.3e} <= 0.01"),
        start.elapsed(),
        Duration::from_secs(60),
    );
    assert!(ok);
}

#[test]
fn c10_restart_consistency_and_energy() {
    let start = Instant::now();
    // Ten steps capped at 0.1 stay within the time n = 32 resolves the flow.
    let config = StepConfig {
        order: 12,
        safety: 0.25,
        h_max: 0.1,
        ..StepConfig::default()
    };
    let state = FlowState::new(tg32(), 0.0).unwrap();
    let h = adaptive_step(&state, &config).unwrap();
    let bound = config.safety * TaylorSeries::build(state.velocity(), config.order)
        .unwrap()
        .estimate_radius()
        .unwrap();
    let two = step(&step(&state, h, &config).unwrap(), h, &config).unwrap();
    let one = step(&state, 2.0 * h, &config).unwrap();
    let restart = two.velocity().max_difference(one.velocity()).unwrap();

    let e0 = state.diagnostics.energy;
    let mut s = state.clone();
    for _ in 0..10 {
        let dt = adaptive_step(&s, &config).unwrap();
        s = step(&s, dt, &config).unwrap();
    }
    let drift = (s.diagnostics.energy - e0).abs() / e0;
    let ok = report(
        10,
        "restart consistency and energy drift",
        2.0 * h <= bound && restart <= 1e-5 && drift <= 1e-5,
        format!(
            "h = {h}, 2h <= safety * radius = {bound:.4}; |u_2h - u_hh| = {restart:.3e} <= 1e-5; energy drift over 10 steps to t = {:.2} = {drift:.3e} <= 1e-5",
            s.time
        ),
        start.elapsed(),
        Duration::from_secs(300),
    );
    assert!(ok);
}
