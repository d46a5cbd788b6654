use cride::fields::{inverse_transform, GridSpec, SpectralField};
use cride::presets::Preset;
use cride::stepper::{
    adaptive_step, resample_to_grid, step, suggest_step, FlowState, ResampleOptions, StepConfig,
};
use cride::taylor::radius_from_norms;

fn grid(n: usize) -> GridSpec {
    GridSpec::with_two_thirds(n).unwrap()
}

fn values(q: [f64; 3]) -> [f64; 3] {
    [q[0].sin() + (q[1] + q[2]).cos(), (2.0 * q[1]).sin(), q[0].cos() * q[2].sin()]
}

#[test]
fn sheared_map_has_closed_form_inverse() {
    // x = q + (0.1 sin q2, 0, 0)  =>  q = (x1 - 0.1 sin x2, x2, x3)
    let g = grid(16);
    let xi = SpectralField::vector_from_fn(g, |q| [0.1 * q[1].sin(), 0.0, 0.0]);
    let f = SpectralField::vector_from_fn(g, values);
    let out = resample_to_grid(&xi, &f, &ResampleOptions::default()).unwrap();
    let mut err = 0.0_f64;
    for p in 0..g.len() {
        let x = g.point(p);
        let want = values([x[0] - 0.1 * x[1].sin(), x[1], x[2]]);
        for c in 0..3 {
            err = err.max((out.values.component(c)[p] - want[c]).abs());
        }
    }
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn kepler_map_inverse() {
    // x1 = q1 + 0.1 sin q1 is inverted by a scalar Newton solve per point.
    let g = grid(16);
    let xi = SpectralField::vector_from_fn(g, |q| [0.1 * q[0].sin(), 0.0, 0.0]);
    let f = SpectralField::vector_from_fn(g, values);
    let out = resample_to_grid(&xi, &f, &ResampleOptions::default()).unwrap();
    let mut err = 0.0_f64;
    for p in 0..g.len() {
        let x = g.point(p);
        let mut q1 = x[0];
        for _ in 0..30 {
            q1 -= (q1 + 0.1 * q1.sin() - x[0]) / (1.0 + 0.1 * q1.cos());
        }
        let want = values([q1, x[1], x[2]]);
        for c in 0..3 {
            err = err.max((out.values.component(c)[p] - want[c]).abs());
        }
    }
    assert!(err <= 1e-8, "{err}");
}

#[test]
fn newton_polish_rescues_slow_contraction() {
    // Contraction factor 0.9: fifty plain iterations leave ~5e-3.
    let g = grid(16);
    let xi = SpectralField::vector_from_fn(g, |q| [0.9 * q[0].sin(), 0.0, 0.0]);
    let f = SpectralField::vector_from_fn(g, values);
    let out = resample_to_grid(&xi, &f, &ResampleOptions::default()).unwrap();
    assert!(out.worst_residual <= 1e-12);
    let strict = ResampleOptions {
        newton_iterations: 0,
        ..ResampleOptions::default()
    };
    assert!(resample_to_grid(&xi, &f, &strict).is_err());
}

#[test]
fn shear_flow_is_steady_under_stepping() {
    let v0 = Preset::Shear.velocity(grid(16));
    let state = FlowState::new(v0.clone(), 0.0).unwrap();
    let config = StepConfig::default();
    let mut s = state;
    for h in [0.5, 1.0] {
        s = step(&s, h, &config).unwrap();
    }
    assert!((s.time - 1.5).abs() < 1e-15);
    assert!(s.velocity().max_difference(&v0).unwrap() <= 1e-10);
}

#[test]
fn step_size_from_radius() {
    let r: f64 = 0.8;
    let norms: Vec<f64> = (1..=16).map(|s| r.powi(-s)).collect();
    let h = suggest_step(radius_from_norms(&norms), 0.5, 10.0);
    assert!((h - 0.4).abs() <= 0.004);
    assert_eq!(suggest_step(f64::INFINITY, 0.5, 0.3), 0.3);

    let state = FlowState::new(Preset::TaylorGreen.velocity(grid(32)), 0.0).unwrap();
    let h12 = adaptive_step(&state, &StepConfig { h_max: 10.0, ..StepConfig::default() }).unwrap();
    let h20 = adaptive_step(
        &state,
        &StepConfig {
            order: 20,
            h_max: 10.0,
            ..StepConfig::default()
        },
    )
    .unwrap();
    assert!(h12 > 0.0 && (h12 - h20).abs() <= 0.1 * h20, "{h12} {h20}");
}

#[test]
fn states_reject_compressible_velocity() {
    let g = grid(16);
    let v = SpectralField::vector_from_fn(g, |q| [q[0].cos(), 0.0, 0.0]);
    assert!(FlowState::new(v, 0.0).is_err());
}

#[test]
fn stepped_taylor_green_conserves_energy() {
    let v0 = Preset::TaylorGreen.velocity(grid(16));
    let state = FlowState::new(v0, 0.0).unwrap();
    let next = step(&state, 0.1, &StepConfig::default()).unwrap();
    let drift = (next.diagnostics.energy - state.diagnostics.energy).abs() / state.diagnostics.energy;
    assert!(drift <= 1e-9, "{drift}");
    assert_eq!(next.diagnostics.steps, 1);
    assert!(next.diagnostics.radius_estimate.is_finite());
    // vorticity diagnostic matches a fresh computation
    let w = inverse_transform(&cride::fields::curl(next.velocity()).unwrap()).max_abs();
    assert_eq!(w, next.diagnostics.max_vorticity);
}
