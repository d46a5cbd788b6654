use cride::fields::{
    gradient, inverse_transform, project_samples, GridSpec, Rank, SpectralField,
};
use cride::presets::{random_solenoidal, Preset};
use cride::taylor::TaylorSeries;

fn grid(n: usize) -> GridSpec {
    GridSpec::with_two_thirds(n).unwrap()
}

/// `g[i][j] = ∂_i f_j` sampled on the grid, via per-component gradients.
fn grad_samples(f: &SpectralField) -> [[Vec<f64>; 3]; 3] {
    let per_comp: Vec<_> = (0..3)
        .map(|j| inverse_transform(&gradient(&f.scalar_component(j)).unwrap()))
        .collect();
    std::array::from_fn(|i| std::array::from_fn(|j| per_comp[j].component(i).to_vec()))
}

#[test]
fn second_order_right_sides_for_taylor_green() {
    let g = grid(32);
    let series = TaylorSeries::build(&Preset::TaylorGreen.velocity(g), 1).unwrap();
    // Σ_k ∇v_k × ∇v_k vanishes identically.
    assert!(series.curl_rhs(2).unwrap().max_amplitude() < 1e-15);
    let want = SpectralField::scalar_from_fn(g, |q| {
        0.25 * ((2.0 * q[0]).cos() + (2.0 * q[1]).cos()) * ((2.0 * q[2]).cos() + 1.0)
    });
    let err = series.div_rhs(2).unwrap().max_difference(&want).unwrap();
    assert!(err < 1e-14, "{err}");
}

#[test]
fn third_order_divergence_matches_brute_force() {
    // Band-limited input on |k_i| <= 2 keeps every product alias-free on n = 32.
    let g = grid(32);
    let v0 = random_solenoidal(g, 17, 2);
    let series = TaylorSeries::build(&v0, 2).unwrap();
    let d1 = grad_samples(series.coefficient(1));
    let d2 = grad_samples(series.coefficient(2));
    let grads = [&d1, &d2];
    let perms: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([0, 2, 1], -1.0),
        ([2, 1, 0], -1.0),
        ([1, 0, 2], -1.0),
    ];
    let mut acc = vec![0.0; g.len()];
    for p in 0..g.len() {
        let mut sum = 0.0;
        for n in 1..3 {
            let (a, b) = (grads[n - 1], grads[3 - n - 1]);
            for i in 0..3 {
                for j in (i + 1)..3 {
                    sum += a[j][i][p] * b[i][j][p] - a[i][i][p] * b[j][j][p];
                }
            }
        }
        for ([i, j, k], sign) in perms {
            sum -= sign * d1[i][0][p] * d1[j][1][p] * d1[k][2][p];
        }
        acc[p] = sum;
    }
    let want = project_samples(g, Rank::Scalar, &[acc]).unwrap();
    let got = series.div_rhs(3).unwrap();
    let err = got.max_difference(&want).unwrap() / want.max_amplitude();
    assert!(err < 1e-12, "{err}");
}

#[test]
fn recursion_is_satisfied_order_by_order() {
    let series = TaylorSeries::build(&Preset::TaylorGreen.velocity(grid(32)), 8).unwrap();
    for s in 1..=8 {
        let (c, d) = series.recursion_residual(s).unwrap();
        assert!(c <= 1e-10 && d <= 1e-10, "s = {s}: {c:e} {d:e}");
    }
    let abc = TaylorSeries::build(&Preset::Abc.velocity(grid(16)), 6).unwrap();
    for s in 1..=6 {
        let (c, d) = abc.recursion_residual(s).unwrap();
        assert!(c <= 1e-10 && d <= 1e-10, "abc s = {s}: {c:e} {d:e}");
    }
}

#[test]
fn reversing_the_velocity_alternates_coefficient_signs() {
    let g = grid(16);
    let v0 = random_solenoidal(g, 3, 3);
    let fwd = TaylorSeries::build(&v0, 6).unwrap();
    let back = TaylorSeries::build(&v0.scaled(-1.0), 6).unwrap();
    for s in 1..=6 {
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        let diff = back
            .coefficient(s)
            .max_difference(&fwd.coefficient(s).scaled(sign))
            .unwrap();
        assert!(diff <= 1e-13 * fwd.coefficient(s).max_amplitude().max(1.0), "s = {s}");
    }
}

#[test]
fn truncation_converges_for_small_times() {
    let v0 = Preset::TaylorGreen.velocity(grid(32));
    let mut series = TaylorSeries::build(&v0, 16).unwrap();
    let x16 = series.evaluate(0.1);
    while series.order() < 20 {
        series.next_coefficient().unwrap();
    }
    let x20 = series.evaluate(0.1);
    assert!(x16.displacement.max_difference(&x20.displacement).unwrap() <= 1e-10);
    assert!(x16.velocity.max_difference(&x20.velocity).unwrap() <= 1e-9);
}

#[test]
fn shear_flow_is_exactly_linear_in_time() {
    let v0 = Preset::Shear.velocity(grid(32));
    let series = TaylorSeries::build(&v0, 10).unwrap();
    for t in [0.3, 1.0, 5.0] {
        assert!(series.jacobian(t).max_det_error() <= 1e-14);
    }
    assert!(series.cauchy_invariant_residual(1.0) <= 1e-12);
    let seeds = [[0.1, 0.2, 0.3], [1.0, 2.5, 4.0], [6.0, 0.7, 3.3]];
    let t = 0.8;
    for (x, q) in series.positions_at(&seeds, t).unwrap().iter().zip(&seeds) {
        assert!((x[0] - (q[0] + t * q[1].sin())).abs() < 1e-13);
        assert!((x[1] - q[1]).abs() < 1e-13 && (x[2] - q[2]).abs() < 1e-13);
    }
    assert_eq!(series.estimate_radius().unwrap(), f64::INFINITY);
}

#[test]
fn initial_time_invariants() {
    let series = TaylorSeries::build(&Preset::TaylorGreen.velocity(grid(16)), 6).unwrap();
    let jac = series.jacobian(0.0);
    assert_eq!(jac.max_det_error(), 0.0);
    for (e, m) in jac.matrix.iter().enumerate() {
        let want = if e % 4 == 0 { 1.0 } else { 0.0 };
        assert!(m.iter().all(|x| *x == want));
    }
    assert!(series.cauchy_invariant_residual(0.0) <= 1e-13);
}

#[test]
fn invariants_improve_with_order() {
    let v0 = Preset::TaylorGreen.velocity(grid(32));
    let mut series = TaylorSeries::build(&v0, 4).unwrap();
    let mut det = vec![series.jacobian(0.2).max_det_error()];
    let mut cauchy = vec![series.cauchy_invariant_residual(0.2)];
    for target in [8, 12] {
        while series.order() < target {
            series.next_coefficient().unwrap();
        }
        det.push(series.jacobian(0.2).max_det_error());
        cauchy.push(series.cauchy_invariant_residual(0.2));
    }
    assert!(det.windows(2).all(|w| w[1] < w[0]), "{det:?}");
    assert!(cauchy.windows(2).all(|w| w[1] < w[0]), "{cauchy:?}");
}
