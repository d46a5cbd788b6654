use std::f64::consts::TAU;

use cride::fields::io::{decode_field, encode_field, read_field, write_field};
use cride::fields::{
    curl, dealiased_product, divergence, forward_transform, gradient, inverse_transform,
    laplacian, leray_project, BandEvaluator, GridSpec, Rank, RealField, SpectralField,
};
use cride::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random real field whose modes satisfy `max |k_i| <= kmax`.
fn random_field(grid: GridSpec, rank: Rank, kmax: i64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; rank.components()];
    for comp in &mut coeffs {
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                for k3 in -kmax..=kmax {
                    let idx = grid.index_of([k1, k2, k3]);
                    comp[idx] =
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                }
            }
        }
    }
    SpectralField::from_coeffs(grid, rank, coeffs).unwrap()
}

fn g(n: usize) -> GridSpec {
    GridSpec::with_two_thirds(n).unwrap()
}

#[test]
fn grid_construction() {
    assert_eq!(GridSpec::with_two_thirds(32).unwrap().cutoff(), 10);
    assert_eq!(GridSpec::new(8, 1.0).unwrap().cutoff(), 4);
    assert!(matches!(GridSpec::with_two_thirds(7), Err(Error::InvalidGrid(_))));
    assert!(GridSpec::new(16, 0.0).is_err());
    assert!(GridSpec::new(16, 1.5).is_err());
    // the Nyquist mode is never retained
    assert_eq!(GridSpec::new(8, 1.0).unwrap().band(), 3);
    // products of retained modes must not alias into the band
    let g24 = GridSpec::with_two_thirds(24).unwrap();
    assert_eq!((g24.cutoff(), g24.band()), (8, 7));
    assert_eq!(GridSpec::with_two_thirds(32).unwrap().band(), 10);
}

#[test]
fn constant_and_sine_coefficients() {
    let grid = g(16);
    let c = SpectralField::scalar_from_fn(grid, |_| 5.0);
    assert!((c.coeff(0, [0, 0, 0]) - Complex64::new(5.0, 0.0)).norm() < 1e-14);
    let rest = c.add_scaled(&SpectralField::scalar_from_fn(grid, |_| 5.0), -1.0).unwrap();
    assert!(rest.max_amplitude() < 1e-14);
    let mut others = 0.0_f64;
    for idx in 1..grid.len() {
        others = others.max(c.component(0)[idx].norm());
    }
    assert!(others < 1e-14);

    let s = SpectralField::scalar_from_fn(grid, |q| q[0].sin());
    assert!((s.coeff(0, [1, 0, 0]) - Complex64::new(0.0, -0.5)).norm() < 1e-14);
    assert!((s.coeff(0, [-1, 0, 0]) - Complex64::new(0.0, 0.5)).norm() < 1e-14);
}

#[test]
fn forward_transform_matches_direct_dft() {
    // O(N²) sum straight from the definition, independent of the FFT.
    let grid = GridSpec::new(8, 1.0).unwrap();
    let f = random_field(grid, Rank::Scalar, 3, 11);
    let samples = inverse_transform(&f);
    let n = grid.n() as f64;
    let mut worst = 0.0_f64;
    for k1 in -3..=3i64 {
        for k2 in -3..=3i64 {
            for k3 in -3..=3i64 {
                let mut sum = Complex64::new(0.0, 0.0);
                for p in 0..grid.len() {
                    let x = grid.point(p);
                    let phase = -(k1 as f64 * x[0] + k2 as f64 * x[1] + k3 as f64 * x[2]);
                    sum += Complex64::cis(phase) * samples.component(0)[p];
                }
                sum /= n * n * n;
                worst = worst.max((sum - f.coeff(0, [k1, k2, k3])).norm());
            }
        }
    }
    assert!(worst < 1e-13, "{worst}");
}

#[test]
fn transform_roundtrip() {
    let grid = g(32);
    let f = random_field(grid, Rank::Vector, 10, 5);
    let back = forward_transform(&inverse_transform(&f));
    assert!(back.max_difference(&f).unwrap() <= 1e-12);
}

#[test]
fn parseval() {
    let grid = g(16);
    let f = random_field(grid, Rank::Vector, 5, 9);
    let samples = inverse_transform(&f);
    let physical: f64 = samples
        .data()
        .iter()
        .flat_map(|c| c.iter())
        .map(|x| x * x)
        .sum::<f64>()
        / grid.len() as f64;
    assert!((physical - f.mean_square()).abs() <= 1e-12 * physical);
}

#[test]
fn analytic_derivatives() {
    let grid = g(16);
    let s = SpectralField::scalar_from_fn(grid, |q| q[0].sin());
    let want = SpectralField::vector_from_fn(grid, |q| [q[0].cos(), 0.0, 0.0]);
    assert!(gradient(&s).unwrap().max_difference(&want).unwrap() < 1e-14);

    let shear = SpectralField::vector_from_fn(grid, |q| [q[1].sin(), 0.0, 0.0]);
    let want = SpectralField::vector_from_fn(grid, |q| [0.0, 0.0, -q[1].cos()]);
    assert!(curl(&shear).unwrap().max_difference(&want).unwrap() < 1e-14);

    let s2 = SpectralField::scalar_from_fn(grid, |q| (2.0 * q[1]).sin());
    let want = SpectralField::scalar_from_fn(grid, |q| -4.0 * (2.0 * q[1]).sin());
    assert!(laplacian(&s2).max_difference(&want).unwrap() < 1e-13);
}

#[test]
fn gradient_matches_finite_differences() {
    let grid = g(64);
    let f = random_field(grid, Rank::Scalar, 3, 21);
    let samples = inverse_transform(&f);
    let grad = inverse_transform(&gradient(&f).unwrap());
    let n = grid.n();
    let h = grid.spacing();
    // sixth-order centred stencil
    let w = [(1, 3.0 / 4.0), (2, -3.0 / 20.0), (3, 1.0 / 60.0)];
    let data = samples.component(0);
    let mut err = 0.0_f64;
    for p in 0..grid.len() {
        let [i1, i2, i3] = grid.split_index(p);
        for axis in 0..3 {
            let mut d = 0.0;
            for &(m, c) in &w {
                let shift = |s: usize| {
                    let mut idx = [i1, i2, i3];
                    idx[axis] = (idx[axis] + s) % n;
                    grid.index(idx[0], idx[1], idx[2])
                };
                d += c * (data[shift(m)] - data[shift(n - m)]);
            }
            err = err.max((d / h - grad.component(axis)[p]).abs());
        }
    }
    let rel = err / grad.max_abs();
    assert!(rel <= 1e-4, "{rel}");
}

#[test]
fn product_identities() {
    let grid = g(32);
    let s = SpectralField::scalar_from_fn(grid, |q| q[0].sin());
    let c = SpectralField::scalar_from_fn(grid, |q| q[0].cos());
    let want = SpectralField::scalar_from_fn(grid, |q| 0.5 * (2.0 * q[0]).sin());
    assert!(dealiased_product(&s, &c).unwrap().max_difference(&want).unwrap() < 1e-14);

    let f = random_field(grid, Rank::Vector, 10, 2);
    let one = SpectralField::scalar_from_fn(grid, |_| 1.0);
    assert!(dealiased_product(&f, &one).unwrap().max_difference(&f).unwrap() < 1e-13);
    assert!(dealiased_product(&f, &f).is_err());
}

#[test]
fn triple_product_matches_direct_evaluation() {
    // Inputs on |k_i| <= 3: pair products stay inside the band and the
    // triple product does not alias on n = 32, so both routes are exact.
    let grid = g(32);
    let a = random_field(grid, Rank::Scalar, 3, 31);
    let b = random_field(grid, Rank::Scalar, 3, 32);
    let c = random_field(grid, Rank::Scalar, 3, 33);
    let nested = dealiased_product(&dealiased_product(&a, &b).unwrap(), &c).unwrap();

    let ev = BandEvaluator::new(&[&a, &b, &c]).unwrap();
    let direct = SpectralField::scalar_from_fn(grid, |q| {
        let v = ev.eval(q);
        v[0] * v[1] * v[2]
    });
    let err = nested.max_difference(&direct).unwrap();
    assert!(err <= 1e-12, "{err}");
}

#[test]
fn band_evaluator_off_grid() {
    let grid = g(16);
    let f = SpectralField::vector_from_fn(grid, |q| {
        [(q[0] + 2.0 * q[2]).sin(), (3.0 * q[1]).cos(), q[0].cos() * q[1].sin()]
    });
    let ev = BandEvaluator::new(&[&f]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let q: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
        let v = ev.eval(q);
        let want = [(q[0] + 2.0 * q[2]).sin(), (3.0 * q[1]).cos(), q[0].cos() * q[1].sin()];
        for c in 0..3 {
            assert!((v[c] - want[c]).abs() < 1e-13);
        }
    }
    // and it reproduces the grid samples exactly
    let samples = inverse_transform(&f);
    for p in (0..grid.len()).step_by(97) {
        let v = ev.eval(grid.point(p));
        for c in 0..3 {
            assert!((v[c] - samples.component(c)[p]).abs() < 1e-13);
        }
    }
}

#[test]
fn leray_projection_is_idempotent_and_solenoidal() {
    let grid = g(16);
    let f = random_field(grid, Rank::Vector, 5, 8);
    let p = leray_project(&f).unwrap();
    assert!(divergence(&p).unwrap().max_amplitude() < 1e-14);
    assert!(leray_project(&p).unwrap().max_difference(&p).unwrap() < 1e-15);
    assert!((p.mean(0) - f.mean(0)).abs() < 1e-15);
}

#[test]
fn binary_format_roundtrip_and_errors() {
    let grid = g(16);
    let f = random_field(grid, Rank::Vector, 5, 1);
    let bytes = encode_field(&f);
    assert_eq!(&bytes[..6], b"CRIDE1");
    let back = decode_field(&bytes).unwrap();
    assert_eq!(back.max_difference(&f).unwrap(), 0.0);
    assert_eq!(back.grid(), f.grid());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.field");
    write_field(&path, &f).unwrap();
    assert_eq!(read_field(&path).unwrap().max_difference(&f).unwrap(), 0.0);

    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(decode_field(&bad), Err(Error::Format(_))));
    assert!(matches!(decode_field(&bytes[..bytes.len() - 8]), Err(Error::Format(_))));
    assert!(matches!(decode_field(&bytes[..10]), Err(Error::Format(_))));
}

#[test]
fn rejects_mismatched_shapes() {
    let grid = g(8);
    assert!(SpectralField::from_coeffs(grid, Rank::Scalar, vec![vec![]]).is_err());
    assert!(RealField::new(grid, Rank::Vector, vec![vec![0.0; grid.len()]; 2]).is_err());
    let s = SpectralField::zeros(grid, Rank::Scalar);
    assert!(matches!(curl(&s), Err(Error::RankMismatch { .. })));
    let other = SpectralField::zeros(g(16), Rank::Scalar);
    assert!(matches!(s.max_difference(&other), Err(Error::GridMismatch)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn vector_identities_hold(seed in any::<u64>()) {
        let grid = g(8);
        let s = random_field(grid, Rank::Scalar, 2, seed);
        let v = random_field(grid, Rank::Vector, 2, seed ^ 0x5555);
        prop_assert!(curl(&gradient(&s).unwrap()).unwrap().max_amplitude() < 1e-13);
        prop_assert!(divergence(&curl(&v).unwrap()).unwrap().max_amplitude() < 1e-13);
        prop_assert!(v.hermitian_defect() == 0.0);
        prop_assert!(v.out_of_band_amplitude() == 0.0);
    }

    #[test]
    fn transforms_are_linear(seed in any::<u64>(), alpha in -3.0..3.0f64) {
        let grid = g(8);
        let a = random_field(grid, Rank::Scalar, 2, seed);
        let b = random_field(grid, Rank::Scalar, 2, seed.wrapping_add(1));
        let lhs = inverse_transform(&a.add_scaled(&b, alpha).unwrap());
        let (ia, ib) = (inverse_transform(&a), inverse_transform(&b));
        for p in 0..grid.len() {
            let want = ia.component(0)[p] + alpha * ib.component(0)[p];
            prop_assert!((lhs.component(0)[p] - want).abs() < 1e-12);
        }
    }
}
