//! Inverse Laplacian on zero-mean fields and the decomposition
//! `ξ = ∇×a + ∇b` with gauge `∇·a = 0` and zero-mean potentials.

use num_complex::Complex64;

use crate::fields::{curl, divergence, gradient, Rank, SpectralField};
use crate::{Error, Result};

/// Means below this (relative to the field's largest amplitude, or 1) are
/// treated as roundoff and dropped.
const MEAN_TOLERANCE: f64 = 1e-10;

fn check_zero_mean(f: &SpectralField) -> Result<()> {
    let scale = f.max_amplitude().max(1.0);
    let worst = f.coeffs().iter().map(|c| c[0].norm()).fold(0.0, f64::max);
    if worst > MEAN_TOLERANCE * scale {
        return Err(Error::NonZeroMean(worst));
    }
    Ok(())
}

/// Solves `∇²φ = f` for zero-mean `f`, returning the zero-mean solution.
pub fn inverse_laplacian(f: &SpectralField) -> Result<SpectralField> {
    check_zero_mean(f)?;
    let grid = *f.grid();
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .map(|(idx, &z)| {
                    if idx == 0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let k = grid.wavevector(idx);
                    z / -((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64)
                })
                .collect()
        })
        .collect();
    Ok(SpectralField::from_coeffs(grid, f.rank(), coeffs)?.into_zero_mean())
}

/// `∂_i ∂_j ∇⁻² f`, the operator whose boundedness drives the Hölder
/// estimates. Its symbol `k_i k_j / |k|²` has modulus at most one.
pub fn second_derivative_of_inverse_laplacian(
    f: &SpectralField,
    i: usize,
    j: usize,
) -> Result<SpectralField> {
    check_zero_mean(f)?;
    let grid = *f.grid();
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .map(|(idx, &z)| {
                    if idx == 0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let k = grid.wavevector(idx);
                    let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
                    z * ((k[i] * k[j]) as f64 / k2)
                })
                .collect()
        })
        .collect();
    Ok(SpectralField::from_coeffs(grid, f.rank(), coeffs)?.into_zero_mean())
}

/// Vector and scalar potentials of a zero-mean vector field.
#[derive(Clone, Debug)]
pub struct Potentials {
    /// Divergence-free, zero-mean vector potential.
    pub a: SpectralField,
    /// Zero-mean scalar potential.
    pub b: SpectralField,
}

impl Potentials {
    pub fn new(a: SpectralField, b: SpectralField) -> Result<Self> {
        a.expect_rank(Rank::Vector)?;
        b.expect_rank(Rank::Scalar)?;
        a.expect_grid(&b)?;
        Ok(Self { a, b })
    }
}

/// Splits a zero-mean field into `∇×a + ∇b`.
pub fn hodge_decompose(xi: &SpectralField) -> Result<Potentials> {
    xi.expect_rank(Rank::Vector)?;
    check_zero_mean(xi)?;
    let b = inverse_laplacian(&divergence(xi)?)?;
    let a = inverse_laplacian(&curl(xi)?)?.scaled(-1.0).into_zero_mean();
    Potentials::new(a, b)
}

/// Reassembles `∇×a + ∇b`.
pub fn assemble_from_potentials(p: &Potentials) -> Result<SpectralField> {
    let rot = curl(&p.a)?;
    let grad = gradient(&p.b)?;
    Ok(rot.add_scaled(&grad, 1.0)?.into_zero_mean())
}
