//! Transforms and exact spectral differential operators.

use num_complex::Complex64;

use super::fft;
use super::{GridSpec, Rank, RealField, SpectralField};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Physical samples to Fourier coefficients (truncated to the band).
pub fn forward_transform(samples: &RealField) -> SpectralField {
    project_samples(*samples.grid(), samples.rank(), samples.data())
        .expect("RealField shape is validated on construction")
}

/// Forward-transforms raw sample arrays and truncates the result to the
/// dealiasing band. Summing several pointwise products before a single
/// projection is equivalent to projecting each product separately.
pub fn project_samples(
    grid: GridSpec,
    rank: Rank,
    samples: &[impl AsRef<[f64]>],
) -> Result<SpectralField> {
    if samples.len() != rank.components() {
        return Err(Error::ShapeMismatch {
            expected: rank.components(),
            actual: samples.len(),
        });
    }
    let plan = fft::plan(grid.n());
    let mut coeffs = Vec::with_capacity(samples.len());
    for s in samples {
        let s = s.as_ref();
        if s.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: s.len(),
            });
        }
        let mut buf: Vec<Complex64> = s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        plan.forward(&mut buf);
        coeffs.push(buf);
    }
    Ok(SpectralField::from_parts_unchecked(grid, rank, coeffs))
}

/// Fourier coefficients to physical samples.
pub fn inverse_transform(field: &SpectralField) -> RealField {
    let grid = *field.grid();
    let plan = fft::plan(grid.n());
    let data = field
        .coeffs()
        .iter()
        .map(|c| {
            let mut buf = c.clone();
            plan.inverse(&mut buf);
            buf.into_iter().map(|z| z.re).collect()
        })
        .collect();
    RealField::new(grid, field.rank(), data).expect("shape preserved")
}

#[inline]
fn ik(grid: &GridSpec, idx: usize, axis: usize) -> Complex64 {
    I * grid.wavevector(idx)[axis] as f64
}

/// `∇f` for a scalar field.
pub fn gradient(f: &SpectralField) -> Result<SpectralField> {
    f.expect_rank(Rank::Scalar)?;
    let grid = *f.grid();
    let src = f.component(0);
    let coeffs = (0..3)
        .map(|axis| {
            src.iter()
                .enumerate()
                .map(|(idx, &z)| ik(&grid, idx, axis) * z)
                .collect()
        })
        .collect();
    Ok(SpectralField::from_parts_unchecked(grid, Rank::Vector, coeffs).into_zero_mean())
}

/// `∂f/∂q_axis` for every component.
pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    let grid = *f.grid();
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .map(|(idx, &z)| ik(&grid, idx, axis) * z)
                .collect()
        })
        .collect();
    SpectralField::from_parts_unchecked(grid, f.rank(), coeffs).into_zero_mean()
}

/// `∇·v` for a vector field.
pub fn divergence(v: &SpectralField) -> Result<SpectralField> {
    v.expect_rank(Rank::Vector)?;
    let grid = *v.grid();
    let out = (0..grid.len())
        .map(|idx| {
            let k = grid.wavevector(idx);
            I * (k[0] as f64 * v.component(0)[idx]
                + k[1] as f64 * v.component(1)[idx]
                + k[2] as f64 * v.component(2)[idx])
        })
        .collect();
    Ok(SpectralField::from_parts_unchecked(grid, Rank::Scalar, vec![out]).into_zero_mean())
}

/// `∇×v` for a vector field.
pub fn curl(v: &SpectralField) -> Result<SpectralField> {
    v.expect_rank(Rank::Vector)?;
    let grid = *v.grid();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; 3];
    for idx in 0..grid.len() {
        let k = grid.wavevector(idx).map(|x| x as f64);
        let a = [
            v.component(0)[idx],
            v.component(1)[idx],
            v.component(2)[idx],
        ];
        out[0][idx] = I * (k[1] * a[2] - k[2] * a[1]);
        out[1][idx] = I * (k[2] * a[0] - k[0] * a[2]);
        out[2][idx] = I * (k[0] * a[1] - k[1] * a[0]);
    }
    Ok(SpectralField::from_parts_unchecked(grid, Rank::Vector, out).into_zero_mean())
}

/// `∇²f`, componentwise.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    let grid = *f.grid();
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| {
            c.iter()
                .enumerate()
                .map(|(idx, &z)| {
                    let k = grid.wavevector(idx);
                    z * -((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64)
                })
                .collect()
        })
        .collect();
    SpectralField::from_parts_unchecked(grid, f.rank(), coeffs).into_zero_mean()
}

/// Removes the gradient part of a vector field: `û ← û - k (k·û)/|k|²`.
/// The mean is left untouched.
pub fn leray_project(v: &SpectralField) -> Result<SpectralField> {
    v.expect_rank(Rank::Vector)?;
    let grid = *v.grid();
    let mut out: Vec<Vec<Complex64>> = v.coeffs().to_vec();
    for idx in 1..grid.len() {
        let k = grid.wavevector(idx).map(|x| x as f64);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let dot = (k[0] * out[0][idx] + k[1] * out[1][idx] + k[2] * out[2][idx]) / k2;
        for c in 0..3 {
            out[c][idx] -= dot * k[c];
        }
    }
    Ok(SpectralField::from_parts_unchecked(grid, Rank::Vector, out))
}

/// Pointwise product evaluated on the grid and truncated to the dealiasing
/// band. Scalar·scalar, scalar·vector and vector·scalar are supported.
pub fn dealiased_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.expect_grid(g)?;
    let (rank, scalar, other) = match (f.rank(), g.rank()) {
        (Rank::Scalar, r) => (r, f, g),
        (r, Rank::Scalar) => (r, g, f),
        (Rank::Vector, Rank::Vector) => {
            return Err(Error::RankMismatch {
                expected: Rank::Scalar,
                actual: Rank::Vector,
            })
        }
    };
    let s = inverse_transform(scalar);
    let o = inverse_transform(other);
    let s = s.component(0);
    let prod: Vec<Vec<f64>> = o
        .data()
        .iter()
        .map(|d| d.iter().zip(s).map(|(a, b)| a * b).collect())
        .collect();
    project_samples(*f.grid(), rank, &prod)
}
