//! Exact evaluation of band-limited fields at arbitrary points by direct
//! Fourier summation over the retained band.

use num_complex::Complex64;

use super::SpectralField;
use crate::{Error, Result};

const MAX_COMPONENTS: usize = 16;

/// Compact copy of the retained coefficients of one or more fields, laid out
/// for fast trigonometric summation. Only `k3 >= 0` is stored; Hermitian
/// symmetry supplies the rest, so the real part of the half sum (with the
/// `k3 > 0` terms doubled) is the field value.
#[derive(Clone, Debug)]
pub struct BandEvaluator {
    band: usize,
    components: usize,
    // [(k1, k2, k3, component)] with k1, k2 in -band..=band, k3 in 0..=band
    coeffs: Vec<Complex64>,
}

impl BandEvaluator {
    /// Stacks the components of all `fields` (same grid) into one evaluator.
    pub fn new(fields: &[&SpectralField]) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::InvalidParameter("no fields to evaluate".into()))?;
        let grid = *first.grid();
        for f in fields {
            first.expect_grid(f)?;
        }
        let band = grid.band();
        let b = band as i64;
        let components: usize = fields.iter().map(|f| f.components()).sum();
        if components > MAX_COMPONENTS {
            return Err(Error::InvalidParameter(format!(
                "at most {MAX_COMPONENTS} stacked components, got {components}"
            )));
        }
        let width = 2 * band + 1;
        let mut coeffs = Vec::with_capacity(width * width * (band + 1) * components);
        for k1 in -b..=b {
            for k2 in -b..=b {
                for k3 in 0..=b {
                    let w = if k3 == 0 { 1.0 } else { 2.0 };
                    let idx = grid.index_of([k1, k2, k3]);
                    for f in fields {
                        for c in f.coeffs() {
                            coeffs.push(c[idx] * w);
                        }
                    }
                }
            }
        }
        Ok(Self {
            band,
            components,
            coeffs,
        })
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Writes the values of all stacked components at `q` into `out`.
    pub fn eval_into(&self, q: [f64; 3], out: &mut [f64]) {
        assert_eq!(out.len(), self.components);
        let b = self.band;
        let nc = self.components;
        let e1 = phases_symmetric(q[0], b);
        let e2 = phases_symmetric(q[1], b);
        let e3 = phases_positive(q[2], b);
        let mut acc = [Complex64::new(0.0, 0.0); MAX_COMPONENTS];
        let mut inner = [Complex64::new(0.0, 0.0); MAX_COMPONENTS];
        let mut rows = self.coeffs.chunks_exact(nc);
        for z1 in &e1 {
            for z2 in &e2 {
                inner[..nc].fill(Complex64::new(0.0, 0.0));
                for z3 in &e3 {
                    let row = rows.next().expect("coefficient layout");
                    for c in 0..nc {
                        inner[c] += row[c] * z3;
                    }
                }
                let e12 = z1 * z2;
                for c in 0..nc {
                    acc[c] += inner[c] * e12;
                }
            }
        }
        for c in 0..nc {
            out[c] = acc[c].re;
        }
    }

    pub fn eval(&self, q: [f64; 3]) -> Vec<f64> {
        let mut out = vec![0.0; self.components];
        self.eval_into(q, &mut out);
        out
    }
}

/// `e^{ikx}` for `k = -b..=b`.
fn phases_symmetric(x: f64, b: usize) -> Vec<Complex64> {
    let pos = phases_positive(x, b);
    let mut out = Vec::with_capacity(2 * b + 1);
    out.extend(pos[1..].iter().rev().map(|z| z.conj()));
    out.extend(pos);
    out
}

/// `e^{ikx}` for `k = 0..=b`.
fn phases_positive(x: f64, b: usize) -> Vec<Complex64> {
    (0..=b).map(|k| Complex64::cis(k as f64 * x)).collect()
}
