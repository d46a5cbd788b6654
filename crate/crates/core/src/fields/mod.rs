//! Periodic fields on the box `[0, 2π]³`.
//!
//! A [`SpectralField`] stores the full complex Fourier array of a real scalar
//! or 3-vector field. Coefficient index `(i1, i2, i3)` is row-major with
//! `i3` fastest; index `i` along an axis carries wavenumber `i` for
//! `i < n/2` and `i - n` otherwise. Coefficients are normalised so that
//! `coeff(0)` is the spatial mean.
//!
//! Every constructor enforces the two structural invariants exactly:
//! Hermitian symmetry `coeff(-k) = conj(coeff(k))`, and truncation of all
//! modes outside the dealiasing cube `max |k_i| <= band()`.

mod eval;
mod fft;
pub mod io;
mod ops;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

pub use eval::BandEvaluator;
pub use ops::{
    curl, dealiased_product, divergence, forward_transform, gradient, inverse_transform,
    laplacian, leray_project, partial, project_samples,
};

/// Side length of the periodic box.
pub const BOX_LENGTH: f64 = 2.0 * PI;

/// Validated grid and dealiasing layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n: usize,
    dealias_fraction: f64,
    cutoff: usize,
}

impl GridSpec {
    /// Default retained fraction of the resolved wavenumbers (2/3 rule).
    pub const TWO_THIRDS: f64 = 2.0 / 3.0;

    /// Builds a grid with `n` points per axis. The dealiasing cutoff is
    /// `K = floor(dealias_fraction * n / 2)`.
    pub fn new(n: usize, dealias_fraction: f64) -> Result<Self> {
        if n % 2 != 0 || n < 8 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and at least 8, got {n}"
            )));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        // The small epsilon keeps exact ratios such as 2/3 * 24 from
        // flooring one below their intended value.
        let cutoff = (dealias_fraction * (n / 2) as f64 + 1e-9).floor() as usize;
        if cutoff < 2 {
            return Err(Error::InvalidGrid(format!(
                "dealias cutoff {cutoff} is below 2 (n = {n}, fraction = {dealias_fraction})"
            )));
        }
        Ok(Self {
            n,
            dealias_fraction,
            cutoff,
        })
    }

    /// Grid with the 2/3 dealiasing rule.
    pub fn with_two_thirds(n: usize) -> Result<Self> {
        Self::new(n, Self::TWO_THIRDS)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points (`n³`).
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Dealiasing cutoff `K`.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Largest retained `|k_i|`. Equal to the cutoff except when the cutoff
    /// reaches the Nyquist wavenumber, which is never retained, or when a
    /// dealiased grid (fraction at most 2/3) would still let quadratic
    /// products alias back into the band (`3K >= n`, e.g. `n = 24`).
    pub fn band(&self) -> usize {
        let band = self.cutoff.min(self.n / 2 - 1);
        if self.dealias_fraction <= Self::TWO_THIRDS + 1e-12 {
            band.min((self.n - 1) / 3)
        } else {
            band
        }
    }

    pub fn length(&self) -> f64 {
        BOX_LENGTH
    }

    pub fn spacing(&self) -> f64 {
        BOX_LENGTH / self.n as f64
    }

    /// Wavenumber carried by array index `i` along one axis.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    fn axis_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n + i2) * self.n + i3
    }

    #[inline]
    pub fn split_index(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Array index of wavenumber triple `k` (taken modulo `n`).
    #[inline]
    pub fn index_of(&self, k: [i64; 3]) -> usize {
        self.index(
            self.axis_index(k[0]),
            self.axis_index(k[1]),
            self.axis_index(k[2]),
        )
    }

    #[inline]
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let [i1, i2, i3] = self.split_index(idx);
        [
            self.wavenumber(i1),
            self.wavenumber(i2),
            self.wavenumber(i3),
        ]
    }

    /// Index of `-k` for the mode stored at `idx`.
    #[inline]
    pub fn mirror_index(&self, idx: usize) -> usize {
        let [i1, i2, i3] = self.split_index(idx);
        let n = self.n;
        self.index((n - i1) % n, (n - i2) % n, (n - i3) % n)
    }

    #[inline]
    pub fn is_retained(&self, k: [i64; 3]) -> bool {
        let b = self.band() as i64;
        k.iter().all(|ki| ki.abs() <= b)
    }

    /// Physical coordinates of grid point `idx`.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let [i1, i2, i3] = self.split_index(idx);
        [i1 as f64 * h, i2 as f64 * h, i3 as f64 * h]
    }
}

/// Scalar or 3-vector field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    Vector,
}

impl Rank {
    pub fn components(self) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::Vector => 3,
        }
    }

    pub fn from_components(c: usize) -> Option<Self> {
        match c {
            1 => Some(Rank::Scalar),
            3 => Some(Rank::Vector),
            _ => None,
        }
    }
}

/// Fourier coefficients of a real field on the periodic box.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: GridSpec,
    rank: Rank,
    coeffs: Vec<Vec<Complex64>>,
    zero_mean: bool,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, rank: Rank) -> Self {
        Self {
            grid,
            rank,
            coeffs: vec![vec![Complex64::new(0.0, 0.0); grid.len()]; rank.components()],
            zero_mean: false,
        }
    }

    /// Wraps raw coefficient arrays, truncating to the dealiasing band and
    /// enforcing Hermitian symmetry by averaging each mode with the
    /// conjugate of its mirror.
    pub fn from_coeffs(grid: GridSpec, rank: Rank, coeffs: Vec<Vec<Complex64>>) -> Result<Self> {
        if coeffs.len() != rank.components() {
            return Err(Error::ShapeMismatch {
                expected: rank.components(),
                actual: coeffs.len(),
            });
        }
        for c in &coeffs {
            if c.len() != grid.len() {
                return Err(Error::ShapeMismatch {
                    expected: grid.len(),
                    actual: c.len(),
                });
            }
        }
        let mut f = Self {
            grid,
            rank,
            coeffs,
            zero_mean: false,
        };
        f.normalize();
        Ok(f)
    }

    /// Builds a scalar field from a function of the grid coordinates.
    pub fn scalar_from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        forward_transform(&RealField::scalar_from_fn(grid, f))
    }

    /// Builds a vector field from a function of the grid coordinates.
    pub fn vector_from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        forward_transform(&RealField::vector_from_fn(grid, f))
    }

    pub(crate) fn from_parts_unchecked(
        grid: GridSpec,
        rank: Rank,
        coeffs: Vec<Vec<Complex64>>,
    ) -> Self {
        let mut f = Self {
            grid,
            rank,
            coeffs,
            zero_mean: false,
        };
        f.normalize();
        f
    }

    fn normalize(&mut self) {
        let grid = self.grid;
        for comp in &mut self.coeffs {
            for idx in 0..grid.len() {
                if !grid.is_retained(grid.wavevector(idx)) {
                    comp[idx] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let m = grid.mirror_index(idx);
                if m < idx {
                    continue;
                }
                if m == idx {
                    comp[idx].im = 0.0;
                } else {
                    let avg = (comp[idx] + comp[m].conj()) * 0.5;
                    comp[idx] = avg;
                    comp[m] = avg.conj();
                }
            }
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn components(&self) -> usize {
        self.rank.components()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.coeffs[c]
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    /// Extracts component `c` as a scalar field.
    pub fn scalar_component(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            rank: Rank::Scalar,
            coeffs: vec![self.coeffs[c].clone()],
            zero_mean: self.zero_mean,
        }
    }

    /// Stacks three scalar fields into a vector field.
    pub fn from_scalars(parts: [SpectralField; 3]) -> Result<Self> {
        let grid = parts[0].grid;
        let mut coeffs = Vec::with_capacity(3);
        let mut zero_mean = true;
        for p in parts {
            if p.grid != grid {
                return Err(Error::GridMismatch);
            }
            p.expect_rank(Rank::Scalar)?;
            zero_mean &= p.zero_mean;
            coeffs.extend(p.coeffs);
        }
        Ok(Self {
            grid,
            rank: Rank::Vector,
            coeffs,
            zero_mean,
        })
    }

    pub fn coeff(&self, c: usize, k: [i64; 3]) -> Complex64 {
        self.coeffs[c][self.grid.index_of(k)]
    }

    /// Spatial mean of component `c`.
    pub fn mean(&self, c: usize) -> f64 {
        self.coeffs[c][0].re
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    /// Removes the mean of every component and flags the field zero-mean.
    pub fn into_zero_mean(mut self) -> Self {
        for c in &mut self.coeffs {
            c[0] = Complex64::new(0.0, 0.0);
        }
        self.zero_mean = true;
        self
    }

    /// Flags the field zero-mean, failing if any mean exceeds `tol`.
    pub fn require_zero_mean(self, tol: f64) -> Result<Self> {
        let worst = self.coeffs.iter().map(|c| c[0].norm()).fold(0.0, f64::max);
        if worst > tol {
            return Err(Error::NonZeroMean(worst));
        }
        Ok(self.into_zero_mean())
    }

    /// Largest coefficient modulus over all components and modes.
    pub fn max_amplitude(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|coeff(k) - conj(coeff(-k))|`; zero for every field built
    /// through the public constructors.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for comp in &self.coeffs {
            for idx in 0..self.grid.len() {
                let m = self.grid.mirror_index(idx);
                worst = worst.max((comp[idx] - comp[m].conj()).norm());
            }
        }
        worst
    }

    /// Largest modulus among modes outside the retained band.
    pub fn out_of_band_amplitude(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for comp in &self.coeffs {
            for (idx, z) in comp.iter().enumerate() {
                if !self.grid.is_retained(self.grid.wavevector(idx)) {
                    worst = worst.max(z.norm());
                }
            }
        }
        worst
    }

    /// Mean of `|f|²` over the box, summed over components (Parseval).
    pub fn mean_square(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Kinetic-energy density `½ <|u|²>`.
    pub fn energy(&self) -> f64 {
        0.5 * self.mean_square()
    }

    pub(crate) fn expect_rank(&self, rank: Rank) -> Result<()> {
        if self.rank != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                actual: self.rank,
            });
        }
        Ok(())
    }

    pub(crate) fn expect_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, other: &SpectralField, alpha: f64) -> Result<SpectralField> {
        self.expect_grid(other)?;
        other.expect_rank(self.rank)?;
        let mut out = self.clone();
        out.add_scaled_in_place(other, alpha);
        out.zero_mean = self.zero_mean && other.zero_mean;
        Ok(out)
    }

    pub(crate) fn add_scaled_in_place(&mut self, other: &SpectralField, alpha: f64) {
        debug_assert_eq!(self.grid, other.grid);
        debug_assert_eq!(self.rank, other.rank);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * alpha;
            }
        }
    }

    pub fn scaled(&self, alpha: f64) -> SpectralField {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            for z in c.iter_mut() {
                *z *= alpha;
            }
        }
        out
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_difference(&self, other: &SpectralField) -> Result<f64> {
        self.expect_grid(other)?;
        other.expect_rank(self.rank)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max))
    }
}

/// Real samples of a scalar or vector field on the regular grid.
#[derive(Clone, Debug)]
pub struct RealField {
    grid: GridSpec,
    rank: Rank,
    data: Vec<Vec<f64>>,
}

impl RealField {
    pub fn new(grid: GridSpec, rank: Rank, data: Vec<Vec<f64>>) -> Result<Self> {
        if data.len() != rank.components() {
            return Err(Error::ShapeMismatch {
                expected: rank.components(),
                actual: data.len(),
            });
        }
        for d in &data {
            if d.len() != grid.len() {
                return Err(Error::ShapeMismatch {
                    expected: grid.len(),
                    actual: d.len(),
                });
            }
        }
        Ok(Self { grid, rank, data })
    }

    pub fn scalar_from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self {
            grid,
            rank: Rank::Scalar,
            data: vec![data],
        }
    }

    pub fn vector_from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut data = vec![Vec::with_capacity(grid.len()); 3];
        for i in 0..grid.len() {
            let v = f(grid.point(i));
            for c in 0..3 {
                data[c].push(v[c]);
            }
        }
        Self {
            grid,
            rank: Rank::Vector,
            data,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.data[c]
    }

    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Vec<f64>> {
        self.data
    }

    /// Largest absolute sample over all components.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|d| d.iter())
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }

    /// Largest absolute sample of component `c`.
    pub fn component_max_abs(&self, c: usize) -> f64 {
        self.data[c].iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Mean of `|f|²` over the grid, summed over components.
    pub fn mean_square(&self) -> f64 {
        let n = self.grid.len() as f64;
        self.data
            .iter()
            .map(|d| d.iter().map(|x| x * x).sum::<f64>() / n)
            .sum()
    }
}
