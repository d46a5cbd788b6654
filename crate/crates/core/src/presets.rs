//! Initial velocity fields.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{leray_project, GridSpec, Rank, SpectralField};
use crate::{Error, Result};

/// Uniform velocity used by the `constant` preset.
pub const CONSTANT_VELOCITY: [f64; 3] = [1.0, -0.5, 0.25];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Uniform translation; zero vorticity.
    Constant,
    /// `(sin q2, 0, 0)`: a steady unidirectional shear.
    Shear,
    /// `(sin q1 cos q2 cos q3, -cos q1 sin q2 cos q3, 0)`.
    TaylorGreen,
    /// Arnold–Beltrami–Childress flow with `A = B = C = 1`.
    Abc,
    /// Seeded random solenoidal field on `|k_i| <= 3`.
    Random { seed: u64 },
}

impl Preset {
    pub fn velocity(&self, grid: GridSpec) -> SpectralField {
        match *self {
            Preset::Constant => SpectralField::vector_from_fn(grid, |_| CONSTANT_VELOCITY),
            Preset::Shear => SpectralField::vector_from_fn(grid, |q| [q[1].sin(), 0.0, 0.0]),
            Preset::TaylorGreen => SpectralField::vector_from_fn(grid, taylor_green),
            Preset::Abc => SpectralField::vector_from_fn(grid, |q| abc(q, 1.0, 1.0, 1.0)),
            Preset::Random { seed } => random_solenoidal(grid, seed, 3),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Constant => "constant",
            Preset::Shear => "shear",
            Preset::TaylorGreen => "taylor-green",
            Preset::Abc => "abc",
            Preset::Random { .. } => "random",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Preset::Constant),
            "shear" => Ok(Preset::Shear),
            "taylor-green" | "tg" => Ok(Preset::TaylorGreen),
            "abc" => Ok(Preset::Abc),
            "random" => Ok(Preset::Random { seed: 0 }),
            other => Err(Error::InvalidParameter(format!("unknown preset '{other}'"))),
        }
    }
}

pub fn taylor_green(q: [f64; 3]) -> [f64; 3] {
    let (s1, c1) = q[0].sin_cos();
    let (s2, c2) = q[1].sin_cos();
    let c3 = q[2].cos();
    [s1 * c2 * c3, -c1 * s2 * c3, 0.0]
}

pub fn abc(q: [f64; 3], a: f64, b: f64, c: f64) -> [f64; 3] {
    [
        a * q[2].sin() + c * q[1].cos(),
        b * q[0].sin() + a * q[2].cos(),
        c * q[1].sin() + b * q[0].cos(),
    ]
}

/// Random zero-mean solenoidal field with modes `0 < max|k_i| <= kmax`
/// (clipped to the grid band), amplitudes decaying like `|k|^-2`, scaled to
/// unit RMS velocity.
pub fn random_solenoidal(grid: GridSpec, seed: u64, kmax: usize) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = kmax.min(grid.band()) as i64;
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; 3];
    for k1 in -kmax..=kmax {
        for k2 in -kmax..=kmax {
            for k3 in -kmax..=kmax {
                if k1 == 0 && k2 == 0 && k3 == 0 {
                    continue;
                }
                let k2sum = (k1 * k1 + k2 * k2 + k3 * k3) as f64;
                let idx = grid.index_of([k1, k2, k3]);
                for comp in &mut coeffs {
                    let re: f64 = rng.random_range(-1.0..1.0);
                    let im: f64 = rng.random_range(-1.0..1.0);
                    comp[idx] = Complex64::new(re, im) / k2sum;
                }
            }
        }
    }
    let raw = SpectralField::from_coeffs(grid, Rank::Vector, coeffs)
        .expect("shape matches grid")
        .into_zero_mean();
    let projected = leray_project(&raw).expect("vector field").into_zero_mean();
    let rms = projected.mean_square().sqrt();
    projected.scaled(1.0 / rms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::divergence;

    #[test]
    fn presets_are_solenoidal() {
        let g = GridSpec::with_two_thirds(16).unwrap();
        for p in [
            Preset::Constant,
            Preset::Shear,
            Preset::TaylorGreen,
            Preset::Abc,
            Preset::Random { seed: 7 },
        ] {
            let v = p.velocity(g);
            let d = divergence(&v).unwrap().max_amplitude();
            assert!(d <= 1e-12, "{p}: {d}");
        }
    }

    #[test]
    fn random_preset_is_seeded() {
        let g = GridSpec::with_two_thirds(16).unwrap();
        let a = Preset::Random { seed: 3 }.velocity(g);
        let b = Preset::Random { seed: 3 }.velocity(g);
        let c = Preset::Random { seed: 4 }.velocity(g);
        assert_eq!(a.max_difference(&b).unwrap(), 0.0);
        assert!(a.max_difference(&c).unwrap() > 1e-3);
        assert!((a.mean_square() - 1.0).abs() < 1e-12);
    }
}
