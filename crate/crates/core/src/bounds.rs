//! Analyticity bounds for the displacement series.
//!
//! With `ζ = 2A + B` built from Hölder norms of the potential Laplacians and
//! `Q = 2 |ω₀|_{0,γ} t`, the recursion implies `p(ζ) >= 0` for
//!
//! ```text
//! p(ζ) = 6Θ³ζ³ + 12Θ²ζ² - ζ + Q.
//! ```
//!
//! For small `Q` the cubic has one negative and two positive roots, and
//! `2A + B` stays below the intermediate root `ζ₂(Q)` until `ζ₂` merges with
//! `ζ₃` at `Q = Q_c`. The guaranteed analyticity time is
//! `t_c = Q_c / (2 |ω₀|_{0,γ})`.
//!
//! `Θ` is a configured constant; its default `1/γ` is a heuristic, so the
//! generating-function comparison is reported as a diagnostic.

use crate::fields::{inverse_transform, SpectralField};
use crate::par;
use crate::taylor::TaylorSeries;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConfig {
    /// Hölder exponent, `0 < γ < 1`.
    pub gamma: f64,
    /// Constant bounding `|∂_i∂_j φ|_{0,γ}` by `|∇²φ|_{0,γ}`.
    pub theta: f64,
    /// Constant bounding `|φ|_{2,γ}` by `|∇²φ|_{0,γ}`. Stored for reports
    /// only; no computation depends on it.
    pub theta_tilde: f64,
}

impl BoundConfig {
    pub fn new(gamma: f64, theta: f64, theta_tilde: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
        }
        if !(theta_tilde > 0.0 && theta_tilde.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "theta_tilde must be positive, got {theta_tilde}"
            )));
        }
        Ok(Self {
            gamma,
            theta,
            theta_tilde,
        })
    }

    /// `Θ = Θ̃ = 1/γ`. Heuristic: only the scaling `Θ ≲ C/γ` is known.
    pub fn heuristic(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Self::new(gamma, 1.0 / gamma, 1.0 / gamma)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Hölder exponent must lie in (0, 1), got {gamma}"
        )));
    }
    Ok(())
}

/// `p(ζ) = 6Θ³ζ³ + 12Θ²ζ² - ζ + Q`.
pub fn p_eval(zeta: f64, theta: f64, q: f64) -> f64 {
    let t2 = theta * theta;
    ((6.0 * t2 * theta * zeta + 12.0 * t2) * zeta - 1.0) * zeta + q
}

/// `p'(ζ) = 18Θ³ζ² + 24Θ²ζ - 1`.
pub fn p_derivative(zeta: f64, theta: f64) -> f64 {
    let t2 = theta * theta;
    (18.0 * t2 * theta * zeta + 24.0 * t2) * zeta - 1.0
}

/// Discriminant of `p`, evaluated as
/// `972Θ⁶(-Q² - Q(64/9 + 4/(3Θ)) + 4/(27Θ²) + 2/(81Θ³))`.
pub fn discriminant(theta: f64, q: f64) -> f64 {
    972.0
        * theta.powi(6)
        * (-q * q - q * (64.0 / 9.0 + 4.0 / (3.0 * theta))
            + 4.0 / (27.0 * theta * theta)
            + 2.0 / (81.0 * theta.powi(3)))
}

/// Critical `Q` at which the discriminant vanishes,
/// `sqrt(h² + c) - h` with `h = 2/(3Θ) + 32/9`, `c = 4/(27Θ²) + 2/(81Θ³)`,
/// computed as `c / (sqrt(h² + c) + h)` to avoid cancellation at large `Θ`.
/// Returns NaN for non-positive `Θ`.
pub fn q_critical(theta: f64) -> f64 {
    if !(theta > 0.0) {
        return f64::NAN;
    }
    let h = 2.0 / (3.0 * theta) + 32.0 / 9.0;
    let c = 4.0 / (27.0 * theta * theta) + 2.0 / (81.0 * theta.powi(3));
    c / ((h * h + c).sqrt() + h)
}

/// Guaranteed analyticity time `Q_c(Θ) / (2 |ω₀|_{0,γ})`; infinite for zero
/// vorticity.
pub fn t_analyticity(omega_norm: f64, config: &BoundConfig) -> Result<f64> {
    if !(omega_norm >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "vorticity norm must be non-negative, got {omega_norm}"
        )));
    }
    if omega_norm == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(q_critical(config.theta) / (2.0 * omega_norm))
}

/// Real roots of `p`, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicRoots {
    pub roots: Vec<f64>,
    /// False when `Δ < 0`: only one real root exists and no bound applies.
    pub three_real: bool,
}

impl CubicRoots {
    /// Intermediate root (the smaller positive one).
    pub fn zeta2(&self) -> Option<f64> {
        self.three_real.then(|| self.roots[1])
    }

    pub fn zeta3(&self) -> Option<f64> {
        self.three_real.then(|| self.roots[2])
    }
}

/// Critical points of `p`: `(local max < 0, local min > 0)`.
fn critical_points(theta: f64) -> (f64, f64) {
    let t2 = theta * theta;
    let root = (576.0 * t2 * t2 + 72.0 * t2 * theta).sqrt();
    let lo = (-24.0 * t2 - root) / (36.0 * t2 * theta);
    let hi = 2.0 / (24.0 * t2 + root);
    (lo, hi)
}

/// Closed-form trigonometric roots, used as starting points.
fn trigonometric_roots(theta: f64, q: f64) -> Option<[f64; 3]> {
    let a = 6.0 * theta.powi(3);
    let b = 12.0 * theta * theta;
    let c = -1.0;
    let d = q;
    let p = (3.0 * a * c - b * b) / (3.0 * a * a);
    let r = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a * a * a);
    if p >= 0.0 {
        return None;
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * r / (p * m)).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let shift = -b / (3.0 * a);
    let mut roots = [0, 1, 2].map(|k| {
        m * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift
    });
    roots.sort_by(f64::total_cmp);
    Some(roots)
}

/// Newton iteration kept inside `[lo, hi]`, where `p` changes sign, with
/// bisection whenever a step would leave the bracket.
fn polish(theta: f64, q: f64, mut lo: f64, mut hi: f64, guess: f64) -> f64 {
    let f_lo = p_eval(lo, theta, q);
    if f_lo == 0.0 {
        return lo;
    }
    if p_eval(hi, theta, q) == 0.0 {
        return hi;
    }
    let lo_negative = f_lo < 0.0;
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..200 {
        let fx = p_eval(x, theta, q);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let dfx = p_derivative(x, theta);
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return next;
        }
        x = next;
    }
    x
}

/// Real roots of `p(ζ)` for `Θ > 0`, `Q >= 0`, each with residual at
/// roundoff level. A local minimum within roundoff of zero is reported as a
/// double root.
pub fn p_roots(theta: f64, q: f64) -> Result<CubicRoots> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("Q must be non-negative, got {q}")));
    }
    let (z_max, z_min) = critical_points(theta);
    let guesses = trigonometric_roots(theta, q);

    // Bracket for the negative root: p(z_max) > 0, walk left until p < 0.
    let mut far = z_max.abs().max(1.0);
    let mut left = z_max - far;
    while p_eval(left, theta, q) >= 0.0 {
        far *= 2.0;
        left = z_max - far;
    }
    let g1 = guesses.map_or(0.5 * (left + z_max), |g| g[0]);
    let z1 = polish(theta, q, left, z_max, g1);

    let t2 = theta * theta;
    let p_min = p_eval(z_min, theta, q);
    let scale = 6.0 * t2 * theta * z_min.powi(3) + 12.0 * t2 * z_min * z_min + z_min + q;
    if p_min > 64.0 * f64::EPSILON * scale {
        return Ok(CubicRoots {
            roots: vec![z1],
            three_real: false,
        });
    }
    if p_min >= 0.0 {
        return Ok(CubicRoots {
            roots: vec![z1, z_min, z_min],
            three_real: true,
        });
    }
    let mut far = z_min.max(1.0);
    let mut right = z_min + far;
    while p_eval(right, theta, q) <= 0.0 {
        far *= 2.0;
        right = z_min + far;
    }
    let (g2, g3) = guesses.map_or((0.5 * z_min, 0.5 * (z_min + right)), |g| (g[1], g[2]));
    let z2 = polish(theta, q, z_max, z_min, g2);
    let z3 = polish(theta, q, z_min, right, g3);
    Ok(CubicRoots {
        roots: vec![z1, z2, z3],
        three_real: true,
    })
}

/// Everything the bound calculus produces for one time.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub config: BoundConfig,
    pub omega_norm: f64,
    pub t: f64,
    /// `Q = 2 |ω₀| t`.
    pub q: f64,
    pub delta: f64,
    pub roots: CubicRoots,
    pub q_c: f64,
    pub t_c: f64,
}

pub fn bound_report(omega_norm: f64, config: &BoundConfig, t: f64) -> Result<BoundReport> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    let t_c = t_analyticity(omega_norm, config)?;
    let q = 2.0 * omega_norm * t;
    Ok(BoundReport {
        config: *config,
        omega_norm,
        t,
        q,
        delta: discriminant(config.theta, q),
        roots: p_roots(config.theta, q)?,
        q_c: q_critical(config.theta),
        t_c,
    })
}

/// `(Q, ζ₂(Q), ζ₃(Q))` at `samples` evenly spaced points of `[0, Q_c)`.
pub fn zeta_curve(theta: f64, samples: usize) -> Result<Vec<(f64, f64, f64)>> {
    let q_c = q_critical(theta);
    (0..samples)
        .map(|i| {
            let q = q_c * i as f64 / samples as f64;
            let r = p_roots(theta, q)?;
            Ok((q, r.roots[1], r.roots[2]))
        })
        .collect()
}

/// Controls the discrete Hölder seminorm scan.
#[derive(Clone, Copy, Debug)]
pub struct HolderOptions {
    /// Offsets satisfy `|δq| <= max_offset_fraction * 2π`.
    pub max_offset_fraction: f64,
    /// Cap on the number of offsets; larger sets are thinned by a fixed
    /// stride.
    pub max_offsets: usize,
}

impl Default for HolderOptions {
    fn default() -> Self {
        Self {
            max_offset_fraction: 0.25,
            max_offsets: 2048,
        }
    }
}

/// Grid offsets (half space, sorted by length then lexicographically).
fn holder_offsets(n: usize, opts: &HolderOptions) -> Vec<[i64; 3]> {
    let h = std::f64::consts::TAU / n as f64;
    let reach = opts.max_offset_fraction * std::f64::consts::TAU;
    let m = (reach / h).floor() as i64;
    let mut out = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                let positive = a > 0 || (a == 0 && (b > 0 || (b == 0 && c > 0)));
                if !positive {
                    continue;
                }
                let len = ((a * a + b * b + c * c) as f64).sqrt() * h;
                if len <= reach + 1e-12 {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out.sort_by_key(|o| (o[0] * o[0] + o[1] * o[1] + o[2] * o[2], *o));
    if out.len() > opts.max_offsets {
        let stride = out.len().div_ceil(opts.max_offsets);
        out = out.into_iter().step_by(stride).collect();
    }
    out
}

/// Discrete `C^{0,γ}` norm of samples on an `n³` grid:
/// `sup|w| + max_δ max_q |w(q+δ) - w(q)| / |δ|^γ`.
pub fn holder_norm_of_samples(n: usize, samples: &[f64], gamma: f64, opts: &HolderOptions) -> f64 {
    let h = std::f64::consts::TAU / n as f64;
    let sup = samples.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let offsets = holder_offsets(n, opts);
    let ni = n as i64;
    let semi = par::max_over(offsets.len(), |o| {
        let [a, b, c] = offsets[o];
        let len = ((a * a + b * b + c * c) as f64).sqrt() * h;
        let weight = len.powf(-gamma);
        let mut worst: f64 = 0.0;
        for i1 in 0..n {
            let j1 = (i1 as i64 + a).rem_euclid(ni) as usize;
            for i2 in 0..n {
                let j2 = (i2 as i64 + b).rem_euclid(ni) as usize;
                let row = (i1 * n + i2) * n;
                let shifted = (j1 * n + j2) * n;
                for i3 in 0..n {
                    let j3 = (i3 as i64 + c).rem_euclid(ni) as usize;
                    worst = worst.max((samples[shifted + j3] - samples[row + i3]).abs());
                }
            }
        }
        worst * weight
    });
    sup + semi
}

/// Discrete Hölder norm of a field, maximised over components.
pub fn holder_norm_with(field: &SpectralField, gamma: f64, opts: &HolderOptions) -> Result<f64> {
    check_gamma(gamma)?;
    let samples = inverse_transform(field);
    let n = field.grid().n();
    Ok(samples
        .data()
        .iter()
        .map(|d| holder_norm_of_samples(n, d, gamma, opts))
        .fold(0.0, f64::max))
}

pub fn holder_norm(field: &SpectralField, gamma: f64) -> Result<f64> {
    holder_norm_with(field, gamma, &HolderOptions::default())
}

/// One time sample of the generating-function comparison.
#[derive(Clone, Copy, Debug)]
pub struct GeneratingSample {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    /// `2A + B`.
    pub zeta: f64,
    pub q: f64,
    /// `ζ₂(Q)`, absent past the critical `Q`.
    pub zeta2: Option<f64>,
    pub holds: bool,
    pub beyond_tc: bool,
}

#[derive(Clone, Debug)]
pub struct GeneratingBoundReport {
    pub config: BoundConfig,
    pub omega_norm: f64,
    pub t_c: f64,
    /// `(|∇²a^(s)|_{0,γ}, |∇²b^(s)|_{0,γ})` for `s = 1..=S`.
    pub coefficient_norms: Vec<(f64, f64)>,
    pub samples: Vec<GeneratingSample>,
}

/// Compares the truncated generating functions `A(t)`, `B(t)` against
/// `ζ₂(Q(t))`. Diagnostic only: `Θ` is a configured estimate.
pub fn verify_generating_bound(
    series: &TaylorSeries,
    config: &BoundConfig,
    times: &[f64],
    opts: &HolderOptions,
) -> Result<GeneratingBoundReport> {
    let omega_norm = holder_norm_with(series.omega0(), config.gamma, opts)?;
    let t_c = t_analyticity(omega_norm, config)?;
    let coefficient_norms = (1..=series.order())
        .map(|s| {
            let (la, lb) = series.potential_laplacians(s);
            Ok((
                holder_norm_with(la, config.gamma, opts)?,
                holder_norm_with(lb, config.gamma, opts)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
        }
        let (mut a, mut b) = (0.0, 0.0);
        for (s, &(na, nb)) in coefficient_norms.iter().enumerate() {
            let w = t.powi(s as i32 + 1);
            a += na * w;
            b += nb * w;
        }
        let zeta = 2.0 * a + b;
        let q = 2.0 * omega_norm * t;
        let zeta2 = p_roots(config.theta, q)?.zeta2();
        let beyond_tc = t > t_c;
        if beyond_tc {
            log::warn!("t = {t} lies beyond the guaranteed analyticity time {t_c}");
        }
        samples.push(GeneratingSample {
            t,
            a,
            b,
            zeta,
            q,
            zeta2,
            holds: zeta2.is_some_and(|z2| zeta <= z2),
            beyond_tc,
        });
    }
    Ok(GeneratingBoundReport {
        config: *config,
        omega_norm,
        t_c,
        coefficient_norms,
        samples,
    })
}
