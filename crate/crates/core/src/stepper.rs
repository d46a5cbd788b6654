//! Time stepping by repeated Taylor expansion.
//!
//! Each step expands the Lagrangian displacement about the current time,
//! sums the series over the step `h`, transfers the Lagrangian velocity
//! back to the regular Eulerian grid by inverting `x = q + ξ(q, h)`, and
//! restarts from the resampled (and re-projected) velocity.

use std::path::Path;

use crate::fields::io::{read_field, read_sidecar, write_field, write_sidecar};
use crate::fields::{
    curl, divergence, forward_transform, inverse_transform, leray_project, BandEvaluator, GridSpec,
    Rank, RealField, SpectralField,
};
use crate::par;
use crate::taylor::{TaylorSeries, SOLENOIDAL_TOLERANCE};
use crate::{Error, Result};

/// Largest divergence amplitude tolerated in a [`FlowState`].
pub const STATE_DIVERGENCE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct ResampleOptions {
    /// Stop when the fixed-point update is at most this long.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Newton iterations allowed for points the plain iteration leaves
    /// unconverged.
    pub newton_iterations: usize,
    /// `max |det(∇x) - 1|` above which the map is reported as suspect.
    pub det_threshold: f64,
}

impl Default for ResampleOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 50,
            newton_iterations: 20,
            det_threshold: 0.2,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepConfig {
    /// Series order `S` (at least 4).
    pub order: usize,
    /// Fraction of the estimated radius a step may use.
    pub safety: f64,
    /// Ceiling on adaptive steps.
    pub h_max: f64,
    pub resample: ResampleOptions,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            order: 12,
            safety: 0.5,
            h_max: 0.5,
            resample: ResampleOptions::default(),
        }
    }
}

impl StepConfig {
    fn validate(&self) -> Result<()> {
        if self.order < 4 {
            return Err(Error::InvalidParameter(format!(
                "step order must be at least 4, got {}",
                self.order
            )));
        }
        if !(self.safety > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "safety factor must be positive, got {}",
                self.safety
            )));
        }
        if !(self.h_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "h_max must be positive, got {}",
                self.h_max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// `½ <|u|²>`.
    pub energy: f64,
    /// `max |ω|` over the grid.
    pub max_vorticity: f64,
    /// Radius estimate of the last series built (infinite before any step).
    pub radius_estimate: f64,
    /// Sum over steps of the divergence amplitude removed by projection plus
    /// the worst inversion residual.
    pub resample_error: f64,
    pub steps: usize,
}

/// Eulerian velocity at one time.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub time: f64,
    velocity: SpectralField,
    pub diagnostics: Diagnostics,
}

impl FlowState {
    pub fn new(velocity: SpectralField, time: f64) -> Result<Self> {
        velocity.expect_rank(Rank::Vector)?;
        let div = divergence(&velocity)?.max_amplitude();
        if div > STATE_DIVERGENCE_TOLERANCE {
            return Err(Error::NotSolenoidal(div));
        }
        let diagnostics = Diagnostics {
            energy: velocity.energy(),
            max_vorticity: inverse_transform(&curl(&velocity)?).max_abs(),
            radius_estimate: f64::INFINITY,
            resample_error: 0.0,
            steps: 0,
        };
        Ok(Self {
            time,
            velocity,
            diagnostics,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.velocity.grid()
    }

    pub fn velocity(&self) -> &SpectralField {
        &self.velocity
    }
}

/// Values transported to the regular grid.
#[derive(Clone, Debug)]
pub struct Resampled {
    pub values: RealField,
    /// Largest final fixed-point update over all target points.
    pub worst_residual: f64,
    pub max_iterations: usize,
}

#[derive(Clone, Copy)]
struct PointResult {
    q: [f64; 3],
    values: [f64; 3],
    residual: f64,
    iterations: usize,
    converged: bool,
}

/// For every regular grid point `x`, solves `q = x - ξ(q)` by fixed-point
/// iteration from `q₀ = x` and evaluates `values` (a field on the
/// Lagrangian grid) at the converged `q`. Points still unconverged after
/// `max_iterations` are finished with Newton's method on `q + ξ(q) - x`.
pub fn resample_to_grid(
    displacement: &SpectralField,
    values: &SpectralField,
    opts: &ResampleOptions,
) -> Result<Resampled> {
    displacement.expect_rank(Rank::Vector)?;
    displacement.expect_grid(values)?;
    let grid = *displacement.grid();

    let det_error = map_det_error(displacement);
    if det_error > opts.det_threshold {
        log::warn!(
            "Lagrangian map is strongly distorted: max |det - 1| = {det_error:.3e} > {}",
            opts.det_threshold
        );
    }

    let on_grid = inverse_transform(displacement);
    let xi_eval = BandEvaluator::new(&[displacement])?;
    let val_eval = BandEvaluator::new(&[values])?;
    let nv = values.components();

    let mut results = vec![
        PointResult {
            q: [0.0; 3],
            values: [0.0; 3],
            residual: 0.0,
            iterations: 0,
            converged: false,
        };
        grid.len()
    ];
    let n = grid.n();
    par::for_each_chunk(&mut results, n, |row, chunk| {
        let mut xi = [0.0; 3];
        for (i3, out) in chunk.iter_mut().enumerate() {
            let p = row * n + i3;
            let x = grid.point(p);
            // q₁ = x - ξ(x) uses the on-grid samples.
            let mut q = [0.0; 3];
            let mut step: f64 = 0.0;
            for c in 0..3 {
                q[c] = x[c] - on_grid.component(c)[p];
                step = step.max(on_grid.component(c)[p].abs());
            }
            let mut iterations = 1;
            while step > opts.tolerance && iterations < opts.max_iterations {
                xi_eval.eval_into(q, &mut xi);
                step = 0.0;
                for c in 0..3 {
                    let next = x[c] - xi[c];
                    step = step.max((next - q[c]).abs());
                    q[c] = next;
                }
                iterations += 1;
            }
            let mut v = [0.0; 3];
            val_eval.eval_into(q, &mut v[..nv]);
            *out = PointResult {
                q,
                values: v,
                residual: step,
                iterations,
                converged: step <= opts.tolerance,
            };
        }
    });

    let stalled: Vec<usize> = (0..results.len()).filter(|&p| !results[p].converged).collect();
    if !stalled.is_empty() && opts.newton_iterations > 0 {
        log::debug!("{} points need Newton polishing", stalled.len());
        let grads: Vec<SpectralField> =
            (0..3).map(|i| crate::fields::partial(displacement, i)).collect();
        let jac_eval = BandEvaluator::new(&[displacement, &grads[0], &grads[1], &grads[2]])?;
        for p in stalled {
            let r = &mut results[p];
            let x = grid.point(p);
            let mut q = r.q;
            let mut buf = [0.0; 12];
            let mut step = r.residual;
            let mut k = 0;
            while k < opts.newton_iterations {
                jac_eval.eval_into(q, &mut buf);
                let f: [f64; 3] = std::array::from_fn(|c| q[c] + buf[c] - x[c]);
                // j[c][d] = δ_cd + ∂_d ξ_c
                let j: [[f64; 3]; 3] = std::array::from_fn(|c| {
                    std::array::from_fn(|d| buf[3 + 3 * d + c] + if c == d { 1.0 } else { 0.0 })
                });
                let Some(dq) = solve3(j, f) else { break };
                step = dq.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                for c in 0..3 {
                    q[c] -= dq[c];
                }
                k += 1;
                if step <= opts.tolerance {
                    break;
                }
            }
            let mut v = [0.0; 3];
            val_eval.eval_into(q, &mut v[..nv]);
            *r = PointResult {
                q,
                values: v,
                residual: step,
                iterations: r.iterations + k,
                converged: step <= opts.tolerance,
            };
        }
    }

    let worst_residual = results.iter().map(|r| r.residual).fold(0.0, f64::max);
    if results.iter().any(|r| !r.converged) {
        return Err(Error::ResampleDiverged(worst_residual));
    }
    let data = (0..nv)
        .map(|c| results.iter().map(|r| r.values[c]).collect())
        .collect();
    Ok(Resampled {
        values: RealField::new(grid, values.rank(), data)?,
        worst_residual,
        max_iterations: results.iter().map(|r| r.iterations).max().unwrap_or(0),
    })
}

/// Cramer's rule; `None` for a singular matrix.
fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-300 {
        return None;
    }
    Some(std::array::from_fn(|col| {
        let mut a = m;
        for row in 0..3 {
            a[row][col] = b[row];
        }
        det(a) / d
    }))
}

/// `max |det(I + ∇ξ) - 1|` on the grid.
fn map_det_error(displacement: &SpectralField) -> f64 {
    let grads: Vec<RealField> = (0..3)
        .map(|i| inverse_transform(&crate::fields::partial(displacement, i)))
        .collect();
    let len = displacement.grid().len();
    let mut worst: f64 = 0.0;
    for p in 0..len {
        let m: [f64; 9] = std::array::from_fn(|e| {
            let (i, j) = (e / 3, e % 3);
            grads[i].component(j)[p] + if i == j { 1.0 } else { 0.0 }
        });
        let det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
            + m[2] * (m[3] * m[7] - m[4] * m[6]);
        worst = worst.max((det - 1.0).abs());
    }
    worst
}

/// Advances the flow by `h`, which must not exceed `safety` times the
/// radius estimate of the series built at the current time.
pub fn step(state: &FlowState, h: f64, config: &StepConfig) -> Result<FlowState> {
    config.validate()?;
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let series = TaylorSeries::build(&state.velocity, config.order)?;
    let radius = series.estimate_radius()?;
    let bound = config.safety * radius;
    if h > bound {
        return Err(Error::StepTooLarge { h, bound });
    }
    let value = series.evaluate(h);
    let resampled = resample_to_grid(&value.displacement, &value.velocity, &config.resample)?;
    let raw = forward_transform(&resampled.values);
    let removed = divergence(&raw)?.max_amplitude();
    let velocity = leray_project(&raw)?;
    debug_assert!(divergence(&velocity)?.max_amplitude() <= SOLENOIDAL_TOLERANCE);

    let prev = state.diagnostics;
    let diagnostics = Diagnostics {
        energy: velocity.energy(),
        max_vorticity: inverse_transform(&curl(&velocity)?).max_abs(),
        radius_estimate: radius,
        resample_error: prev.resample_error + removed + resampled.worst_residual,
        steps: prev.steps + 1,
    };
    Ok(FlowState {
        time: state.time + h,
        velocity,
        diagnostics,
    })
}

/// `min(safety * radius, h_max)`; an infinite radius yields `h_max`.
pub fn suggest_step(radius: f64, safety: f64, h_max: f64) -> f64 {
    (safety * radius).min(h_max)
}

/// Step size suggested by the radius estimate at the current state.
pub fn adaptive_step(state: &FlowState, config: &StepConfig) -> Result<f64> {
    config.validate()?;
    let series = TaylorSeries::build(&state.velocity, config.order)?;
    Ok(suggest_step(series.estimate_radius()?, config.safety, config.h_max))
}

/// Writes `<stem>.field` (binary velocity) and `<stem>.txt` (key=value).
pub fn write_checkpoint(dir: impl AsRef<Path>, stem: &str, state: &FlowState) -> Result<()> {
    let dir = dir.as_ref();
    write_field(dir.join(format!("{stem}.field")), &state.velocity)?;
    let d = &state.diagnostics;
    write_sidecar(
        dir.join(format!("{stem}.txt")),
        &[
            ("time", format!("{:e}", state.time)),
            ("steps", d.steps.to_string()),
            ("energy", format!("{:e}", d.energy)),
            ("max_vorticity", format!("{:e}", d.max_vorticity)),
            ("radius_estimate", format!("{:e}", d.radius_estimate)),
            ("resample_error", format!("{:e}", d.resample_error)),
        ],
    )
}

pub fn read_checkpoint(dir: impl AsRef<Path>, stem: &str) -> Result<FlowState> {
    let dir = dir.as_ref();
    let velocity = read_field(dir.join(format!("{stem}.field")))?;
    let kv = read_sidecar(dir.join(format!("{stem}.txt")))?;
    let get = |k: &str| -> Result<f64> {
        kv.get(k)
            .ok_or_else(|| Error::Format(format!("checkpoint sidecar lacks '{k}'")))?
            .parse::<f64>()
            .map_err(|e| Error::Format(format!("checkpoint key '{k}': {e}")))
    };
    let mut state = FlowState::new(velocity, get("time")?)?;
    state.diagnostics.steps = get("steps")? as usize;
    state.diagnostics.radius_estimate = get("radius_estimate")?;
    state.diagnostics.resample_error = get("resample_error")?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Preset;

    fn grid() -> GridSpec {
        GridSpec::with_two_thirds(16).unwrap()
    }

    #[test]
    fn zero_displacement_is_identity() {
        let g = grid();
        let xi = SpectralField::zeros(g, Rank::Vector);
        let f = SpectralField::scalar_from_fn(g, |q| (q[0] + q[2]).sin() * q[1].cos());
        let out = resample_to_grid(&xi, &f, &ResampleOptions::default()).unwrap();
        let want = inverse_transform(&f);
        for (a, b) in out.values.component(0).iter().zip(want.component(0)) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_shift_is_exact() {
        let g = grid();
        let c = [0.3, -0.2, 0.1];
        let xi = SpectralField::vector_from_fn(g, |_| c);
        let f = |q: [f64; 3]| (2.0 * q[0] - q[1]).sin() + (q[2] + q[1]).cos();
        let field = SpectralField::scalar_from_fn(g, f);
        let out = resample_to_grid(&xi, &field, &ResampleOptions::default()).unwrap();
        for p in 0..g.len() {
            let x = g.point(p);
            let want = f([x[0] - c[0], x[1] - c[1], x[2] - c[2]]);
            assert!((out.values.component(0)[p] - want).abs() <= 1e-10);
        }
    }

    #[test]
    fn step_rejects_oversized_h() {
        let g = grid();
        let state = FlowState::new(Preset::TaylorGreen.velocity(g), 0.0).unwrap();
        let cfg = StepConfig::default();
        assert!(matches!(
            step(&state, 100.0, &cfg),
            Err(Error::StepTooLarge { .. })
        ));
        let bad = StepConfig { order: 2, ..cfg };
        assert!(step(&state, 0.01, &bad).is_err());
    }

    #[test]
    fn constant_flow_translates() {
        let g = grid();
        let v = Preset::Constant.velocity(g);
        let state = FlowState::new(v.clone(), 0.5).unwrap();
        let cfg = StepConfig::default();
        assert_eq!(adaptive_step(&state, &cfg).unwrap(), cfg.h_max);
        let next = step(&state, 0.3, &cfg).unwrap();
        assert!((next.time - 0.8).abs() < 1e-15);
        assert!(next.velocity().max_difference(&v).unwrap() < 1e-13);
    }

    #[test]
    fn suggested_step_scales_with_radius() {
        assert_eq!(suggest_step(f64::INFINITY, 0.5, 0.2), 0.2);
        assert_eq!(suggest_step(0.3, 0.5, 1.0), 0.15);
    }

    #[test]
    fn checkpoint_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let g = grid();
        let state = FlowState::new(Preset::Abc.velocity(g), 1.25).unwrap();
        write_checkpoint(dir.path(), "ck", &state).unwrap();
        let back = read_checkpoint(dir.path(), "ck").unwrap();
        assert_eq!(back.time, 1.25);
        assert_eq!(back.velocity().max_difference(state.velocity()).unwrap(), 0.0);
    }
}
