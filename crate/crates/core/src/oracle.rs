//! Eulerian reference path: a pseudo-spectral vorticity-form Euler solver
//! with classical RK4 time stepping, plus RK4 particle tracking through the
//! stored velocity history. Shares nothing with the Taylor recursion except
//! the field layer.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::fields::{
    curl, inverse_transform, project_samples, BandEvaluator, GridSpec, Rank, SpectralField,
};
use crate::taylor::TaylorSeries;
use crate::{Error, Result};

/// Advective stability factor: `dt <= CFL * h / max|v|`.
pub const CFL: f64 = 0.5;

/// Velocity snapshots with their time derivatives.
#[derive(Clone, Debug)]
pub struct VelocityHistory {
    pub times: Vec<f64>,
    pub velocities: Vec<SpectralField>,
    pub derivatives: Vec<SpectralField>,
}

/// `û = i k × ω̂ / |k|²` plus the carried mean.
fn biot_savart(omega: &SpectralField, mean: [f64; 3]) -> SpectralField {
    let grid = *omega.grid();
    let i = Complex64::new(0.0, 1.0);
    let mut out = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; 3];
    for idx in 1..grid.len() {
        let k = grid.wavevector(idx).map(|x| x as f64);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let w = [
            omega.component(0)[idx],
            omega.component(1)[idx],
            omega.component(2)[idx],
        ];
        out[0][idx] = i * (k[1] * w[2] - k[2] * w[1]) / k2;
        out[1][idx] = i * (k[2] * w[0] - k[0] * w[2]) / k2;
        out[2][idx] = i * (k[0] * w[1] - k[1] * w[0]) / k2;
    }
    for c in 0..3 {
        out[c][0] = Complex64::new(mean[c], 0.0);
    }
    SpectralField::from_coeffs(grid, Rank::Vector, out).expect("grid-sized")
}

/// `∂ω/∂t = ∇×(u×ω)` with the product dealiased.
fn vorticity_rhs(omega: &SpectralField, mean: [f64; 3]) -> Result<SpectralField> {
    let u = inverse_transform(&biot_savart(omega, mean));
    let w = inverse_transform(omega);
    let len = omega.grid().len();
    let mut cross = vec![vec![0.0; len]; 3];
    for p in 0..len {
        let a = [u.component(0)[p], u.component(1)[p], u.component(2)[p]];
        let b = [w.component(0)[p], w.component(1)[p], w.component(2)[p]];
        cross[0][p] = a[1] * b[2] - a[2] * b[1];
        cross[1][p] = a[2] * b[0] - a[0] * b[2];
        cross[2][p] = a[0] * b[1] - a[1] * b[0];
    }
    curl(&project_samples(*omega.grid(), Rank::Vector, &cross)?)
}

/// Largest time step allowed by the advective bound for `v`.
pub fn stable_dt(v: &SpectralField) -> f64 {
    let vmax = inverse_transform(v).max_abs();
    if vmax == 0.0 {
        f64::INFINITY
    } else {
        CFL * v.grid().spacing() / vmax
    }
}

/// Integrates the vorticity equation from `v0` to `t_end` with RK4 steps no
/// longer than `dt` (shortened so that they divide `t_end`), recording the
/// velocity and its time derivative after every step.
pub fn euler_solve(v0: &SpectralField, t_end: f64, dt: f64) -> Result<VelocityHistory> {
    v0.expect_rank(Rank::Vector)?;
    if !(t_end >= 0.0 && dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need t_end >= 0 and dt > 0, got t_end = {t_end}, dt = {dt}"
        )));
    }
    let bound = stable_dt(v0);
    if dt > bound {
        return Err(Error::Unstable { dt, bound });
    }
    let mean = [v0.mean(0), v0.mean(1), v0.mean(2)];
    let steps = (t_end / dt).ceil().max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { t_end / steps as f64 };

    let mut omega = curl(v0)?;
    let snapshot = |omega: &SpectralField| -> Result<(SpectralField, SpectralField)> {
        let rhs = vorticity_rhs(omega, mean)?;
        Ok((biot_savart(omega, mean), biot_savart(&rhs, [0.0; 3])))
    };
    let mut history = VelocityHistory {
        times: Vec::with_capacity(steps + 1),
        velocities: Vec::with_capacity(steps + 1),
        derivatives: Vec::with_capacity(steps + 1),
    };
    let (u, du) = snapshot(&omega)?;
    history.times.push(0.0);
    history.velocities.push(u);
    history.derivatives.push(du);

    for k in 0..steps {
        let k1 = vorticity_rhs(&omega, mean)?;
        let k2 = vorticity_rhs(&omega.add_scaled(&k1, 0.5 * dt)?, mean)?;
        let k3 = vorticity_rhs(&omega.add_scaled(&k2, 0.5 * dt)?, mean)?;
        let k4 = vorticity_rhs(&omega.add_scaled(&k3, dt)?, mean)?;
        omega.add_scaled_in_place(&k1, dt / 6.0);
        omega.add_scaled_in_place(&k2, dt / 3.0);
        omega.add_scaled_in_place(&k3, dt / 3.0);
        omega.add_scaled_in_place(&k4, dt / 6.0);
        let (u, du) = snapshot(&omega)?;
        history.times.push((k + 1) as f64 * dt);
        history.velocities.push(u);
        history.derivatives.push(du);
    }
    Ok(history)
}

impl VelocityHistory {
    pub fn grid(&self) -> &GridSpec {
        self.velocities[0].grid()
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("history is never empty")
    }

    /// Cubic Hermite interpolation between the bracketing snapshots.
    pub fn velocity_at(&self, t: f64) -> Result<SpectralField> {
        let last = self.times.len() - 1;
        let tol = 1e-12 * self.end_time().max(1.0);
        if t < -tol || t > self.end_time() + tol {
            return Err(Error::TimeOutOfRange(t));
        }
        if last == 0 {
            return Ok(self.velocities[0].clone());
        }
        let i = self.times.partition_point(|&s| s <= t).clamp(1, last) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let span = t1 - t0;
        let x = ((t - t0) / span).clamp(0.0, 1.0);
        let (x2, x3) = (x * x, x * x * x);
        let h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
        let h10 = x3 - 2.0 * x2 + x;
        let h01 = -2.0 * x3 + 3.0 * x2;
        let h11 = x3 - x2;
        let mut out = self.velocities[i].scaled(h00);
        out.add_scaled_in_place(&self.derivatives[i], h10 * span);
        out.add_scaled_in_place(&self.velocities[i + 1], h01);
        out.add_scaled_in_place(&self.derivatives[i + 1], h11 * span);
        Ok(out)
    }
}

/// Particle positions `x(q, t)` for a set of seeds, wrapped into `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySet {
    pub seeds: Vec<[f64; 3]>,
    pub times: Vec<f64>,
    /// `positions[time][seed]`.
    pub positions: Vec<Vec<[f64; 3]>>,
}

pub fn wrap(x: [f64; 3]) -> [f64; 3] {
    x.map(|c| c.rem_euclid(TAU))
}

/// Distance on the torus.
pub fn periodic_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut sum = 0.0;
    for c in 0..3 {
        let d = (a[c] - b[c]).rem_euclid(TAU);
        let d = d.min(TAU - d);
        sum += d * d;
    }
    sum.sqrt()
}

/// `per_axis³` seeds on a shifted lattice, away from the symmetry planes of
/// the presets.
pub fn lattice_seeds(per_axis: usize) -> Vec<[f64; 3]> {
    let h = TAU / per_axis as f64;
    let mut out = Vec::with_capacity(per_axis.pow(3));
    for a in 0..per_axis {
        for b in 0..per_axis {
            for c in 0..per_axis {
                out.push([
                    (a as f64 + 0.31) * h,
                    (b as f64 + 0.57) * h,
                    (c as f64 + 0.13) * h,
                ]);
            }
        }
    }
    out
}

fn velocity_at_points(field: &SpectralField, points: &[[f64; 3]]) -> Result<Vec<[f64; 3]>> {
    let ev = BandEvaluator::new(&[field])?;
    Ok(points
        .iter()
        .map(|&p| {
            let v = ev.eval(p);
            [v[0], v[1], v[2]]
        })
        .collect())
}

/// RK4 integration of `dx/dt = u(x, t)` from the seeds, one step per
/// history interval, with off-grid trigonometric evaluation and Hermite
/// interpolation in time. Positions are reported at every history time.
pub fn integrate_trajectories(
    history: &VelocityHistory,
    seeds: &[[f64; 3]],
) -> Result<TrajectorySet> {
    let mut x: Vec<[f64; 3]> = seeds.to_vec();
    let mut positions = vec![x.iter().copied().map(wrap).collect::<Vec<_>>()];
    let advance = |x: &[[f64; 3]], k: &[[f64; 3]], a: f64| -> Vec<[f64; 3]> {
        x.iter()
            .zip(k)
            .map(|(p, v)| [p[0] + a * v[0], p[1] + a * v[1], p[2] + a * v[2]])
            .collect()
    };
    for w in history.times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let dt = t1 - t0;
        let mid = history.velocity_at(t0 + 0.5 * dt)?;
        let i0 = history.times.partition_point(|&s| s < t0);
        let k1 = velocity_at_points(&history.velocities[i0], &x)?;
        let k2 = velocity_at_points(&mid, &advance(&x, &k1, 0.5 * dt))?;
        let k3 = velocity_at_points(&mid, &advance(&x, &k2, 0.5 * dt))?;
        let k4 = velocity_at_points(&history.velocities[i0 + 1], &advance(&x, &k3, dt))?;
        for (p, ((a, b), (c, d))) in x.iter_mut().zip(k1.iter().zip(&k2).zip(k3.iter().zip(&k4))) {
            for comp in 0..3 {
                p[comp] += dt / 6.0 * (a[comp] + 2.0 * b[comp] + 2.0 * c[comp] + d[comp]);
            }
        }
        positions.push(x.iter().copied().map(wrap).collect());
    }
    Ok(TrajectorySet {
        seeds: seeds.to_vec(),
        times: history.times.clone(),
        positions,
    })
}

/// Trajectories from the truncated Taylor series, `x = q + Σ ξ^(s)(q) t^s`.
pub fn taylor_trajectories(
    series: &TaylorSeries,
    seeds: &[[f64; 3]],
    times: &[f64],
) -> Result<TrajectorySet> {
    let positions = times
        .iter()
        .map(|&t| Ok(series.positions_at(seeds, t)?.into_iter().map(wrap).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectorySet {
        seeds: seeds.to_vec(),
        times: times.to_vec(),
        positions,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonRow {
    pub t: f64,
    /// Largest periodic distance between matching particles.
    pub max_err: f64,
    pub rms_err: f64,
    /// `max_err` divided by the largest particle displacement in the
    /// reference set at this time (zero when nothing has moved).
    pub max_rel_err: f64,
}

/// Per-time errors of `b` against the reference `a`.
pub fn compare_trajectories(a: &TrajectorySet, b: &TrajectorySet) -> Result<Vec<ComparisonRow>> {
    if a.seeds != b.seeds || a.times.len() != b.times.len() {
        return Err(Error::TrajectoryMismatch);
    }
    if a.times.iter().zip(&b.times).any(|(x, y)| (x - y).abs() > 1e-12) {
        return Err(Error::TrajectoryMismatch);
    }
    let mut rows = Vec::with_capacity(a.times.len());
    for (ti, &t) in a.times.iter().enumerate() {
        let (pa, pb) = (&a.positions[ti], &b.positions[ti]);
        let mut max_err: f64 = 0.0;
        let mut sq = 0.0;
        let mut max_disp: f64 = 0.0;
        for ((x, y), q) in pa.iter().zip(pb).zip(&a.seeds) {
            let e = periodic_distance(*x, *y);
            max_err = max_err.max(e);
            sq += e * e;
            max_disp = max_disp.max(periodic_distance(*x, *q));
        }
        let count = pa.len().max(1) as f64;
        rows.push(ComparisonRow {
            t,
            max_err,
            rms_err: (sq / count).sqrt(),
            max_rel_err: if max_disp > 0.0 { max_err / max_disp } else { 0.0 },
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{Preset, CONSTANT_VELOCITY};

    #[test]
    fn periodic_metric() {
        let a = [0.1, 0.2, 0.3];
        assert_eq!(periodic_distance(a, a), 0.0);
        let b = [a[0] + std::f64::consts::PI, a[1], a[2]];
        assert!((periodic_distance(a, b) - std::f64::consts::PI).abs() < 1e-15);
        let c = [a[0] + TAU, a[1] - TAU, a[2]];
        assert!(periodic_distance(a, c) < 1e-15);
    }

    #[test]
    fn identical_sets_compare_to_zero() {
        let seeds = lattice_seeds(2);
        let set = TrajectorySet {
            seeds: seeds.clone(),
            times: vec![0.0, 1.0],
            positions: vec![seeds.clone(), seeds.clone()],
        };
        for row in compare_trajectories(&set, &set).unwrap() {
            assert_eq!(row.max_err, 0.0);
            assert_eq!(row.rms_err, 0.0);
        }
        let shifted = TrajectorySet {
            positions: vec![
                seeds.iter().map(|q| wrap([q[0] + std::f64::consts::PI, q[1], q[2]])).collect(),
                seeds.clone(),
            ],
            ..set.clone()
        };
        let rows = compare_trajectories(&set, &shifted).unwrap();
        assert!((rows[0].max_err - std::f64::consts::PI).abs() < 1e-14);
        let other = TrajectorySet {
            seeds: lattice_seeds(1),
            times: vec![0.0],
            positions: vec![lattice_seeds(1)],
        };
        assert!(matches!(
            compare_trajectories(&set, &other),
            Err(Error::TrajectoryMismatch)
        ));
    }

    #[test]
    fn steady_flows_stay_put() {
        let g = GridSpec::with_two_thirds(16).unwrap();
        for preset in [Preset::Shear, Preset::Constant] {
            let v0 = preset.velocity(g);
            let hist = euler_solve(&v0, 0.5, 0.05).unwrap();
            let end = hist.velocities.last().unwrap();
            assert!(end.max_difference(&v0).unwrap() <= 1e-10, "{preset}");
        }
    }

    #[test]
    fn constant_flow_trajectories_are_straight() {
        let g = GridSpec::with_two_thirds(16).unwrap();
        let hist = euler_solve(&Preset::Constant.velocity(g), 1.0, 0.1).unwrap();
        let seeds = lattice_seeds(2);
        let set = integrate_trajectories(&hist, &seeds).unwrap();
        for (ti, &t) in set.times.iter().enumerate() {
            for (x, q) in set.positions[ti].iter().zip(&seeds) {
                let want = wrap([
                    q[0] + CONSTANT_VELOCITY[0] * t,
                    q[1] + CONSTANT_VELOCITY[1] * t,
                    q[2] + CONSTANT_VELOCITY[2] * t,
                ]);
                assert!(periodic_distance(*x, want) < 1e-13);
            }
        }
    }

    #[test]
    fn stability_bound_enforced() {
        let g = GridSpec::with_two_thirds(16).unwrap();
        let v0 = Preset::TaylorGreen.velocity(g);
        assert!(matches!(euler_solve(&v0, 1.0, 1.0), Err(Error::Unstable { .. })));
    }

    #[test]
    fn history_rejects_out_of_range_times() {
        let g = GridSpec::with_two_thirds(16).unwrap();
        let hist = euler_solve(&Preset::TaylorGreen.velocity(g), 0.1, 0.05).unwrap();
        assert!(hist.velocity_at(0.2).is_err());
        assert!(hist.velocity_at(0.05).is_ok());
    }
}
