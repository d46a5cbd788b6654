//! Subcommand drivers. Each writes its CSV files into the output directory
//! and returns a short summary for stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use cride::bounds::{
    holder_norm, q_critical, t_analyticity, verify_generating_bound, zeta_curve, BoundConfig,
    HolderOptions,
};
use cride::fields::io::write_field;
use cride::fields::{curl, divergence};
use cride::oracle::{
    compare_trajectories, euler_solve, integrate_trajectories, lattice_seeds, taylor_trajectories,
};
use cride::stepper::{adaptive_step, step, write_checkpoint, FlowState, StepConfig};
use cride::taylor::TaylorSeries;

use crate::config::Settings;

/// CSV text with a fingerprint comment line and a column header.
struct Csv {
    text: String,
}

impl Csv {
    fn new(settings: &Settings, command: &str, columns: &[&str]) -> Self {
        let mut text = format!("# cride {command} fingerprint={}\n", settings.fingerprint());
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, &self.text).with_context(|| format!("writing {}", path.display()))
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Suite assertions that did not hold.
#[derive(Debug)]
pub struct VerifyFailed(pub Vec<String>);

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0.join(", "))
    }
}

impl std::error::Error for VerifyFailed {}

fn bound_config(s: &Settings) -> Result<BoundConfig> {
    let theta = s.theta.unwrap_or(1.0 / s.gamma);
    Ok(BoundConfig::new(s.gamma, theta, s.theta_tilde.unwrap_or(1.0 / s.gamma))?)
}

pub fn coeffs(s: &Settings) -> Result<String> {
    let v0 = s.initial_velocity()?;
    // Zero vorticity makes the map affine: the series stops after one term.
    let order = if curl(&v0)?.max_amplitude() == 0.0 { 1 } else { s.order };
    let series = TaylorSeries::build(&v0, order)?;
    let out = s.out_dir()?;
    let mut csv = Csv::new(s, "coeffs", &["s", "xi_sup", "lap_a_sup", "lap_b_sup", "radius"]);
    for (norms, radius) in series.diagnostics() {
        csv.row(&[
            norms.order.to_string(),
            num(norms.xi_sup),
            num(norms.lap_a_sup),
            num(norms.lap_b_sup),
            radius.map_or_else(String::new, num),
        ]);
    }
    csv.write(&out.join("coeffs.csv"))?;
    if s.dump {
        let dir = out.join("coefficients");
        fs::create_dir_all(&dir)?;
        for k in 1..=series.order() {
            write_field(dir.join(format!("xi_{k:03}.field")), series.coefficient(k))?;
        }
    }
    let radius = if order >= 4 { series.estimate_radius()? } else { f64::INFINITY };
    Ok(format!("orders={}\nradius={}\n", series.order(), num(radius)))
}

pub fn bounds(s: &Settings) -> Result<String> {
    let config = bound_config(s)?;
    let v0 = s.initial_velocity()?;
    let omega_norm = match s.omega_norm {
        Some(w) => w,
        None => holder_norm(&curl(&v0)?, config.gamma)?,
    };
    let q_c = q_critical(config.theta);
    let t_c = t_analyticity(omega_norm, &config)?;
    let out = s.out_dir()?;
    let mut csv = Csv::new(
        s,
        "bounds",
        &["gamma", "theta", "theta_tilde", "omega_norm", "Q_c", "t_c"],
    );
    csv.row(&[
        num(config.gamma),
        num(config.theta),
        num(config.theta_tilde),
        num(omega_norm),
        num(q_c),
        num(t_c),
    ]);
    csv.write(&out.join("bounds.csv"))?;

    if s.zeta_samples > 0 {
        let mut z = Csv::new(s, "bounds", &["Q", "zeta2", "zeta3"]);
        for (q, z2, z3) in zeta_curve(config.theta, s.zeta_samples)? {
            z.row(&[num(q), num(z2), num(z3)]);
        }
        z.write(&out.join("zeta.csv"))?;
    }
    if s.margin_samples > 0 {
        let series = TaylorSeries::build(&v0, s.order)?;
        let span = if t_c.is_finite() { t_c } else { 1.0 };
        let last = (s.margin_samples - 1).max(1) as f64;
        let times: Vec<f64> = (0..s.margin_samples).map(|i| span * i as f64 / last).collect();
        let report = verify_generating_bound(&series, &config, &times, &HolderOptions::default())?;
        let mut m = Csv::new(s, "bounds", &["t", "A", "B", "zeta", "Q", "zeta2", "holds"]);
        for r in &report.samples {
            m.row(&[
                num(r.t),
                num(r.a),
                num(r.b),
                num(r.zeta),
                num(r.q),
                r.zeta2.map_or_else(String::new, num),
                r.holds.to_string(),
            ]);
        }
        m.write(&out.join("margin.csv"))?;
    }
    Ok(format!(
        "gamma={}\ntheta={}\nomega_norm={}\nQ_c={}\nt_c={}\n",
        num(config.gamma),
        num(config.theta),
        num(omega_norm),
        num(q_c),
        num(t_c)
    ))
}

fn step_config(s: &Settings) -> StepConfig {
    StepConfig {
        order: s.order,
        safety: s.safety,
        h_max: s.h_max,
        ..StepConfig::default()
    }
}

pub fn run(s: &Settings) -> Result<String> {
    let config = step_config(s);
    let mut state = FlowState::new(s.initial_velocity()?, 0.0)?;
    let e0 = state.diagnostics.energy;
    let out = s.out_dir()?;
    let mut csv = Csv::new(
        s,
        "run",
        &["step", "time", "h", "energy", "max_vorticity", "radius", "resample_error"],
    );
    let d = &state.diagnostics;
    csv.row(&[
        "0".into(),
        num(0.0),
        String::new(),
        num(d.energy),
        num(d.max_vorticity),
        String::new(),
        num(0.0),
    ]);
    for k in 1..=s.steps {
        let h = match s.h {
            Some(h) => h,
            None => adaptive_step(&state, &config)?,
        };
        state = step(&state, h, &config)?;
        let d = &state.diagnostics;
        log::info!("step {k}: t = {:.4}, energy = {:.12e}", state.time, d.energy);
        csv.row(&[
            k.to_string(),
            num(state.time),
            num(h),
            num(d.energy),
            num(d.max_vorticity),
            num(d.radius_estimate),
            num(d.resample_error),
        ]);
        if s.checkpoint_every > 0 && k % s.checkpoint_every == 0 {
            let dir = out.join("checkpoints");
            fs::create_dir_all(&dir)?;
            write_checkpoint(&dir, &format!("step_{k:04}"), &state)?;
        }
    }
    csv.write(&out.join("run.csv"))?;
    write_checkpoint(out, "final", &state)?;
    let drift = (state.diagnostics.energy - e0).abs() / e0;
    let mut summary = String::new();
    writeln!(summary, "fingerprint={}", s.fingerprint())?;
    writeln!(summary, "steps={}", state.diagnostics.steps)?;
    writeln!(summary, "time={}", num(state.time))?;
    writeln!(summary, "energy_drift={}", num(drift))?;
    writeln!(summary, "resample_error={}", num(state.diagnostics.resample_error))?;
    fs::write(out.join("summary.txt"), &summary)?;
    Ok(summary)
}

pub fn compare(s: &Settings) -> Result<String> {
    let v0 = s.initial_velocity()?;
    let seeds = lattice_seeds(s.seeds_per_axis);
    let history = euler_solve(&v0, s.t_end, s.dt)?;
    let reference = integrate_trajectories(&history, &seeds)?;
    let series = TaylorSeries::build(&v0, s.order)?;
    let taylor = taylor_trajectories(&series, &seeds, &reference.times)?;
    let rows = compare_trajectories(&reference, &taylor)?;
    let out = s.out_dir()?;

    let mut csv = Csv::new(s, "compare", &["t", "max_err", "rms_err", "max_rel_err"]);
    for r in &rows {
        csv.row(&[num(r.t), num(r.max_err), num(r.rms_err), num(r.max_rel_err)]);
    }
    csv.write(&out.join("compare.csv"))?;

    let mut paths = Csv::new(s, "compare", &["t", "seed", "method", "x1", "x2", "x3"]);
    for (set, method) in [(&reference, "eulerian"), (&taylor, "taylor")] {
        for (ti, &t) in set.times.iter().enumerate() {
            for (k, x) in set.positions[ti].iter().enumerate() {
                paths.row(&[num(t), k.to_string(), method.into(), num(x[0]), num(x[1]), num(x[2])]);
            }
        }
    }
    paths.write(&out.join("trajectories.csv"))?;

    let worst = rows.iter().map(|r| r.max_rel_err).fold(0.0, f64::max);
    Ok(format!("seeds={}\nmax_rel_err={}\n", seeds.len(), num(worst)))
}

struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
}

pub fn verify(s: &Settings) -> Result<String> {
    let v0 = s.initial_velocity()?;
    let series = TaylorSeries::build(&v0, s.order.max(4))?;
    let radius = series.estimate_radius()?;
    let t = s.t.unwrap_or_else(|| (0.25 * radius).min(0.1));
    let mut recursion: f64 = 0.0;
    for k in 1..=series.order() {
        let (c, d) = series.recursion_residual(k)?;
        recursion = recursion.max(c).max(d);
    }
    let checks = [
        Check {
            name: "initial_divergence",
            value: divergence(&v0)?.max_amplitude(),
            threshold: 1e-12,
        },
        Check {
            name: "recursion_residual",
            value: recursion,
            threshold: 1e-10,
        },
        Check {
            name: "unit_jacobian",
            value: series.jacobian(t).max_det_error(),
            threshold: 1e-6,
        },
        Check {
            name: "cauchy_invariants",
            value: series.cauchy_invariant_residual(t),
            threshold: 1e-6,
        },
    ];
    let out = s.out_dir()?;
    let mut csv = Csv::new(s, "verify", &["check", "t", "value", "threshold", "pass"]);
    let mut failed = Vec::new();
    let mut summary = String::new();
    for c in &checks {
        let pass = c.value <= c.threshold;
        if !pass {
            failed.push(c.name.to_string());
        }
        csv.row(&[
            c.name.into(),
            num(t),
            num(c.value),
            num(c.threshold),
            pass.to_string(),
        ]);
        writeln!(summary, "{} {}: {} <= {}", if pass { "PASS" } else { "FAIL" }, c.name, num(c.value), num(c.threshold))?;
    }
    csv.write(&out.join("verify.csv"))?;
    print!("{summary}");
    if failed.is_empty() {
        Ok(String::new())
    } else {
        Err(VerifyFailed(failed).into())
    }
}
