//! Run configuration: a flat `key=value` file whose entries are overridden
//! by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::Args;
use cride::fields::io::{parse_key_values, read_field};
use cride::fields::{GridSpec, SpectralField};
use cride::presets::Preset;
use sha2::{Digest, Sha256};

/// Environment variable that overrides the output directory of the
/// configuration file (an explicit `--out` still wins).
pub const OUT_DIR_ENV: &str = "CRIDE_OUT_DIR";

/// Every key the configuration file may contain.
pub const KEYS: &[&str] = &[
    "preset", "field", "seed", "n", "dealias", "order", "gamma", "theta", "theta_tilde",
    "omega_norm", "safety", "h_max", "h", "steps", "checkpoint_every", "t", "t_end", "dt",
    "seeds_per_axis", "zeta_samples", "margin_samples", "dump", "threads", "out",
];

#[derive(Args, Debug, Clone, Default)]
pub struct ConfigArgs {
    /// key=value configuration file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Initial condition: constant, shear, taylor-green, abc or random
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Initial velocity from a binary field file instead of a preset
    #[arg(long, global = true)]
    pub field: Option<PathBuf>,
    /// Seed for the random preset
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grid points per axis
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Retained fraction of the resolved wavenumbers
    #[arg(long, global = true)]
    pub dealias: Option<f64>,
    /// Series order S
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Hölder exponent
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Bound constant (defaults to 1/gamma)
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true)]
    pub theta_tilde: Option<f64>,
    /// Use this vorticity norm instead of measuring it
    #[arg(long, global = true)]
    pub omega_norm: Option<f64>,
    #[arg(long, global = true)]
    pub safety: Option<f64>,
    /// Ceiling on adaptive steps
    #[arg(long = "hmax", alias = "h-max", global = true)]
    pub h_max: Option<f64>,
    /// Fixed step size (adaptive when absent)
    #[arg(long, global = true)]
    pub h: Option<f64>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Write a checkpoint every this many steps (0 disables)
    #[arg(long, global = true)]
    pub checkpoint_every: Option<usize>,
    /// Evaluation time for verify
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Final time for compare
    #[arg(long, global = true)]
    pub t_end: Option<f64>,
    /// Eulerian oracle time step
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub seeds_per_axis: Option<usize>,
    /// Points of the zeta_2/zeta_3 curve written by bounds (0 disables)
    #[arg(long, global = true)]
    pub zeta_samples: Option<usize>,
    /// Times of the generating-function margin curve (0 disables)
    #[arg(long, global = true)]
    pub margin_samples: Option<usize>,
    /// Also write binary coefficient dumps
    #[arg(long, global = true)]
    pub dump: Option<bool>,
    /// Worker threads; results do not depend on it
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Invalid configuration or flags.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: String) -> anyhow::Error {
    UsageError(msg).into()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Preset(Preset),
    File(PathBuf),
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub source: Source,
    pub n: usize,
    pub dealias: f64,
    pub order: usize,
    pub gamma: f64,
    pub theta: Option<f64>,
    pub theta_tilde: Option<f64>,
    pub omega_norm: Option<f64>,
    pub safety: f64,
    pub h_max: f64,
    pub h: Option<f64>,
    pub steps: usize,
    pub checkpoint_every: usize,
    pub t: Option<f64>,
    pub t_end: f64,
    pub dt: f64,
    pub seeds_per_axis: usize,
    pub zeta_samples: usize,
    pub margin_samples: usize,
    pub dump: bool,
    pub threads: usize,
    pub out: PathBuf,
}

struct Layer<'a> {
    file: &'a BTreeMap<String, String>,
}

impl Layer<'_> {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key '{key}': cannot parse '{v}': {e}"))),
        }
    }
}

impl Settings {
    pub fn resolve(args: &ConfigArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                parse_key_values(&text)?
            }
            None => BTreeMap::new(),
        };
        for key in file.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(usage(format!("unknown config key '{key}'")));
            }
        }
        let l = Layer { file: &file };
        let seed = l.get(args.seed, "seed")?.unwrap_or(0);
        let field: Option<PathBuf> = l.get(args.field.clone(), "field")?;
        let preset: Option<String> = l.get(args.preset.clone(), "preset")?;
        let source = match (field, preset) {
            (Some(_), Some(_)) => {
                return Err(usage("give either a preset or a field file, not both".into()))
            }
            (Some(path), None) => Source::File(path),
            (None, p) => {
                let mut preset: Preset = p.as_deref().unwrap_or("taylor-green").parse()?;
                if let Preset::Random { seed: s } = &mut preset {
                    *s = seed;
                }
                Source::Preset(preset)
            }
        };
        let out = match (&args.out, std::env::var_os(OUT_DIR_ENV)) {
            (Some(p), _) => p.clone(),
            (None, Some(env)) => PathBuf::from(env),
            (None, None) => l.get(None, "out")?.unwrap_or_else(|| PathBuf::from("out")),
        };
        Ok(Self {
            source,
            n: l.get(args.n, "n")?.unwrap_or(32),
            dealias: l.get(args.dealias, "dealias")?.unwrap_or(GridSpec::TWO_THIRDS),
            order: l.get(args.order, "order")?.unwrap_or(12),
            gamma: l.get(args.gamma, "gamma")?.unwrap_or(0.5),
            theta: l.get(args.theta, "theta")?,
            theta_tilde: l.get(args.theta_tilde, "theta_tilde")?,
            omega_norm: l.get(args.omega_norm, "omega_norm")?,
            safety: l.get(args.safety, "safety")?.unwrap_or(0.5),
            h_max: l.get(args.h_max, "h_max")?.unwrap_or(0.5),
            h: l.get(args.h, "h")?,
            steps: l.get(args.steps, "steps")?.unwrap_or(10),
            checkpoint_every: l.get(args.checkpoint_every, "checkpoint_every")?.unwrap_or(0),
            t: l.get(args.t, "t")?,
            t_end: l.get(args.t_end, "t_end")?.unwrap_or(0.1),
            dt: l.get(args.dt, "dt")?.unwrap_or(0.0025),
            seeds_per_axis: l.get(args.seeds_per_axis, "seeds_per_axis")?.unwrap_or(4),
            zeta_samples: l.get(args.zeta_samples, "zeta_samples")?.unwrap_or(0),
            margin_samples: l.get(args.margin_samples, "margin_samples")?.unwrap_or(0),
            dump: l.get(args.dump, "dump")?.unwrap_or(false),
            threads: l.get(args.threads, "threads")?.unwrap_or(0),
            out,
        })
    }

    pub fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.n, self.dealias)?)
    }

    /// Initial velocity, validated to be solenoidal.
    pub fn initial_velocity(&self) -> Result<SpectralField> {
        let v = match &self.source {
            Source::Preset(p) => p.velocity(self.grid()?),
            Source::File(path) => {
                let v = read_field(path)
                    .with_context(|| format!("reading field {}", path.display()))?;
                if v.grid().n() != self.n {
                    log::info!("grid size {} taken from {}", v.grid().n(), path.display());
                }
                v
            }
        };
        cride::stepper::FlowState::new(v.clone(), 0.0)?;
        Ok(v)
    }

    /// Canonical text of the settings that influence numerical output.
    /// The output directory and thread count are excluded.
    pub fn canonical(&self) -> String {
        let source = match &self.source {
            Source::Preset(Preset::Random { seed }) => format!("preset=random\nseed={seed}"),
            Source::Preset(p) => format!("preset={p}"),
            Source::File(path) => format!("field={}", path.display()),
        };
        let opt = |v: Option<f64>| v.map_or_else(|| "auto".to_string(), |x| x.to_string());
        format!(
            "{source}\nn={}\ndealias={}\norder={}\ngamma={}\ntheta={}\ntheta_tilde={}\n\
             omega_norm={}\nsafety={}\nh_max={}\nh={}\nsteps={}\ncheckpoint_every={}\nt={}\n\
             t_end={}\ndt={}\nseeds_per_axis={}\nzeta_samples={}\nmargin_samples={}\ndump={}\n",
            self.n,
            self.dealias,
            self.order,
            self.gamma,
            opt(self.theta),
            opt(self.theta_tilde),
            opt(self.omega_norm),
            self.safety,
            self.h_max,
            opt(self.h),
            self.steps,
            self.checkpoint_every,
            opt(self.t),
            self.t_end,
            self.dt,
            self.seeds_per_axis,
            self.zeta_samples,
            self.margin_samples,
            self.dump,
        )
    }

    /// First 16 hex digits of the SHA-256 of [`Settings::canonical`].
    pub fn fingerprint(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn out_dir(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.out)
            .with_context(|| format!("creating {}", self.out.display()))?;
        Ok(&self.out)
    }
}
