//! `cride`: experiment drivers for the Lagrangian Taylor solver.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | unexpected failure |
//! | 2 | bad flags or configuration file |
//! | 3 | `verify` found a failing check |
//! | 4 | invalid input (grid, parameters, non-solenoidal field, ...) |
//! | 5 | numerical failure (step too large, resampling or oracle instability) |
//! | 6 | I/O or file-format error |

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cride::Error;

use crate::commands::VerifyFailed;
use crate::config::{ConfigArgs, Settings, UsageError};

#[derive(Parser, Debug)]
#[command(name = "cride", version, about = "Lagrangian time-Taylor Euler solver and analyticity bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Per-order coefficient norms and radius estimates (coeffs.csv)
    Coeffs,
    /// Critical Q, guaranteed analyticity time and root curves (bounds.csv)
    Bounds,
    /// Time stepping with checkpoints (run.csv, summary.txt)
    Run,
    /// Taylor trajectories against the Eulerian oracle (compare.csv)
    Compare,
    /// Invariant suite; exit code 3 when a check fails (verify.csv)
    Verify,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerifyFailed>().is_some() {
        return 3;
    }
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e {
            Error::StepTooLarge { .. } | Error::ResampleDiverged(_) | Error::Unstable { .. } => 5,
            Error::Io(_) | Error::Format(_) => 6,
            _ => 4,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return 6;
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = Settings::resolve(&cli.config).and_then(|settings| {
        if settings.threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(settings.threads)
                .build_global()?;
        }
        match cli.command {
            Command::Coeffs => commands::coeffs(&settings),
            Command::Bounds => commands::bounds(&settings),
            Command::Run => commands::run(&settings),
            Command::Compare => commands::compare(&settings),
            Command::Verify => commands::verify(&settings),
        }
    });
    match result {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
