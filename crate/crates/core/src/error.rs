use thiserror::Error;

use crate::fields::Rank;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: expected {expected} samples, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("rank mismatch: expected {expected:?}, got {actual:?}")]
    RankMismatch { expected: Rank, actual: Rank },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("field has nonzero mean (|coeff(0)| = {0:e})")]
    NonZeroMean(f64),
    #[error("velocity is not solenoidal (max |div| amplitude = {0:e})")]
    NotSolenoidal(f64),
    #[error("coefficients up to order {needed} required, series has {available}")]
    MissingHistory { needed: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("step h = {h} exceeds the safety bound {bound}")]
    StepTooLarge { h: f64, bound: f64 },
    #[error("inverse map iteration did not converge (worst residual {0:e})")]
    ResampleDiverged(f64),
    #[error("time step {dt} violates the advective stability bound {bound}")]
    Unstable { dt: f64, bound: f64 },
    #[error("time {0} lies outside the stored history")]
    TimeOutOfRange(f64),
    #[error("trajectory sets do not share seeds and sample times")]
    TrajectoryMismatch,
    #[error("malformed field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
