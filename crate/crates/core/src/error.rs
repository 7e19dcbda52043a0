use thiserror::Error;

/// Errors raised by the geometry, ODE and flow solvers.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside the half-space: height {height} must be positive")]
    OutsideHalfSpace { height: f64 },

    #[error("rotational profile evaluated on the axis (s = {s})")]
    AxisSingularity { s: f64 },

    #[error("dimension n = {0} is invalid, need n >= 2")]
    InvalidDimension(usize),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("integration failed at sigma = {sigma}: step size underflow at state (s={s}, z={z}, alpha={alpha})")]
    StepUnderflow { sigma: f64, s: f64, z: f64, alpha: f64 },

    #[error("integration exceeded {max_steps} steps at sigma = {sigma} (s={s}, z={z}, alpha={alpha})")]
    TooManySteps { max_steps: usize, sigma: f64, s: f64, z: f64, alpha: f64 },

    #[error("branch tail is not yet asymptotic: {0}")]
    NotAsymptotic(String),

    #[error("no samples in the {0} chart region")]
    NoChartData(&'static str),

    #[error("flow blew up at node {node} (t = {t})")]
    BlowUp { node: usize, t: f64 },

    #[error("time step {dt} violates the stability limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("no admissible barrier: {0}")]
    NoBarrier(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
