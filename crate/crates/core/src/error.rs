use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("degenerate coefficient: a*m + N - 2 = {0} must be positive")]
    DegenerateCoefficient(f64),

    #[error("radius {r} outside (0, {radius}]")]
    OutOfDomain { r: f64, radius: f64 },

    #[error("regime error: sigma = {sigma} is below the critical exponent {critical}")]
    Regime { sigma: f64, critical: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("initial data vanish identically; the bound is vacuous")]
    ZeroData,

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("time step {dt} exceeds the stability bound {bound}")]
    StabilityViolation { dt: f64, bound: f64 },

    #[error("negative value {value} in cell {cell} at t = {t}")]
    Negativity { cell: usize, value: f64, t: f64 },

    #[error("comparison margin {margin} below -{tolerance} at t = {t}")]
    ComparisonViolation { margin: f64, tolerance: f64, t: f64 },

    #[error("time {tau} lies beyond the trajectory horizon {horizon}")]
    Horizon { tau: f64, horizon: f64 },

    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
