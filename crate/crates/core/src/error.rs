use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Fock dimension {0} (need at least 2)")]
    InvalidDimension(usize),
    #[error("invalid frequency {0} (must be positive)")]
    InvalidFrequency(f64),
    #[error("unsupported temperature: epsilon = {0} must be positive")]
    UnsupportedTemperature(f64),
    #[error("unsupported regime: lambda = {0} must be negative")]
    UnsupportedRegime(f64),
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("no preimage within r in [0, 10], epsilon in (1e-4, 50]: {0}")]
    OutOfDomain(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("closed form requires phi = 0 (got {0}); use to_gaussian_moments")]
    WrongBranch(f64),
    #[error("grid does not cover six standard deviations along {0}")]
    Coverage(&'static str),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("design infeasible at t = {t}: {reason}")]
    DesignInfeasible { t: f64, reason: String },
    #[error("squeezing rate changes sign at t = {0}; a pi phase jump would be required")]
    SignSplit(f64),
    #[error("step-size error: {reason}; suggested dt = {suggested_dt:e}")]
    StepSize { reason: String, suggested_dt: f64 },
    #[error("ill-posed forward integration at t = {t}: {reason}")]
    IllPosed { t: f64, reason: String },
    #[error("invalid laser configuration: {0}")]
    InvalidLasers(String),
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}
