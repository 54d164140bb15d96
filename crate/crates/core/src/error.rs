use thiserror::Error;

/// Errors raised by the phaseclass routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid conventions: {0}")]
    InvalidConventions(String),
    #[error("shape matrix M is singular")]
    SingularM,
    #[error("state is not normalizable: Re(L M^-1) is not positive definite")]
    NotNormalizable,
    #[error("shape matrix L M^-1 is not symmetric (defect {0:e})")]
    AsymmetricShape(f64),
    #[error("invalid K matrix: {0}")]
    InvalidK(String),
    #[error("invalid Gaussian parameters: {0}")]
    InvalidParams(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported mode count {0} (only 1 and 2 are supported)")]
    UnsupportedDimension(usize),
    #[error("invalid Bogoliubov map: {0}")]
    InvalidMap(String),
    #[error("probability vector not normalized (sum = {0})")]
    NotNormalized(f64),
    #[error("negative probability {0}")]
    NegativeProbability(f64),
    #[error("partition does not cover indices disjointly: {0}")]
    BadPartition(String),
    #[error("support mismatch at index {0}: relative information is infinite")]
    SupportMismatch(usize),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("projectors do not form an orthogonal resolution of identity: {0}")]
    NotAResolution(String),
    #[error("P-symbol is not a positive function (non-classical state)")]
    NotClassical,
    #[error("empty scan range")]
    EmptyRange,
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("negative mass {0:e} on Husimi grid")]
    NegativeMass(f64),
    #[error("momentum aliasing: edge mass {0:e}")]
    Aliasing(f64),
    #[error("integrator failed: {0}")]
    StepFailure(String),
    #[error("hessian unavailable: {0}")]
    HessianError(String),
    #[error("series too short: {0}")]
    TooShort(String),
    #[error("potential is not quadratic")]
    NonQuadratic,
    #[error("invalid bath: {0}")]
    InvalidBath(String),
    #[error("threshold not reached")]
    NotReached,
    #[error("irregular cell: volume {volume:e} <= 2*pi*hbar^n = {minimum:e}")]
    IrregularCell { volume: f64, minimum: f64 },
    #[error("state not localised: defect {defect:e} > epsilon {epsilon:e}")]
    NotLocalised { defect: f64, epsilon: f64 },
    #[error("negative input {0}")]
    NegativeInput(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
