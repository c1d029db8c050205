use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("transformation matrix is not orthogonal (max |S·Sᵀ − 1| = {max_deviation:.3e})")]
    NonOrthogonalTransform { max_deviation: f64 },

    #[error("frequency {index} is not strictly positive ({value})")]
    NonPositiveFrequency { index: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative or non-finite action at index {index} ({value})")]
    InvalidAction { index: usize, value: f64 },

    #[error("invalid subsystem selector: {0}")]
    InvalidSelector(String),

    #[error("index {index} out of range for a system with {n_dof} degrees of freedom")]
    IndexOutOfRange { index: usize, n_dof: usize },

    #[error("function arity {function} does not match torus dimension {torus}")]
    ArityMismatch { function: usize, torus: usize },

    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadrature(String),

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("matrix dimension {0} is odd")]
    OddDimension(usize),

    #[error("actions are not uniform; scaled spectra need a single action value")]
    NonUniformActions,

    #[error("scale constant must be positive, got {0}")]
    NonPositiveBeta(f64),

    #[error("covariance matrix is singular (det = {0:.3e})")]
    SingularCovariance(f64),

    #[error("symplectic eigenvalue {0} is below 1/2; covariance is not physical")]
    EigenvalueBelowHalf(f64),

    #[error("purity and symplectic spectrum disagree by {0:.3e}")]
    InconsistentSpectrum(f64),

    #[error("hbar must be positive, got {0}")]
    NonPositiveHbar(f64),

    #[error("parameters outside the admissible region: {0}")]
    ParameterRegionViolation(String),

    #[error("series term of power {power} in the action is not covered by the quantization rules")]
    UnsupportedPower { power: usize },

    #[error("energy {0} admits no turning point")]
    NoTurningPoint(f64),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("could not bracket the energy for action {0}")]
    RootBracketFailure(f64),

    #[error("relative energy drift {0:.3e} exceeds tolerance")]
    EnergyDriftExceeded(f64),

    #[error("orbit did not close: {0}")]
    PeriodNotFound(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
