use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("SingularMatrix: {0}")]
    SingularMatrix(String),

    #[error("TooManyLevels: enumeration would exceed {limit} levels")]
    TooManyLevels { limit: usize },

    #[error("OnCriticalSurface: q = {q} lies on critical level n_{k} = {level}")]
    OnCriticalSurface { k: usize, level: f64, q: f64 },

    #[error("OutOfRange: q = {q} exceeds the largest enumerated level {largest}")]
    OutOfRange { q: f64, largest: f64 },

    #[error("UnalignedExponent: coefficient {coefficient} at exponent {exponent} is not a critical level")]
    UnalignedExponent { exponent: f64, coefficient: i64 },

    #[error("CoefficientOverflow: series coefficient does not fit in 64 bits")]
    CoefficientOverflow,

    #[error("ZeroMass: total mass {0} is not positive")]
    ZeroMass(f64),

    #[error("NegativeRho: rho[{index}] = {value} is negative")]
    NegativeRho { index: usize, value: f64 },

    #[error("HypothesisViolation: {0}")]
    HypothesisViolation(String),

    #[error("PreconditionFailed: {0}")]
    PreconditionFailed(String),

    #[error("DegenerateDirection: quadratic form {0} is not positive")]
    DegenerateDirection(f64),

    #[error("NegativeGamma: gamma[{index}] = {value} is outside the solver range")]
    NegativeGamma { index: usize, value: f64 },

    #[error("ZeroMassDensity: component {component} has mean density {value}")]
    ZeroMassDensity { component: usize, value: f64 },

    #[error("NotSubcritical: q = {q} is not below the first critical level {first_level}")]
    NotSubcritical { q: f64, first_level: f64 },

    #[error("NoConvergence: continuation step {step} stopped after {iterations} Newton iterations, residual {residual:e}")]
    NoConvergence { step: usize, iterations: usize, residual: f64 },

    #[error("StepFailure: damping fell below {floor:e} at continuation step {step}, residual {residual:e}")]
    StepFailure { step: usize, floor: f64, residual: f64 },

    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short variant name, used by the CLI when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SingularMatrix(_) => "SingularMatrix",
            Error::TooManyLevels { .. } => "TooManyLevels",
            Error::OnCriticalSurface { .. } => "OnCriticalSurface",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::UnalignedExponent { .. } => "UnalignedExponent",
            Error::CoefficientOverflow => "CoefficientOverflow",
            Error::ZeroMass(_) => "ZeroMass",
            Error::NegativeRho { .. } => "NegativeRho",
            Error::HypothesisViolation(_) => "HypothesisViolation",
            Error::PreconditionFailed(_) => "PreconditionFailed",
            Error::DegenerateDirection(_) => "DegenerateDirection",
            Error::NegativeGamma { .. } => "NegativeGamma",
            Error::ZeroMassDensity { .. } => "ZeroMassDensity",
            Error::NotSubcritical { .. } => "NotSubcritical",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::StepFailure { .. } => "StepFailure",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
