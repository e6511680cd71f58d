use thiserror::Error;

/// Errors produced by model construction, simulation and estimation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian (asymmetry {residue:.3e})")]
    NotHermitian { residue: f64 },

    #[error("non-finite entry in operator")]
    NonFinite,

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("impossible observation at step {step}: normalizer {normalizer:.3e}")]
    ImpossibleObservation { step: usize, normalizer: f64 },

    #[error("numerical corruption at step {step}: {detail}")]
    NumericalCorruption { step: usize, detail: String },

    #[error("zero auxiliary likelihood at step {step}; floor the auxiliary kernel or use a smoother auxiliary model")]
    ZeroAuxiliaryLikelihood { step: usize },

    #[error("enumeration budget exceeded: {terms} terms > {budget}")]
    BudgetExceeded { terms: u128, budget: u128 },

    #[error("trajectory format error at line {line}: {msg}")]
    TrajectoryFormat { line: usize, msg: String },

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Coarse category, used for CLI exit codes and CSV status cells.
    pub fn category(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_)
            | Error::NotHermitian { .. }
            | Error::NonFinite
            | Error::InvalidProbability(_)
            | Error::InvalidModel(_)
            | Error::Config { .. }
            | Error::TrajectoryFormat { .. } => "validation",
            Error::ImpossibleObservation { .. }
            | Error::NumericalCorruption { .. }
            | Error::ZeroAuxiliaryLikelihood { .. }
            | Error::BudgetExceeded { .. } => "runtime",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
