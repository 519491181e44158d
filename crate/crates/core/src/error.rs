use std::fmt;

use thiserror::Error;

/// Which half of the pencil an entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entry {
    A,
    B,
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::A => f.write_str("a"),
            Entry::B => f.write_str("b"),
        }
    }
}

/// Errors raised by the spectral solver.
///
/// Indices carried by the variants are 1-based, matching the usual
/// `a_1..a_N`, `b_1..b_{N-1}`, `lambda_1..lambda_N` labelling.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    #[error("entry {which}_{index} must be positive")]
    NonPositiveEntry { index: usize, which: Entry },
    #[error("entry {which}_{index} is not finite")]
    NonFiniteEntry { index: usize, which: Entry },
    #[error("invalid length: {0}")]
    InvalidLength(String),
    #[error("invalid spectral data: {0}")]
    InvalidSpectralData(String),
    #[error("weight {0} is not positive")]
    NonPositiveWeight(usize),
    #[error("weights sum to {0}, which is not within 1e-9 of 1")]
    WeightSum(f64),
    #[error("no sign change in bracket ({lo}, {hi})")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("evaluation at pole {0}")]
    PoleEvaluation(usize),
    #[error("continued-fraction coefficient {which} = {value} is not positive")]
    NonPositiveCoefficient { which: Entry, value: f64 },
    #[error("weight {index} is below the representable floor{}", t.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    DegenerateWeight { index: usize, t: Option<f64> },
    #[error("norm of P_{0} underflows")]
    ZeroNorm(usize),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("flow function {0} is not strictly monotone")]
    NonMonotoneFlow(String),
    #[error("invalid flow specification: {0}")]
    InvalidFlow(String),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("eigenvector matrix is singular to working precision")]
    SingularEigenvectorMatrix,
    #[error("positivity lost at t = {t}")]
    PositivityLoss { t: f64 },
    #[error("invalid time grid: {0}")]
    InvalidTimes(String),
    #[error("invalid Newtonian state: {0}")]
    InvalidState(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveEntry { .. } => "NonPositiveEntry",
            Error::NonFiniteEntry { .. } => "NonFiniteEntry",
            Error::InvalidLength(_) => "InvalidLength",
            Error::InvalidSpectralData(_) => "InvalidSpectralData",
            Error::NonPositiveWeight(_) => "NonPositiveWeight",
            Error::WeightSum(_) => "WeightSum",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::PoleEvaluation(_) => "PoleEvaluation",
            Error::NonPositiveCoefficient { .. } => "NonPositiveCoefficient",
            Error::DegenerateWeight { .. } => "DegenerateWeight",
            Error::ZeroNorm(_) => "ZeroNorm",
            Error::Overflow(_) => "Overflow",
            Error::NonMonotoneFlow(_) => "NonMonotoneFlow",
            Error::InvalidFlow(_) => "InvalidFlow",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::SingularEigenvectorMatrix => "SingularEigenvectorMatrix",
            Error::PositivityLoss { .. } => "PositivityLoss",
            Error::InvalidTimes(_) => "InvalidTimes",
            Error::InvalidState(_) => "InvalidState",
        }
    }

    /// True for failures of the numerical machinery, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BracketFailure { .. }
                | Error::PositivityLoss { .. }
                | Error::DegenerateWeight { .. }
                | Error::ZeroNorm(_)
                | Error::Overflow(_)
                | Error::SingularEigenvectorMatrix
                | Error::NonPositiveWeight(_)
                | Error::WeightSum(_)
                | Error::NonPositiveCoefficient { .. }
                | Error::PoleEvaluation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
