use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator {denominator} is not invertible modulo {modulus}{}", at_index(.index))]
    DenominatorNotInvertible {
        denominator: String,
        modulus: u64,
        index: Option<usize>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("expansion has order {have}, need at least {need}")]
    OrderTooSmall { have: usize, need: usize },

    #[error("exponent must be non-zero")]
    ZeroExponent,

    #[error("exponent mismatch: expansion is for r = {have}, expected {expected}")]
    ExponentMismatch { have: String, expected: String },

    #[error("r = {r} has residue {r_residue} mod {modulus}, family requires {required}")]
    ResidueMismatch {
        r: String,
        r_residue: u64,
        required: u64,
        modulus: u64,
    },

    #[error("r = {r} has residue {r_residue} mod {modulus}, which no congruence family covers")]
    NoMatchingFamily {
        r: String,
        r_residue: u64,
        modulus: u64,
    },

    #[error("non-integral value {value} at index {index}")]
    IntegralityViolation { index: usize, value: String },

    #[error(
        "engines disagree at index {index}: {left} ({left_engine}) vs {right} ({right_engine})"
    )]
    AgreementFailure {
        index: usize,
        left: String,
        right: String,
        left_engine: String,
        right_engine: String,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

fn at_index(index: &Option<usize>) -> String {
    index.map(|i| format!(" at index {i}")).unwrap_or_default()
}

impl Error {
    /// Attaches a coefficient index to a non-invertible-denominator error.
    pub fn at(self, i: usize) -> Self {
        match self {
            Error::DenominatorNotInvertible {
                denominator,
                modulus,
                ..
            } => Error::DenominatorNotInvertible {
                denominator,
                modulus,
                index: Some(i),
            },
            other => other,
        }
    }

    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Domain(_) => 2,
            Error::DenominatorNotInvertible { .. } => 3,
            Error::ResidueMismatch { .. } | Error::NoMatchingFamily { .. } => 4,
            Error::IntegralityViolation { .. } | Error::AgreementFailure { .. } => 5,
            Error::OrderMismatch { .. }
            | Error::OrderTooSmall { .. }
            | Error::ZeroExponent
            | Error::ExponentMismatch { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
