use thiserror::Error;

use crate::fine::NoJoint;
use crate::measurement::MarginalConvention;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Squared amplitudes or mixture weights do not sum to one.
    #[error("state is not normalized: total probability is {total}")]
    Normalization { total: f64 },

    #[error("value {value} for `{field}` is not a finite number")]
    NonFinite { field: &'static str, value: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid POVM element: {0}")]
    InvalidPovm(String),

    /// A probability or angle left its admissible range.
    #[error("`{field}` = {value} is outside its admissible range: {reason}")]
    Range {
        field: &'static str,
        value: f64,
        reason: String,
    },

    #[error("operation requires the {expected} convention, got {found}")]
    Convention {
        expected: MarginalConvention,
        found: MarginalConvention,
    },

    #[error("no joint distribution reproduces the marginals")]
    NoJoint(Box<NoJoint>),

    #[error("dilemma condition violated: {0}")]
    DilemmaViolation(String),

    #[error("payoff table has the wrong shape for this analysis: {0}")]
    Shape(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("bad parameter at `{path}`: {message}")]
    Param { path: String, message: String },
}

impl Error {
    pub(crate) fn range(field: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::Range {
            field,
            value,
            reason: reason.into(),
        }
    }

    pub(crate) fn param(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Param {
            path: path.into(),
            message: message.into(),
        }
    }
}
