use thiserror::Error;

/// Errors produced by the engine.
///
/// Check failures are errors rather than report content so that callers can
/// propagate them with `?`; the CLI turns them back into `fail` records.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("not divisible: {0}")]
    NotDivisible(String),

    #[error("polynomial is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("polynomial is not antisymmetric: {0}")]
    NotAntisymmetric(String),

    #[error("element is not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("check `{check}` failed: {detail}")]
    CheckFailed { check: String, detail: String },

    #[error("index left the window [{lo}, {hi}] while rewriting")]
    WindowEscape { lo: i64, hi: i64 },

    #[error("unknown ideal family `{0}`")]
    UnknownFamily(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("linear system is empty: {0}")]
    EmptySystem(String),

    #[error("semicontinuity violated at (n={n}, l={l}): quotient {quotient} > reference {reference}")]
    SemicontinuityViolation {
        n: i64,
        l: usize,
        quotient: usize,
        reference: usize,
    },

    #[error("division by zero")]
    DivisionByZero,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn check(check: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::CheckFailed {
            check: check.into(),
            detail: detail.into(),
        }
    }
}
