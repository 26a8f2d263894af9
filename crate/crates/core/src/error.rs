use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} degrees of freedom, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadratic part is not elliptic: eigenvalue {re:+.3e}{im:+.3e}i has a nonzero real part"
    )]
    NotElliptic { re: f64, im: f64 },

    #[error("degenerate frequencies: |omega_{i}| and |omega_{j}| coincide ({value:.6e})")]
    Degenerate { i: usize, j: usize, value: f64 },

    #[error("small divisor: k = {k:?} gives |k.omega| = {divisor:.3e} below the resonance guard")]
    SmallDivisor { k: Vec<i64>, divisor: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("implicit step failed to converge at t = {time}")]
    StepFailure { time: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// True for failures caused by the numerics (resonances, divergent steps)
    /// rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SmallDivisor { .. }
                | Error::StepFailure { .. }
                | Error::NotElliptic { .. }
                | Error::Degenerate { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
