use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("input tensor is not trace-free")]
    NotTraceFree,

    #[error("{0}")]
    InvalidFactor(String),

    #[error("operation not supported for this conformal factor: {0}")]
    UnsupportedFactor(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("axis {axis} out of range (allowed 0..{limit})")]
    AxisOutOfRange { axis: usize, limit: usize },

    #[error("index {index} outside the legal range {lo}..={hi}")]
    IndexRange { index: usize, lo: usize, hi: usize },

    #[error("the denominator n + 2(p - 1) vanishes for n = {n}, p = {p}")]
    SingularDenominator { n: usize, p: usize },

    #[error("implicit midpoint iteration did not converge at t = {t}")]
    NonConvergence { t: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
