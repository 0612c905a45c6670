use thiserror::Error;

/// Position-tagged parse failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("cyclic substitution bindings through `{0}`")]
    CyclicBindings(String),

    #[error("expression size limit exceeded during {0}")]
    SizeLimit(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("free symbol `{0}` has no assigned value")]
    UnboundSymbol(String),

    #[error("exponent is not rational-affine in symbols: {0}")]
    NonAffineExponent(String),

    #[error("cannot collect powers: {0}")]
    NotCollectable(String),

    #[error("exponent comparison undecided between `{0}` and `{1}`; case split required")]
    NeedCaseSplit(String, String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("no sign change found while scanning [{0}, {1}]")]
    NoBracket(f64, f64),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
