use thiserror::Error;

use crate::fp::FpFormat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("invalid floating-point format ({ebits}, {sbits}): need 2 <= e <= 30 and 2 <= s <= 120")]
    InvalidFloatFormat { ebits: u32, sbits: u32 },
    #[error("invalid bit-vector width {0}: need 1 <= width <= 128")]
    InvalidBitVecWidth(u32),
    #[error("unknown rounding mode `{0}`")]
    UnknownRoundingMode(String),
    #[error("`{op}` expects {expected} arguments, got {found}")]
    Arity { op: String, expected: String, found: usize },
    #[error("`{op}` cannot be applied to arguments of sort {found}")]
    Mismatch { op: String, found: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FpError {
    #[error("literal field out of range for {format}")]
    FieldOutOfRange { format: FpFormat },
    #[error("sort {format} has more than {bound} values")]
    SortTooLarge { format: FpFormat, bound: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unsupported construct `{0}`")]
    UnsupportedConstruct(String),
    #[error("ill-sorted term: {0}")]
    SortMismatch(#[from] SortError),
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("symbol `{0}` declared twice")]
    Redeclared(String),
    #[error("invalid literal `{0}`")]
    InvalidLiteral(String),
}

/// Failures of an approximation's codec. The solver answers these by handing
/// the original formula to the fall-back solver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("value not expressible in the output theory: {0}")]
    UnsupportedValue(String),
    #[error("operation not supported by the encoding: {0}")]
    UnsupportedOp(String),
    #[error("decoding out of range: {0}")]
    Range(String),
    #[error("precision map does not match the approximation: {0}")]
    Precision(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse model at byte {offset}: {message}")]
pub struct ModelParseError {
    pub offset: usize,
    pub message: String,
}
