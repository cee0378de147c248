//! Bit-exact IEEE-754 arithmetic at arbitrary `(e, s)` formats.
//!
//! Finite values are handled as exact binary-scaled integers and rounded once;
//! special values (zeros, infinities, NaN) follow the IEEE-754 propagation rules.

mod arith;
mod enumerate;
mod format;
mod literal;
mod round;

pub use arith::{fp_compare, fp_eval, FpOp, FpPredicate};
pub use enumerate::{enumerate_sort, DEFAULT_ENUMERATION_BOUND};
pub use format::{bias, FpFormat, RoundingMode, MAX_EXPONENT_BITS, MAX_SIGNIFICAND_BITS};
pub use literal::{ExactRational, FpClass, FpLiteral};
