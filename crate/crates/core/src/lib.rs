//! Approximation-refinement solving for quantifier-free floating-point formulas.

pub mod approx;
pub mod ast;
pub mod backend;
pub mod bv;
pub mod error;
pub mod eval;
pub mod fp;
pub mod precision;
pub mod reconstruct;
pub mod smtlib;
pub mod solver;
pub mod sort;
#[cfg(feature = "testing")]
pub mod testing;
pub mod value;

pub use ast::{Ast, Declaration, Formula, Label, Model, Op, RealOp, RealPredicate, SymbolKind};
pub use bv::{BitVecValue, BvOp, BvPredicate};
pub use error::{ApproxError, FpError, ModelParseError, ParseError, SortError};
pub use eval::{eval, eval_all, eval_bool, satisfies};
pub use fp::{FpFormat, FpLiteral, FpOp, FpPredicate, RoundingMode};
pub use sort::Sort;
pub use value::Value;
pub use smtlib::{parse_script, print_script, Script};
pub use approx::{Approximation, FixedPoint, RealArithmetic, ReducedPrecision};
pub use precision::{Precision, PrecisionMap, PrecisionOrder};
pub use backend::{Backend, BackendVerdict, Enumeration, ProcessSolver, UnknownReason};
pub use solver::{solve, solve_direct, Limits, SolveOutcome, SolveStats, Verdict};
