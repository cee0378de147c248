//! Decision procedures for approximate formulas: an exhaustive enumerator
//! for tiny sorts and external SMT solvers driven over SMT-LIB text.

mod enumeration;
mod process;

pub use enumeration::{Enumeration, DEFAULT_ENUMERATION_BUDGET};
pub use process::ProcessSolver;

use std::fmt;
use std::time::Duration;

use crate::ast::{Formula, Model};
use crate::error::ModelParseError;
use crate::smtlib::sexp::{parse_sexprs, SExpr};
use crate::smtlib::{parse_constant, parse_sort};
use crate::sort::Sort;
use crate::value::Value;
use crate::{BitVecValue, FpLiteral, RoundingMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout,
    /// The solver answered `unknown`.
    Incomplete,
    /// The enumeration domain exceeds the budget.
    SortTooLarge,
    /// The formula uses a sort or logic the backend does not handle.
    Unsupported(String),
    /// Spawn failure, nonzero exit, or an unparsable answer.
    BackendFailure(String),
    /// The iteration or time budget of a solve ran out.
    Budget,
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::Timeout => f.write_str("timeout"),
            UnknownReason::Incomplete => f.write_str("incomplete"),
            UnknownReason::SortTooLarge => f.write_str("sort too large"),
            UnknownReason::Unsupported(s) => write!(f, "unsupported: {s}"),
            UnknownReason::BackendFailure(s) => write!(f, "backend failure: {s}"),
            UnknownReason::Budget => f.write_str("budget exhausted"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendVerdict {
    /// A model binding every declared variable, with the solver's raw answer
    /// when there was one.
    Sat { model: Model, raw: Option<String> },
    Unsat,
    Unknown(UnknownReason),
}

impl BackendVerdict {
    pub fn sat(model: Model) -> Self {
        BackendVerdict::Sat { model, raw: None }
    }
}

pub trait Backend: Send {
    fn name(&self) -> &str;

    /// Decides `formula`, an instance of `logic`. `timeout` bounds this call.
    fn check_sat(&mut self, formula: &Formula, logic: &str, timeout: Option<Duration>) -> BackendVerdict;
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn check_sat(&mut self, formula: &Formula, logic: &str, timeout: Option<Duration>) -> BackendVerdict {
        (**self).check_sat(formula, logic, timeout)
    }
}

/// Value used for a declared variable the solver's model leaves out.
pub fn default_value(sort: Sort) -> Value {
    match sort {
        Sort::Bool => Value::Bool(false),
        Sort::RoundingMode => Value::Rm(RoundingMode::Rne),
        Sort::Float(f) => Value::Fp(FpLiteral::zero(f, false)),
        Sort::BitVec(w) => Value::Bv(BitVecValue::new(w, 0)),
        Sort::Real => Value::Real(num_rational::BigRational::from_integer(0.into())),
    }
}

fn model_error(expr: &SExpr, message: impl Into<String>) -> ModelParseError {
    ModelParseError { offset: expr.offset(), message: message.into() }
}

/// Parses a `get-model` answer into a model over the declarations of
/// `formula`. Accepts `(model ...)` and the plain list form; variables the
/// answer leaves out get a default value of their sort.
pub fn parse_model(text: &str, formula: &Formula) -> Result<Model, ModelParseError> {
    let exprs = parse_sexprs(text).map_err(|(offset, message)| ModelParseError { offset, message })?;
    let [outer] = exprs.as_slice() else {
        return Err(ModelParseError { offset: 0, message: format!("expected one list, found {} items", exprs.len()) });
    };
    let mut entries = outer.list().ok_or_else(|| model_error(outer, "expected a list of definitions"))?;
    if entries.first().and_then(SExpr::atom) == Some("model") {
        entries = &entries[1..];
    }
    let mut model = Model::new();
    for entry in entries {
        let items = entry.list().unwrap_or_default();
        let [head, name, params, sort, body] = items else {
            return Err(model_error(entry, "expected (define-fun name () sort value)"));
        };
        if head.atom() != Some("define-fun") {
            return Err(model_error(head, "expected define-fun"));
        }
        if params.list().is_none_or(|p| !p.is_empty()) {
            return Err(model_error(params, "functions with parameters are not supported"));
        }
        let name = name.atom().ok_or_else(|| model_error(name, "expected a symbol"))?;
        let name = name.strip_prefix('|').and_then(|n| n.strip_suffix('|')).unwrap_or(name);
        let sort = parse_sort(sort).map_err(|e| model_error(sort, e.to_string()))?;
        if body.head() == Some("let") {
            return Err(model_error(body, "let bodies are not supported"));
        }
        let value = parse_constant(body).map_err(|e| model_error(body, e.to_string()))?;
        if value.sort() != sort {
            return Err(model_error(body, format!("value of sort {} for a {sort} definition", value.sort())));
        }
        // solvers may define auxiliary symbols; keep only declared ones
        if let Some(d) = formula.declaration(name) {
            if d.sort != sort {
                return Err(model_error(entry, format!("{name} is declared as {}, defined as {sort}", d.sort)));
            }
            model.insert(d.label.clone(), value);
        }
    }
    for d in formula.declarations() {
        if !model.contains(&d.label) {
            model.insert(d.label.clone(), default_value(d.sort));
        }
    }
    Ok(model)
}
