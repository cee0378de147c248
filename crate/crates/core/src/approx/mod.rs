//! Approximations of floating-point formulas and the pieces they share.

mod fixedpoint;
mod real;
mod rpfp;

pub use fixedpoint::{decode_fixed_point, encode_fixed_point_literal, on_grid, FixedPoint, FixedPointFormat};
pub use real::RealArithmetic;
pub use rpfp::{decode_fp_value, relative_error, scale_format, NodeScore, ReducedPrecision, MAX_RPFP_PRECISION};

use crate::ast::{Ast, Formula, Model};
use crate::error::ApproxError;
use crate::eval::eval_all;
use crate::precision::{PrecisionMap, PrecisionOrder};
use crate::sort::Sort;
use crate::value::Value;

/// Everything the solver loop needs to know about one approximation: its
/// precision order, its codec, and its refinement strategies.
pub trait Approximation: Send + Sync {
    fn name(&self) -> &'static str;

    /// SMT-LIB logic of encoded formulas.
    fn output_logic(&self) -> &'static str;

    fn order(&self) -> PrecisionOrder;

    fn initial_precision(&self, formula: &Formula) -> PrecisionMap;

    fn encode(&self, formula: &Formula, precision: &PrecisionMap) -> Result<Formula, ApproxError>;

    /// Maps a model of `encoded` back to the original formula. The result
    /// binds every node label that has a counterpart in `encoded`, holding the
    /// value the approximate model gives that node, converted to the node's
    /// original sort.
    fn decode(
        &self,
        formula: &Formula,
        encoded: &Formula,
        model: &Model,
        precision: &PrecisionMap,
    ) -> Result<Model, ApproxError>;

    fn reconstruct(&self, formula: &Formula, decoded: &Model) -> Model {
        crate::reconstruct::reconstruct(formula, decoded)
    }

    /// Refinement after a reconstructed model `failed` violates the formula.
    fn model_refine(&self, formula: &Formula, decoded: &Model, failed: &Model, precision: &PrecisionMap) -> PrecisionMap;

    /// Refinement after the encoded formula had no model. `core` is always
    /// empty since no back end reports cores.
    fn proof_refine(&self, formula: &Formula, core: &[Ast], precision: &PrecisionMap) -> PrecisionMap;
}

/// Evaluates the encoded formula under `model` and converts the value at
/// each original node label with `convert`, which receives the value and the
/// node's original sort. Synthetic labels are skipped.
pub(crate) fn decode_nodes(
    formula: &Formula,
    encoded: &Formula,
    model: &Model,
    mut convert: impl FnMut(&Value, Sort) -> Result<Value, ApproxError>,
) -> Result<Model, ApproxError> {
    let mut approx_values = Model::new();
    for d in encoded.declarations() {
        if let Some(v) = model.get(&d.label) {
            approx_values.insert(d.label.clone(), v.clone());
        }
    }
    for a in encoded.assertions() {
        eval_all(a, model, &mut approx_values);
    }
    let mut sorts = std::collections::BTreeMap::new();
    for d in formula.declarations() {
        sorts.insert(d.label.clone(), d.sort);
    }
    for (label, node) in formula.nodes() {
        sorts.insert(label, node.sort());
    }
    let mut decoded = Model::new();
    for (label, value) in &approx_values {
        if label.is_synthetic() {
            continue;
        }
        if let Some(sort) = sorts.get(label) {
            decoded.insert(label.clone(), convert(value, *sort)?);
        }
    }
    Ok(decoded)
}

/// Raises every precision by one step of `step`, capped at the top.
pub(crate) fn uniform_step(
    order: PrecisionOrder,
    precision: &PrecisionMap,
    step: impl Fn(crate::precision::Precision) -> crate::precision::Precision,
) -> PrecisionMap {
    precision.map(|p| order.cap(step(p)))
}
