//! Real-arithmetic approximation: floats are read as exact reals.

use num_rational::BigRational;

use super::fixedpoint::{approximate_declarations, bind_rounding_modes};
use super::{decode_nodes, Approximation};
use crate::ast::{Ast, Formula, Model, Op, RealOp, RealPredicate};
use crate::error::{ApproxError, SortError};
use crate::fp::{FpLiteral, FpOp, FpPredicate, RoundingMode};
use crate::precision::{Precision, PrecisionMap, PrecisionOrder};
use crate::sort::Sort;
use crate::value::Value;

/// The real-arithmetic approximation. Its only precisions are bottom (solve
/// over the reals) and top (the original formula).
#[derive(Debug, Clone, Copy, Default)]
pub struct RealArithmetic;

fn sort_error(e: SortError) -> ApproxError {
    ApproxError::Precision(format!("encoding produced an ill-sorted term: {e}"))
}

fn unsupported_op(node: &Ast) -> ApproxError {
    ApproxError::UnsupportedOp(format!("{} has no real counterpart", node.op().name()))
}

fn real_value(literal: &FpLiteral) -> Result<BigRational, ApproxError> {
    literal
        .to_rational()
        .ok_or_else(|| ApproxError::UnsupportedValue(format!("{literal} has no real value")))
}

impl RealArithmetic {
    fn encode_node(&self, node: &Ast) -> Result<Ast, ApproxError> {
        let label = node.label().clone();
        let apply = |op: Op, children: Vec<Ast>| Ast::apply(op, label.clone(), children).map_err(sort_error);
        match node.op() {
            Op::Var(name) => match node.sort() {
                Sort::Float(_) => Ok(Ast::var(name.clone(), Sort::Real, label)),
                Sort::RoundingMode => Err(unsupported_op(node)),
                _ => Ok(node.clone()),
            },
            Op::Const(Value::Fp(v)) => Ok(Ast::real(real_value(v)?, label)),
            Op::Const(Value::Rm(_)) => Err(unsupported_op(node)),
            Op::Const(_) => Ok(node.clone()),
            Op::Fp(fp_op) => {
                let rm = usize::from(fp_op.takes_rounding_mode());
                let mut args: Vec<Ast> =
                    node.children()[rm..].iter().map(|c| self.encode_node(c)).collect::<Result<_, _>>()?;
                match fp_op {
                    FpOp::Add => apply(Op::Real(RealOp::Add), args),
                    FpOp::Sub => apply(Op::Real(RealOp::Sub), args),
                    FpOp::Mul => apply(Op::Real(RealOp::Mul), args),
                    FpOp::Div => apply(Op::Real(RealOp::Div), args),
                    FpOp::Neg => apply(Op::Real(RealOp::Neg), args),
                    FpOp::Fma => {
                        let c = args.pop().expect("fma has three operands");
                        let product =
                            Ast::apply(Op::Real(RealOp::Mul), label.derived(1), args).map_err(sort_error)?;
                        apply(Op::Real(RealOp::Add), vec![product, c])
                    }
                    FpOp::Abs => {
                        let x = args.pop().expect("abs has one operand");
                        let zero = Ast::real(BigRational::from_integer(0.into()), label.derived(1));
                        let negative = Ast::apply(Op::RealPred(RealPredicate::Lt), label.derived(2), vec![x.clone(), zero])
                            .map_err(sort_error)?;
                        let negated =
                            Ast::apply(Op::Real(RealOp::Neg), label.derived(3), vec![x.clone()]).map_err(sort_error)?;
                        apply(Op::Ite, vec![negative, negated, x])
                    }
                    FpOp::Convert(_) => Ok(args.pop().expect("conversion has one operand")),
                }
            }
            Op::FpPred(pred) => {
                let op = match pred {
                    FpPredicate::Eq => Op::Eq,
                    FpPredicate::Leq => Op::RealPred(RealPredicate::Leq),
                    FpPredicate::Lt => Op::RealPred(RealPredicate::Lt),
                    FpPredicate::Geq => Op::RealPred(RealPredicate::Geq),
                    FpPredicate::Gt => Op::RealPred(RealPredicate::Gt),
                    FpPredicate::IsNaN | FpPredicate::IsInfinite | FpPredicate::IsZero => {
                        return Err(unsupported_op(node))
                    }
                };
                let children = node.children().iter().map(|c| self.encode_node(c)).collect::<Result<Vec<_>, _>>()?;
                apply(op, children)
            }
            op => {
                let children = node.children().iter().map(|c| self.encode_node(c)).collect::<Result<Vec<_>, _>>()?;
                apply(op.clone(), children)
            }
        }
    }
}

impl Approximation for RealArithmetic {
    fn name(&self) -> &'static str {
        "ra"
    }

    fn output_logic(&self) -> &'static str {
        "QF_NRA"
    }

    fn order(&self) -> PrecisionOrder {
        PrecisionOrder::Binary
    }

    fn initial_precision(&self, _formula: &Formula) -> PrecisionMap {
        PrecisionMap::Uniform(Precision::Bottom)
    }

    fn encode(&self, formula: &Formula, precision: &PrecisionMap) -> Result<Formula, ApproxError> {
        if precision != &PrecisionMap::Uniform(Precision::Bottom) {
            return Err(ApproxError::Precision(format!("real encoding exists only at bottom, not {precision}")));
        }
        let assertions = formula.assertions().iter().map(|a| self.encode_node(a)).collect::<Result<Vec<_>, _>>()?;
        Ok(Formula::from_labeled(approximate_declarations(formula, Sort::Real), assertions))
    }

    fn decode(
        &self,
        formula: &Formula,
        encoded: &Formula,
        model: &Model,
        _precision: &PrecisionMap,
    ) -> Result<Model, ApproxError> {
        let mut decoded = decode_nodes(formula, encoded, model, |value, sort| match (value, sort) {
            (Value::Real(q), Sort::Float(f)) => Ok(Value::Fp(FpLiteral::from_rational(q, f, RoundingMode::Rne))),
            (Value::Real(_), other) => Err(ApproxError::Precision(format!("real value for a {other} node"))),
            _ => Ok(value.clone()),
        })?;
        bind_rounding_modes(formula, &mut decoded);
        Ok(decoded)
    }

    fn model_refine(&self, formula: &Formula, _decoded: &Model, _failed: &Model, precision: &PrecisionMap) -> PrecisionMap {
        self.proof_refine(formula, &[], precision)
    }

    fn proof_refine(&self, _formula: &Formula, _core: &[Ast], _precision: &PrecisionMap) -> PrecisionMap {
        PrecisionMap::Uniform(Precision::Top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::satisfies;
    use crate::fp::FpFormat;
    use crate::smtlib::parse_script;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn running_example_over_the_reals() {
        let formula = parse_script(
            "(declare-fun x () Float32) (declare-fun y () Float32)
             (assert (= y (fp.add RNE x ((_ to_fp 8 24) RNE 1.75))))
             (assert (fp.geq y ((_ to_fp 8 24) RNE 0.0)))
             (assert (or (= x ((_ to_fp 8 24) RNE 2.0)) (= x ((_ to_fp 8 24) RNE (- 4.0)))))",
        )
        .unwrap()
        .formula;
        let approx = RealArithmetic;
        let p = approx.initial_precision(&formula);
        let encoded = approx.encode(&formula, &p).unwrap();
        assert!(encoded.declarations().iter().all(|d| d.sort == Sort::Real));
        let x = formula.declaration("x").unwrap().label.clone();
        let y = formula.declaration("y").unwrap().label.clone();
        let model: Model = [(x, Value::Real(q(2, 1))), (y.clone(), Value::Real(q(15, 4)))].into_iter().collect();
        assert!(satisfies(encoded.assertions(), &model));
        let decoded = approx.decode(&formula, &encoded, &model, &p).unwrap();
        let expected = FpLiteral::from_rational(&q(15, 4), FpFormat::FLOAT32, RoundingMode::Rne);
        assert_eq!(decoded.get(&y), Some(&Value::Fp(expected)));
        assert_eq!(approx.proof_refine(&formula, &[], &p), PrecisionMap::Uniform(Precision::Top));
    }

    #[test]
    fn specials_are_rejected() {
        let approx = RealArithmetic;
        let formula = parse_script("(declare-fun x () Float32) (assert (fp.lt x (_ +oo 8 24)))").unwrap().formula;
        let p = approx.initial_precision(&formula);
        assert!(matches!(approx.encode(&formula, &p), Err(ApproxError::UnsupportedValue(_))));
    }
}
