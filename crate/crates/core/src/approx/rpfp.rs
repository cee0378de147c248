//! Reduced-precision floating point: the formula is solved in smaller
//! floating-point formats and the model is widened back.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{decode_nodes, uniform_step, Approximation};
use crate::ast::{Ast, Declaration, Formula, Label, Model, Op};
use crate::error::ApproxError;
use crate::eval::eval_all;
use crate::fp::{FpClass, FpFormat, FpLiteral, FpOp, RoundingMode};
use crate::precision::{Precision, PrecisionMap, PrecisionOrder};
use crate::reconstruct::extract_critical_atoms;
use crate::sort::Sort;
use crate::value::Value;

pub const MAX_RPFP_PRECISION: u32 = 5;

/// Share of ranked nodes refined after a failed reconstruction.
const REFINE_FRACTION: (usize, usize) = (3, 10);

/// Width of a format component at precision `p`: `3 + (w - 3) * p / 5`,
/// rounded down. Components already at most 3 bits wide stay as they are.
fn scale_width(width: u32, p: u32) -> u32 {
    if width <= 3 {
        return width;
    }
    3 + (width - 3) * p.min(MAX_RPFP_PRECISION) / MAX_RPFP_PRECISION
}

/// The reduced format of `format` at precision `p`.
pub fn scale_format(format: FpFormat, p: u32) -> FpFormat {
    FpFormat::new(scale_width(format.ebits(), p), scale_width(format.sbits(), p)).expect("scaled format is valid")
}

/// Widens `small` to `target` without changing its value.
///
/// Subnormals of the small format are renormalized; a value that is below the
/// normal range of `target` becomes a subnormal there, which fails with a
/// range error if bits would be lost.
pub fn decode_fp_value(target: FpFormat, small: &FpLiteral) -> Result<FpLiteral, ApproxError> {
    let source = small.format();
    if !source.fits_in(target) {
        return Err(ApproxError::Range(format!("cannot widen {source} to {target}")));
    }
    let sign = small.sign();
    let (exponent, fraction): (i64, Vec<bool>) = match small.class() {
        FpClass::NaN => return Ok(FpLiteral::nan(target)),
        FpClass::Infinity => return Ok(FpLiteral::infinity(target, sign)),
        FpClass::Zero => return Ok(FpLiteral::zero(target, sign)),
        FpClass::Subnormal => {
            let bits = small.significand_bits();
            let prefix: Vec<bool> = bits.iter().copied().skip_while(|b| !b).collect();
            let underflow = (bits.len() - prefix.len()) as i64;
            (-source.bias() - underflow, prefix[1..].to_vec())
        }
        FpClass::Normal => (small.exponent_field() as i64 - source.bias(), small.significand_bits()),
    };
    let mut significand = fraction;
    significand.resize(target.stored_sbits() as usize, false);
    let biased = exponent + target.bias();
    if biased >= 1 {
        let exponent_bits: Vec<bool> =
            (0..target.ebits()).rev().map(|i| (biased >> i) & 1 == 1).collect();
        return FpLiteral::from_bit_lists(target, sign, &exponent_bits, &significand)
            .map_err(|e| ApproxError::Range(e.to_string()));
    }
    // below the normal range of the target: shift the hidden bit in
    let mut sub = vec![false; (-biased) as usize];
    sub.push(true);
    sub.extend(significand);
    let stored = target.stored_sbits() as usize;
    if sub.len() > stored && sub[stored..].iter().any(|&b| b) {
        return Err(ApproxError::Range(format!("{small} is not representable in {target}")));
    }
    sub.resize(stored, false);
    let zeros = vec![false; target.ebits() as usize];
    FpLiteral::from_bit_lists(target, sign, &zeros, &sub).map_err(|e| ApproxError::Range(e.to_string()))
}

/// Refinement score of a node; infinite when a special value is involved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeScore {
    Finite(BigRational),
    Infinite,
}

impl NodeScore {
    pub fn zero() -> NodeScore {
        NodeScore::Finite(BigRational::zero())
    }
}

/// `|a - b| / max(|b|, 2^-(s-1) * 2^(1 - bias(e)))`; the denominator's floor
/// is the smallest subnormal of `format`. Specials of the same class (and
/// sign, for infinities) score zero, any other mismatch involving a special
/// scores infinity.
pub fn relative_error(a: &FpLiteral, b: &FpLiteral, format: FpFormat) -> NodeScore {
    match (a.to_rational(), b.to_rational()) {
        (Some(x), Some(y)) => {
            let min_subnormal_exp = 1 - format.bias() - (format.sbits() as i64 - 1);
            let floor = BigRational::new(BigInt::one(), BigInt::one() << (-min_subnormal_exp) as usize);
            let denominator = y.abs().max(floor);
            NodeScore::Finite((x - y).abs() / denominator)
        }
        _ if a.smt_eq(b) => NodeScore::zero(),
        _ => NodeScore::Infinite,
    }
}

/// The reduced-precision approximation with per-node scalar precision
/// in `0..=5`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReducedPrecision;

fn scalar(precision: &PrecisionMap, label: &Label) -> Result<u32, ApproxError> {
    match precision.get(label) {
        Some(Precision::Scalar(p)) => Ok(p),
        None => Ok(MAX_RPFP_PRECISION),
        Some(other) => Err(ApproxError::Precision(format!("expected a scalar precision, found {other}"))),
    }
}

/// Label of the precision-carrying node, with the format it scales.
fn scalable_format(node: &Ast) -> Option<FpFormat> {
    match node.op() {
        Op::Var(_) | Op::Fp(_) => node.sort().as_float(),
        _ => None,
    }
}

fn sort_error(e: crate::error::SortError) -> ApproxError {
    ApproxError::Precision(format!("encoding produced an ill-sorted term: {e}"))
}

/// Wraps `child` in a conversion to `target` unless it already has that sort.
fn cast(child: Ast, target: FpFormat, slot: Label) -> Result<Ast, ApproxError> {
    if child.sort() == Sort::Float(target) {
        return Ok(child);
    }
    let rm = Ast::rm(RoundingMode::Rne, slot.derived(2));
    Ast::apply(Op::Fp(FpOp::Convert(target)), slot.derived(1), vec![rm, child]).map_err(sort_error)
}

impl ReducedPrecision {
    fn encode_node(&self, node: &Ast, precision: &PrecisionMap) -> Result<Ast, ApproxError> {
        let label = node.label().clone();
        match node.op() {
            Op::Var(name) => Ok(match node.sort() {
                Sort::Float(f) => Ast::var(name.clone(), Sort::Float(scale_format(f, scalar(precision, &label)?)), label),
                _ => node.clone(),
            }),
            Op::Const(_) => Ok(node.clone()),
            Op::Fp(fp_op) => {
                let format = node.sort().as_float().expect("fp operations have float sort");
                let target = scale_format(format, scalar(precision, &label)?);
                let mut children = Vec::with_capacity(node.children().len());
                for (i, c) in node.children().iter().enumerate() {
                    let encoded = self.encode_node(c, precision)?;
                    let is_operand = encoded.sort().is_float() && !matches!(fp_op, FpOp::Convert(_));
                    children.push(if is_operand { cast(encoded, target, label.child(i as u32))? } else { encoded });
                }
                let op = match fp_op {
                    FpOp::Convert(_) => Op::Fp(FpOp::Convert(target)),
                    _ => Op::Fp(*fp_op),
                };
                Ast::apply(op, label, children).map_err(sort_error)
            }
            op => {
                let children: Vec<Ast> =
                    node.children().iter().map(|c| self.encode_node(c, precision)).collect::<Result<_, _>>()?;
                // predicates, equalities and ite over floats: operands meet at the
                // pointwise maximum of the non-literal operand formats
                let operands: Vec<usize> = match op {
                    Op::Ite => vec![1, 2],
                    _ => (0..children.len()).collect(),
                };
                let floats: Vec<&Ast> = operands.iter().map(|&i| &children[i]).filter(|c| c.sort().is_float()).collect();
                if floats.is_empty() {
                    return Ast::apply(op.clone(), label, children).map_err(sort_error);
                }
                let non_literal: Vec<&&Ast> = floats.iter().filter(|c| !c.op().is_literal()).collect();
                let pool: Vec<FpFormat> = if non_literal.is_empty() {
                    floats.iter().filter_map(|c| c.sort().as_float()).collect()
                } else {
                    non_literal.iter().filter_map(|c| c.sort().as_float()).collect()
                };
                let target = pool.into_iter().reduce(FpFormat::max).expect("at least one operand");
                let children = children
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| {
                        if operands.contains(&i) && c.sort().is_float() {
                            cast(c, target, label.child(i as u32))
                        } else {
                            Ok(c)
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ast::apply(op.clone(), label, children).map_err(sort_error)
            }
        }
    }

    /// Scores the floating-point operations under atoms that the decoded
    /// model makes true and the failed model makes false.
    pub fn rank_nodes(&self, formula: &Formula, decoded: &Model, failed: &Model) -> Vec<(Label, NodeScore)> {
        let mut failed_values = Model::new();
        for a in formula.assertions() {
            eval_all(a, failed, &mut failed_values);
        }
        let mut scores: BTreeMap<Label, NodeScore> = BTreeMap::new();
        for atom in extract_critical_atoms(formula.assertions(), decoded) {
            let fails = failed_values.get(atom.atom.label()).and_then(Value::as_bool) == Some(false);
            if !atom.polarity || !fails {
                continue;
            }
            atom.atom.for_each(&mut |node| {
                if matches!(node.op(), Op::Fp(_)) && !scores.contains_key(node.label()) {
                    if let Some(score) = node_error(node, decoded, &failed_values) {
                        scores.insert(node.label().clone(), score);
                    }
                }
            });
        }
        let mut ranked: Vec<(Label, NodeScore)> = scores.into_iter().collect();
        // highest score first; the stable sort keeps label order among ties
        ranked.sort_by(|a, b| b.1.cmp(&a.1));
        ranked
    }
}

/// `outErr / (1 + avgInErr)` for a floating-point operation node, or `None`
/// when either model lacks its value.
pub fn node_error(node: &Ast, decoded: &Model, failed: &Model) -> Option<NodeScore> {
    node.sort().as_float()?;
    let error_at = |n: &Ast| -> Option<NodeScore> {
        let a = decoded.get(n.label())?.as_fp()?;
        let b = failed.get(n.label())?.as_fp()?;
        Some(relative_error(a, b, n.sort().as_float()?))
    };
    let out = error_at(node)?;
    let inputs: Vec<NodeScore> = node.children().iter().filter(|c| c.sort().is_float()).filter_map(error_at).collect();
    let average = if inputs.is_empty() {
        NodeScore::zero()
    } else if inputs.contains(&NodeScore::Infinite) {
        NodeScore::Infinite
    } else {
        let sum = inputs.iter().fold(BigRational::zero(), |acc, s| match s {
            NodeScore::Finite(q) => acc + q,
            NodeScore::Infinite => unreachable!(),
        });
        NodeScore::Finite(sum / BigRational::from_integer(BigInt::from(inputs.len())))
    };
    Some(match (out, average) {
        (NodeScore::Infinite, _) => NodeScore::Infinite,
        (NodeScore::Finite(_), NodeScore::Infinite) => NodeScore::zero(),
        (NodeScore::Finite(o), NodeScore::Finite(avg)) => NodeScore::Finite(o / (BigRational::one() + avg)),
    })
}

impl Approximation for ReducedPrecision {
    fn name(&self) -> &'static str {
        "rpfp"
    }

    fn output_logic(&self) -> &'static str {
        "QF_FP"
    }

    fn order(&self) -> PrecisionOrder {
        PrecisionOrder::Scalar { min: 0, max: MAX_RPFP_PRECISION }
    }

    /// One entry per floating-point variable and operation. Nodes whose format
    /// cannot shrink start at the top.
    fn initial_precision(&self, formula: &Formula) -> PrecisionMap {
        let mut map = BTreeMap::new();
        let mut add = |label: &Label, format: FpFormat| {
            let p = if scale_format(format, 0) == format { MAX_RPFP_PRECISION } else { 0 };
            map.insert(label.clone(), Precision::Scalar(p));
        };
        for d in formula.declarations() {
            if let Sort::Float(f) = d.sort {
                add(&d.label, f);
            }
        }
        for a in formula.assertions() {
            a.for_each(&mut |node| {
                if let Some(f) = scalable_format(node) {
                    add(node.label(), f);
                }
            });
        }
        PrecisionMap::PerLabel(map)
    }

    fn encode(&self, formula: &Formula, precision: &PrecisionMap) -> Result<Formula, ApproxError> {
        let declarations = formula
            .declarations()
            .iter()
            .map(|d| {
                let sort = match d.sort {
                    Sort::Float(f) => Sort::Float(scale_format(f, scalar(precision, &d.label)?)),
                    other => other,
                };
                Ok(Declaration { name: d.name.clone(), sort, label: d.label.clone() })
            })
            .collect::<Result<Vec<_>, ApproxError>>()?;
        let assertions =
            formula.assertions().iter().map(|a| self.encode_node(a, precision)).collect::<Result<Vec<_>, _>>()?;
        Ok(Formula::from_labeled(declarations, assertions))
    }

    fn decode(
        &self,
        formula: &Formula,
        encoded: &Formula,
        model: &Model,
        _precision: &PrecisionMap,
    ) -> Result<Model, ApproxError> {
        decode_nodes(formula, encoded, model, |value, sort| match (value, sort) {
            (Value::Fp(v), Sort::Float(f)) => decode_fp_value(f, v).map(Value::Fp),
            _ => Ok(value.clone()),
        })
    }

    /// Raises the top 30% of the ranked operations, and the variables below
    /// them, by one. Falls back to the uniform step when nothing qualifies or
    /// nothing selected can rise.
    fn model_refine(&self, formula: &Formula, decoded: &Model, failed: &Model, precision: &PrecisionMap) -> PrecisionMap {
        let ranked = self.rank_nodes(formula, decoded, failed);
        let PrecisionMap::PerLabel(map) = precision else {
            return self.proof_refine(formula, &[], precision);
        };
        let take = (ranked.len() * REFINE_FRACTION.0).div_ceil(REFINE_FRACTION.1);
        let nodes = formula.nodes();
        let mut refined = map.clone();
        for (label, _) in ranked.iter().take(take) {
            let mut targets = vec![label.clone()];
            if let Some(node) = nodes.get(label) {
                targets.extend(node.variables());
            }
            for t in targets {
                if let Some(Precision::Scalar(p)) = refined.get_mut(&t) {
                    *p = (*p + 1).min(MAX_RPFP_PRECISION);
                }
            }
        }
        if refined == *map {
            return self.proof_refine(formula, &[], precision);
        }
        PrecisionMap::PerLabel(refined)
    }

    fn proof_refine(&self, _formula: &Formula, _core: &[Ast], precision: &PrecisionMap) -> PrecisionMap {
        uniform_step(self.order(), precision, |p| match p {
            Precision::Scalar(v) => Precision::Scalar(v + 1),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smtlib::parse_script;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn scale_sort_values() {
        let f = FpFormat::FLOAT32;
        assert_eq!(scale_format(f, 0), FpFormat::new(3, 3).unwrap());
        assert_eq!(scale_format(f, 1), FpFormat::new(4, 7).unwrap());
        assert_eq!(scale_format(f, 2), FpFormat::new(5, 11).unwrap());
        assert_eq!(scale_format(f, 5), f);
        assert_eq!(scale_format(FpFormat::new(2, 2).unwrap(), 0), FpFormat::new(2, 2).unwrap());
    }

    #[test]
    fn decode_subnormal_to_normal() {
        let small = FpLiteral::from_fields(FpFormat::new(3, 3).unwrap(), false, 0, 0b01).unwrap();
        let wide = decode_fp_value(FpFormat::FLOAT32, &small).unwrap();
        assert_eq!(wide.exponent_field(), 123);
        assert_eq!(wide.significand_field(), 0);
        assert_eq!(wide.to_rational(), Some(q(1, 16)));
    }

    #[test]
    fn decode_into_same_exponent_width_keeps_subnormals() {
        let small_format = FpFormat::new(3, 3).unwrap();
        let target = FpFormat::new(3, 5).unwrap();
        for bits in 0..64u128 {
            let v = FpLiteral::from_packed(small_format, bits).unwrap();
            let w = decode_fp_value(target, &v).unwrap();
            assert_eq!(w.to_rational(), v.to_rational());
            assert_eq!(w.class(), v.canonical().class());
        }
        assert!(decode_fp_value(small_format, &FpLiteral::zero(target, false)).is_err());
    }

    #[test]
    fn relative_error_values() {
        let f = FpFormat::FLOAT32;
        let four = FpLiteral::from_rational(&q(4, 1), f, RoundingMode::Rne);
        let target = FpLiteral::from_rational(&q(15, 4), f, RoundingMode::Rne);
        assert_eq!(relative_error(&four, &target, f), NodeScore::Finite(q(1, 15)));
        assert_eq!(relative_error(&four, &four, f), NodeScore::zero());
        let inf = FpLiteral::infinity(f, false);
        assert_eq!(relative_error(&inf, &four, f), NodeScore::Infinite);
        assert_eq!(relative_error(&inf, &inf, f), NodeScore::zero());
        let zero = FpLiteral::zero(f, false);
        assert!(matches!(relative_error(&four, &zero, f), NodeScore::Finite(_)));
    }

    #[test]
    fn encoding_inserts_casts() {
        let formula = parse_script(
            "(declare-fun x () Float32) (declare-fun y () Float32)
             (assert (fp.leq (fp.add RNE x y) ((_ to_fp 8 24) RNE 1.5)))",
        )
        .unwrap()
        .formula;
        let approx = ReducedPrecision;
        let p = approx.initial_precision(&formula);
        let encoded = approx.encode(&formula, &p).unwrap();
        let small = Sort::float(3, 3).unwrap();
        assert!(encoded.declarations().iter().all(|d| d.sort == small));
        let leq = &encoded.assertions()[0];
        assert_eq!(leq.children()[0].sort(), small);
        // the literal keeps its format and is converted
        assert!(matches!(leq.children()[1].op(), Op::Fp(FpOp::Convert(_))));
        assert!(leq.children()[1].label().is_synthetic());
        assert_eq!(leq.children()[1].children()[1].sort(), Sort::Float(FpFormat::FLOAT32));

        let top = p.map(|_| Precision::Scalar(MAX_RPFP_PRECISION));
        let identity = approx.encode(&formula, &top).unwrap();
        assert_eq!(identity, formula);
    }

    #[test]
    fn mixed_precision_meets_at_maximum() {
        let formula = parse_script(
            "(declare-fun x () Float32) (declare-fun y () Float32)
             (assert (fp.lt x (fp.add RNE y y)))",
        )
        .unwrap()
        .formula;
        let approx = ReducedPrecision;
        let x = formula.declaration("x").unwrap().label.clone();
        let add = formula.assertions()[0].children()[1].label().clone();
        let PrecisionMap::PerLabel(mut map) = approx.initial_precision(&formula) else { unreachable!() };
        map.insert(add, Precision::Scalar(2));
        map.insert(x, Precision::Scalar(0));
        let encoded = approx.encode(&formula, &PrecisionMap::PerLabel(map)).unwrap();
        let lt = &encoded.assertions()[0];
        assert_eq!(lt.children()[0].sort(), Sort::float(5, 11).unwrap());
        assert_eq!(lt.children()[1].sort(), Sort::float(5, 11).unwrap());
    }

    #[test]
    fn refinement_steps() {
        let approx = ReducedPrecision;
        let labels = [Label::new(vec![0]), Label::new(vec![1])];
        let mixed = PrecisionMap::PerLabel(
            [(labels[0].clone(), Precision::Scalar(1)), (labels[1].clone(), Precision::Scalar(5))].into(),
        );
        let refined = approx.proof_refine(&Formula::default(), &[], &mixed);
        assert_eq!(refined.get(&labels[0]), Some(Precision::Scalar(2)));
        assert_eq!(refined.get(&labels[1]), Some(Precision::Scalar(5)));
    }
}
