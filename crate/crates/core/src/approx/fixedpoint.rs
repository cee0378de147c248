//! Fixed-point approximation: floats become signed two's-complement bit
//! vectors with `int_bits + frac_bits` bits, `frac_bits` of them fractional.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{decode_nodes, uniform_step, Approximation};
use crate::ast::{Ast, Declaration, Formula, Label, Model, Op};
use crate::bv::{BitVecValue, BvOp, BvPredicate};
use crate::error::{ApproxError, SortError};
use crate::fp::{FpFormat, FpLiteral, FpOp, FpPredicate, RoundingMode};
use crate::precision::{Precision, PrecisionMap, PrecisionOrder};
use crate::sort::Sort;
use crate::value::Value;

const MIN_BITS: u32 = 5;
const MAX_BITS: u32 = 25;
const STEP: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedPointFormat {
    pub int_bits: u32,
    pub frac_bits: u32,
}

impl FixedPointFormat {
    pub fn new(int_bits: u32, frac_bits: u32) -> Self {
        FixedPointFormat { int_bits, frac_bits }
    }

    pub fn width(self) -> u32 {
        self.int_bits + self.frac_bits
    }

    fn from_precision(p: Precision) -> Result<Self, ApproxError> {
        match p {
            Precision::Pair(i, f) if i + f >= 1 => Ok(FixedPointFormat::new(i, f)),
            other => Err(ApproxError::Precision(format!("expected a fixed-point precision, found {other}"))),
        }
    }
}

/// Rounds `q * 2^frac_bits` to the nearest integer, ties to even.
fn round_half_even(q: &BigRational) -> BigInt {
    let floor = q.floor().to_integer();
    let rest = q - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if rest > half || (rest == half && floor.is_odd()) {
        floor + 1
    } else {
        floor
    }
}

/// Nearest grid value to `literal`, saturating at the range ends. Infinities
/// map to the extreme values; NaN has no counterpart.
pub fn encode_fixed_point_literal(literal: &FpLiteral, format: FixedPointFormat) -> Result<BitVecValue, ApproxError> {
    let width = format.width();
    let (min, max) = (BitVecValue::signed_min(width), BitVecValue::signed_max(width));
    if literal.is_nan() {
        return Err(ApproxError::UnsupportedValue(format!("NaN has no fixed-point value: {literal}")));
    }
    if literal.is_infinite() {
        return Ok(if literal.sign() { min } else { max });
    }
    let q = literal.to_rational().expect("finite literal");
    let scaled = round_half_even(&(q * BigRational::from_integer(BigInt::one() << format.frac_bits as usize)));
    if scaled > BigInt::from(max.to_signed()) {
        return Ok(max);
    }
    if scaled < BigInt::from(min.to_signed()) {
        return Ok(min);
    }
    Ok(BitVecValue::from_signed(width, scaled.to_i128().expect("in range")))
}

/// The float nearest (ties to even) to the fixed-point value of `bits`.
pub fn decode_fixed_point(bits: BitVecValue, frac_bits: u32, target: FpFormat) -> FpLiteral {
    let q = BigRational::new(BigInt::from(bits.to_signed()), BigInt::one() << frac_bits as usize);
    FpLiteral::from_rational(&q, target, RoundingMode::Rne)
}

/// The fixed-point approximation with a uniform `(int_bits, frac_bits)`
/// precision ranging from `(5, 5)` to `(25, 25)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedPoint;

fn sort_error(e: SortError) -> ApproxError {
    ApproxError::Precision(format!("encoding produced an ill-sorted term: {e}"))
}

fn unsupported_op(node: &Ast) -> ApproxError {
    ApproxError::UnsupportedOp(format!("{} has no fixed-point counterpart", node.op().name()))
}

/// Builds the encoded terms of one node; helper terms get derived labels
/// `base.derived(next)`, `base.derived(next + 1)`, ...
struct Builder {
    format: FixedPointFormat,
    base: Label,
    next: u32,
}

impl Builder {
    fn label(&mut self) -> Label {
        self.next += 1;
        self.base.derived(self.next)
    }

    fn node(&mut self, op: Op, children: Vec<Ast>) -> Result<Ast, ApproxError> {
        let label = self.label();
        Ast::apply(op, label, children).map_err(sort_error)
    }

    fn constant(&mut self, value: BitVecValue) -> Ast {
        let label = self.label();
        Ast::bv(value, label)
    }

    /// `extract(w-1, 0, ashr(mul(sext a, sext b), frac_bits))`, with the final
    /// extract labeled `top`.
    fn mul(&mut self, a: Ast, b: Ast, top: Label) -> Result<Ast, ApproxError> {
        let w = self.format.width();
        let sa = self.node(Op::Bv(BvOp::SignExtend(w)), vec![a])?;
        let sb = self.node(Op::Bv(BvOp::SignExtend(w)), vec![b])?;
        let product = self.node(Op::Bv(BvOp::Mul), vec![sa, sb])?;
        let shift = self.constant(BitVecValue::new(2 * w, self.format.frac_bits as u128));
        let shifted = self.node(Op::Bv(BvOp::Ashr), vec![product, shift])?;
        Ast::apply(Op::Bv(BvOp::Extract(w - 1, 0)), top, vec![shifted]).map_err(sort_error)
    }

    /// `extract(w-1, 0, sdiv(shl(sext a, frac_bits), sext b))`.
    fn div(&mut self, a: Ast, b: Ast, top: Label) -> Result<Ast, ApproxError> {
        let (w, pf) = (self.format.width(), self.format.frac_bits);
        let sa = self.node(Op::Bv(BvOp::SignExtend(pf)), vec![a])?;
        let shift = self.constant(BitVecValue::new(w + pf, pf as u128));
        let shifted = self.node(Op::Bv(BvOp::Shl), vec![sa, shift])?;
        let sb = self.node(Op::Bv(BvOp::SignExtend(pf)), vec![b])?;
        let quotient = self.node(Op::Bv(BvOp::Sdiv), vec![shifted, sb])?;
        Ast::apply(Op::Bv(BvOp::Extract(w - 1, 0)), top, vec![quotient]).map_err(sort_error)
    }
}

impl FixedPoint {
    fn encode_node(&self, node: &Ast, format: FixedPointFormat) -> Result<Ast, ApproxError> {
        let label = node.label().clone();
        let bv_sort = Sort::BitVec(format.width());
        match node.op() {
            Op::Var(name) => match node.sort() {
                Sort::Float(_) => Ok(Ast::var(name.clone(), bv_sort, label)),
                Sort::RoundingMode => Err(unsupported_op(node)),
                _ => Ok(node.clone()),
            },
            Op::Const(Value::Fp(v)) => Ok(Ast::bv(encode_fixed_point_literal(v, format)?, label)),
            Op::Const(Value::Rm(_)) => Err(unsupported_op(node)),
            Op::Const(_) => Ok(node.clone()),
            Op::Fp(fp_op) => {
                let rm = usize::from(fp_op.takes_rounding_mode());
                let mut args = node.children()[rm..]
                    .iter()
                    .map(|c| self.encode_node(c, format))
                    .collect::<Result<Vec<_>, _>>()?
                    .into_iter();
                let mut arg = || args.next().expect("operand count checked by sorts");
                let mut b = Builder { format, base: label.clone(), next: 0 };
                match fp_op {
                    FpOp::Add => Ast::apply(Op::Bv(BvOp::Add), label, vec![arg(), arg()]).map_err(sort_error),
                    FpOp::Sub => Ast::apply(Op::Bv(BvOp::Sub), label, vec![arg(), arg()]).map_err(sort_error),
                    FpOp::Neg => Ast::apply(Op::Bv(BvOp::Neg), label, vec![arg()]).map_err(sort_error),
                    FpOp::Mul => b.mul(arg(), arg(), label),
                    FpOp::Div => b.div(arg(), arg(), label),
                    FpOp::Fma => {
                        let (x, y, z) = (arg(), arg(), arg());
                        let product_label = b.label();
                        let product = b.mul(x, y, product_label)?;
                        Ast::apply(Op::Bv(BvOp::Add), label, vec![product, z]).map_err(sort_error)
                    }
                    FpOp::Abs => {
                        let x = arg();
                        let zero = b.constant(BitVecValue::new(format.width(), 0));
                        let negative = b.node(Op::BvPred(BvPredicate::Slt), vec![x.clone(), zero])?;
                        let negated = b.node(Op::Bv(BvOp::Neg), vec![x.clone()])?;
                        Ast::apply(Op::Ite, label, vec![negative, negated, x]).map_err(sort_error)
                    }
                    FpOp::Convert(_) => Ok(arg()),
                }
            }
            Op::FpPred(pred) => {
                let op = match pred {
                    FpPredicate::Eq => Op::Eq,
                    FpPredicate::Leq => Op::BvPred(BvPredicate::Sle),
                    FpPredicate::Lt => Op::BvPred(BvPredicate::Slt),
                    FpPredicate::Geq => Op::BvPred(BvPredicate::Sge),
                    FpPredicate::Gt => Op::BvPred(BvPredicate::Sgt),
                    FpPredicate::IsNaN | FpPredicate::IsInfinite | FpPredicate::IsZero => {
                        return Err(unsupported_op(node))
                    }
                };
                let children =
                    node.children().iter().map(|c| self.encode_node(c, format)).collect::<Result<Vec<_>, _>>()?;
                Ast::apply(op, label, children).map_err(sort_error)
            }
            op => {
                let children =
                    node.children().iter().map(|c| self.encode_node(c, format)).collect::<Result<Vec<_>, _>>()?;
                Ast::apply(op.clone(), label, children).map_err(sort_error)
            }
        }
    }
}

/// Rounding-mode variables vanish from approximate formulas; they decode to
/// RNE.
pub(super) fn bind_rounding_modes(formula: &Formula, decoded: &mut Model) {
    for d in formula.declarations() {
        if d.sort == Sort::RoundingMode && !decoded.contains(&d.label) {
            decoded.insert(d.label.clone(), Value::Rm(RoundingMode::Rne));
        }
    }
}

/// Declarations of the approximate formula: floats get `float_sort`,
/// rounding modes are dropped.
pub(super) fn approximate_declarations(formula: &Formula, float_sort: Sort) -> Vec<Declaration> {
    formula
        .declarations()
        .iter()
        .filter(|d| d.sort != Sort::RoundingMode)
        .map(|d| Declaration {
            name: d.name.clone(),
            sort: if d.sort.is_float() { float_sort } else { d.sort },
            label: d.label.clone(),
        })
        .collect()
}

impl Approximation for FixedPoint {
    fn name(&self) -> &'static str {
        "bv"
    }

    fn output_logic(&self) -> &'static str {
        "QF_BV"
    }

    fn order(&self) -> PrecisionOrder {
        PrecisionOrder::Pair { min: (MIN_BITS, MIN_BITS), max: (MAX_BITS, MAX_BITS) }
    }

    fn initial_precision(&self, _formula: &Formula) -> PrecisionMap {
        PrecisionMap::Uniform(Precision::Pair(MIN_BITS, MIN_BITS))
    }

    fn encode(&self, formula: &Formula, precision: &PrecisionMap) -> Result<Formula, ApproxError> {
        let PrecisionMap::Uniform(p) = precision else {
            return Err(ApproxError::Precision("fixed-point precision is uniform".into()));
        };
        let format = FixedPointFormat::from_precision(*p)?;
        let assertions =
            formula.assertions().iter().map(|a| self.encode_node(a, format)).collect::<Result<Vec<_>, _>>()?;
        Ok(Formula::from_labeled(approximate_declarations(formula, Sort::BitVec(format.width())), assertions))
    }

    fn decode(
        &self,
        formula: &Formula,
        encoded: &Formula,
        model: &Model,
        precision: &PrecisionMap,
    ) -> Result<Model, ApproxError> {
        let PrecisionMap::Uniform(p) = precision else {
            return Err(ApproxError::Precision("fixed-point precision is uniform".into()));
        };
        let format = FixedPointFormat::from_precision(*p)?;
        let mut decoded = decode_nodes(formula, encoded, model, |value, sort| match (value, sort) {
            (Value::Bv(b), Sort::Float(f)) => Ok(Value::Fp(decode_fixed_point(*b, format.frac_bits, f))),
            (Value::Bv(_), other) => Err(ApproxError::Precision(format!("bit-vector value for a {other} node"))),
            _ => Ok(value.clone()),
        })?;
        bind_rounding_modes(formula, &mut decoded);
        Ok(decoded)
    }

    fn model_refine(&self, formula: &Formula, _decoded: &Model, _failed: &Model, precision: &PrecisionMap) -> PrecisionMap {
        self.proof_refine(formula, &[], precision)
    }

    fn proof_refine(&self, _formula: &Formula, _core: &[Ast], precision: &PrecisionMap) -> PrecisionMap {
        uniform_step(self.order(), precision, |p| match p {
            Precision::Pair(i, f) => Precision::Pair(i + STEP, f + STEP),
            other => other,
        })
    }
}

/// True when `q` lies on the grid of `format` and inside its range.
pub fn on_grid(q: &BigRational, format: FixedPointFormat) -> bool {
    let scaled = q * BigRational::from_integer(BigInt::one() << format.frac_bits as usize);
    let width = format.width();
    scaled.is_integer()
        && scaled.to_integer() >= BigInt::from(BitVecValue::signed_min(width).to_signed())
        && scaled.to_integer() <= BigInt::from(BitVecValue::signed_max(width).to_signed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::satisfies;
    use crate::smtlib::parse_script;

    fn lit(n: i64, d: i64) -> FpLiteral {
        FpLiteral::from_rational(&BigRational::new(n.into(), d.into()), FpFormat::FLOAT32, RoundingMode::Rne)
    }

    const F55: FixedPointFormat = FixedPointFormat { int_bits: 5, frac_bits: 5 };

    #[test]
    fn literal_encoding_rounds_and_saturates() {
        assert_eq!(encode_fixed_point_literal(&lit(7, 4), F55).unwrap().to_signed(), 56);
        // 1/64 is a tie between 0 and 1/32; even wins
        assert_eq!(encode_fixed_point_literal(&lit(1, 64), F55).unwrap().to_signed(), 0);
        assert_eq!(encode_fixed_point_literal(&lit(3, 64), F55).unwrap().to_signed(), 2);
        assert_eq!(encode_fixed_point_literal(&lit(1000, 1), F55).unwrap().to_signed(), 511);
        assert_eq!(encode_fixed_point_literal(&lit(-1000, 1), F55).unwrap().to_signed(), -512);
        let inf = FpLiteral::infinity(FpFormat::FLOAT32, true);
        assert_eq!(encode_fixed_point_literal(&inf, F55).unwrap().to_signed(), -512);
        assert!(encode_fixed_point_literal(&FpLiteral::nan(FpFormat::FLOAT32), F55).is_err());
    }

    #[test]
    fn decode_is_exact_on_grid() {
        let v = BitVecValue::from_signed(10, -56);
        assert_eq!(decode_fixed_point(v, 5, FpFormat::FLOAT32), lit(-7, 4));
    }

    #[test]
    fn encoded_arithmetic_matches_grid_arithmetic() {
        let formula = parse_script(
            "(declare-fun x () Float32) (declare-fun y () Float32)
             (assert (= y (fp.div RNE (fp.mul RNE x x) ((_ to_fp 8 24) RNE 2.0))))",
        )
        .unwrap()
        .formula;
        let approx = FixedPoint;
        let p = approx.initial_precision(&formula);
        let encoded = approx.encode(&formula, &p).unwrap();
        let x = formula.declaration("x").unwrap().label.clone();
        let y = formula.declaration("y").unwrap().label.clone();
        let mut model = Model::new();
        // x = 3/2, y = 9/8
        model.insert(x.clone(), Value::Bv(BitVecValue::from_signed(10, 48)));
        model.insert(y.clone(), Value::Bv(BitVecValue::from_signed(10, 36)));
        assert!(satisfies(encoded.assertions(), &model));
        let decoded = approx.decode(&formula, &encoded, &model, &p).unwrap();
        assert_eq!(decoded.get(&y), Some(&Value::Fp(lit(9, 8))));
        assert!(satisfies(formula.assertions(), &decoded.restricted_to_variables(&formula)));
    }

    #[test]
    fn unsupported_constructs() {
        let approx = FixedPoint;
        let nan = parse_script("(declare-fun x () Float32) (assert (fp.isNaN x))").unwrap().formula;
        let p = approx.initial_precision(&nan);
        assert!(matches!(approx.encode(&nan, &p), Err(ApproxError::UnsupportedOp(_))));
        let nan_lit =
            parse_script("(declare-fun x () Float32) (assert (fp.eq x (_ NaN 8 24)))").unwrap().formula;
        assert!(matches!(approx.encode(&nan_lit, &p), Err(ApproxError::UnsupportedValue(_))));
    }

    #[test]
    fn refinement_is_uniform() {
        let approx = FixedPoint;
        let mut p = approx.initial_precision(&Formula::default());
        let mut seen = vec![p.clone()];
        while !p.is_all_top(approx.order()) {
            p = approx.proof_refine(&Formula::default(), &[], &p);
            seen.push(p.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[4], PrecisionMap::Uniform(Precision::Pair(21, 21)));
    }

    #[test]
    fn grid_membership() {
        assert!(on_grid(&BigRational::new(7.into(), 4.into()), F55));
        assert!(!on_grid(&BigRational::new(1.into(), 64.into()), F55));
        assert!(!on_grid(&BigRational::from_integer(16.into()), F55));
    }
}
