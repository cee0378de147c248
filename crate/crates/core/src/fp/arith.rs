use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use super::format::{FpFormat, RoundingMode};
use super::literal::FpLiteral;
use super::round::{round_dyadic, round_exact};

/// Floating-point function symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FpOp {
    Add,
    Sub,
    Mul,
    Div,
    Fma,
    Neg,
    Abs,
    /// `(_ to_fp e s)` applied to a floating-point argument.
    Convert(FpFormat),
}

impl FpOp {
    /// Whether the first argument is a rounding mode.
    pub fn takes_rounding_mode(self) -> bool {
        !matches!(self, FpOp::Neg | FpOp::Abs)
    }

    /// Number of floating-point arguments.
    pub fn fp_arity(self) -> usize {
        match self {
            FpOp::Neg | FpOp::Abs | FpOp::Convert(_) => 1,
            FpOp::Add | FpOp::Sub | FpOp::Mul | FpOp::Div => 2,
            FpOp::Fma => 3,
        }
    }

    pub fn smtlib_name(self) -> String {
        match self {
            FpOp::Add => "fp.add".into(),
            FpOp::Sub => "fp.sub".into(),
            FpOp::Mul => "fp.mul".into(),
            FpOp::Div => "fp.div".into(),
            FpOp::Fma => "fp.fma".into(),
            FpOp::Neg => "fp.neg".into(),
            FpOp::Abs => "fp.abs".into(),
            FpOp::Convert(f) => format!("(_ to_fp {} {})", f.ebits(), f.sbits()),
        }
    }
}

impl fmt::Display for FpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.smtlib_name())
    }
}

/// Floating-point predicate symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FpPredicate {
    Eq,
    Leq,
    Lt,
    Geq,
    Gt,
    IsNaN,
    IsInfinite,
    IsZero,
}

impl FpPredicate {
    pub fn arity(self) -> usize {
        match self {
            FpPredicate::IsNaN | FpPredicate::IsInfinite | FpPredicate::IsZero => 1,
            _ => 2,
        }
    }

    pub fn smtlib_name(self) -> &'static str {
        match self {
            FpPredicate::Eq => "fp.eq",
            FpPredicate::Leq => "fp.leq",
            FpPredicate::Lt => "fp.lt",
            FpPredicate::Geq => "fp.geq",
            FpPredicate::Gt => "fp.gt",
            FpPredicate::IsNaN => "fp.isNaN",
            FpPredicate::IsInfinite => "fp.isInfinite",
            FpPredicate::IsZero => "fp.isZero",
        }
    }
}

/// Evaluates `op` with IEEE-754 semantics. `args` holds only the floating-point
/// arguments; the rounding mode is passed separately and ignored by `Neg`/`Abs`.
///
/// Panics if `args` does not match the arity of `op` or mixes formats.
pub fn fp_eval(op: FpOp, rm: RoundingMode, args: &[FpLiteral]) -> FpLiteral {
    assert_eq!(args.len(), op.fp_arity(), "wrong number of arguments for {op}");
    if !matches!(op, FpOp::Convert(_)) {
        assert!(args.iter().all(|a| a.format() == args[0].format()), "mixed formats for {op}");
    }
    let format = args[0].format();
    match op {
        FpOp::Neg => {
            let a = args[0];
            if a.is_nan() {
                return FpLiteral::nan(format);
            }
            FpLiteral::from_fields(format, !a.sign(), a.exponent_field(), a.significand_field()).expect("same format")
        }
        FpOp::Abs => {
            let a = args[0];
            if a.is_nan() {
                return FpLiteral::nan(format);
            }
            FpLiteral::from_fields(format, false, a.exponent_field(), a.significand_field()).expect("same format")
        }
        FpOp::Add => add(args[0], args[1], rm),
        FpOp::Sub => add(args[0], fp_eval(FpOp::Neg, rm, &args[1..2]), rm),
        FpOp::Mul => mul(args[0], args[1], rm),
        FpOp::Div => div(args[0], args[1], rm),
        FpOp::Fma => fma(args[0], args[1], args[2], rm),
        FpOp::Convert(target) => convert(args[0], target, rm),
    }
}

/// Evaluates an IEEE comparison or classification predicate.
pub fn fp_compare(pred: FpPredicate, args: &[FpLiteral]) -> bool {
    assert_eq!(args.len(), pred.arity(), "wrong number of arguments for {}", pred.smtlib_name());
    let ord = || args[0].ieee_cmp(&args[1]);
    match pred {
        FpPredicate::IsNaN => args[0].is_nan(),
        FpPredicate::IsInfinite => args[0].is_infinite(),
        FpPredicate::IsZero => args[0].is_zero(),
        FpPredicate::Eq => ord() == Some(Ordering::Equal),
        FpPredicate::Leq => matches!(ord(), Some(Ordering::Less | Ordering::Equal)),
        FpPredicate::Lt => ord() == Some(Ordering::Less),
        FpPredicate::Geq => matches!(ord(), Some(Ordering::Greater | Ordering::Equal)),
        FpPredicate::Gt => ord() == Some(Ordering::Greater),
    }
}

/// Sign of an exact-zero sum: `-0` only for `-0 + -0`, or under RTN.
fn zero_sum_sign(a_zero_negative: Option<bool>, b_zero_negative: Option<bool>, rm: RoundingMode) -> bool {
    match (a_zero_negative, b_zero_negative) {
        (Some(x), Some(y)) if x == y => x,
        _ => rm == RoundingMode::Rtn,
    }
}

fn add(a: FpLiteral, b: FpLiteral, rm: RoundingMode) -> FpLiteral {
    let format = a.format();
    if a.is_nan() || b.is_nan() {
        return FpLiteral::nan(format);
    }
    match (a.is_infinite(), b.is_infinite()) {
        (true, true) if a.sign() != b.sign() => return FpLiteral::nan(format),
        (true, _) => return a,
        (_, true) => return b,
        _ => {}
    }
    let (da, db) = (a.to_dyadic().expect("finite"), b.to_dyadic().expect("finite"));
    let sum = da.add(&db);
    let zero_sign = zero_sum_sign(a.is_zero().then_some(a.sign()), b.is_zero().then_some(b.sign()), rm);
    round_dyadic(&sum, zero_sign, format, rm)
}

fn mul(a: FpLiteral, b: FpLiteral, rm: RoundingMode) -> FpLiteral {
    let format = a.format();
    let sign = a.sign() != b.sign();
    if a.is_nan() || b.is_nan() {
        return FpLiteral::nan(format);
    }
    if a.is_infinite() || b.is_infinite() {
        if a.is_zero() || b.is_zero() {
            return FpLiteral::nan(format);
        }
        return FpLiteral::infinity(format, sign);
    }
    let product = a.to_dyadic().expect("finite").mul(&b.to_dyadic().expect("finite"));
    round_dyadic(&product, sign, format, rm)
}

fn div(a: FpLiteral, b: FpLiteral, rm: RoundingMode) -> FpLiteral {
    let format = a.format();
    let sign = a.sign() != b.sign();
    if a.is_nan() || b.is_nan() {
        return FpLiteral::nan(format);
    }
    match (a.is_infinite(), b.is_infinite()) {
        (true, true) => return FpLiteral::nan(format),
        (true, false) => return FpLiteral::infinity(format, sign),
        (false, true) => return FpLiteral::zero(format, sign),
        _ => {}
    }
    match (a.is_zero(), b.is_zero()) {
        (true, true) => return FpLiteral::nan(format),
        (false, true) => return FpLiteral::infinity(format, sign),
        (true, false) => return FpLiteral::zero(format, sign),
        _ => {}
    }
    let (da, db) = (a.to_dyadic().expect("finite"), b.to_dyadic().expect("finite"));
    round_exact(sign, &da.mag, &db.mag, da.exp - db.exp, format, rm)
}

fn fma(a: FpLiteral, b: FpLiteral, c: FpLiteral, rm: RoundingMode) -> FpLiteral {
    let format = a.format();
    if a.is_nan() || b.is_nan() || c.is_nan() {
        return FpLiteral::nan(format);
    }
    let product_sign = a.sign() != b.sign();
    if a.is_infinite() || b.is_infinite() {
        if a.is_zero() || b.is_zero() {
            return FpLiteral::nan(format);
        }
        if c.is_infinite() && c.sign() != product_sign {
            return FpLiteral::nan(format);
        }
        return FpLiteral::infinity(format, product_sign);
    }
    if c.is_infinite() {
        return c;
    }
    let product = a.to_dyadic().expect("finite").mul(&b.to_dyadic().expect("finite"));
    let product_zero = product.is_zero().then_some(product_sign);
    let sum = product.add(&c.to_dyadic().expect("finite"));
    let zero_sign = zero_sum_sign(product_zero, c.is_zero().then_some(c.sign()), rm);
    round_dyadic(&sum, zero_sign, format, rm)
}

fn convert(a: FpLiteral, target: FpFormat, rm: RoundingMode) -> FpLiteral {
    if a.is_nan() {
        return FpLiteral::nan(target);
    }
    if a.is_infinite() {
        return FpLiteral::infinity(target, a.sign());
    }
    if a.is_zero() {
        return FpLiteral::zero(target, a.sign());
    }
    let d = a.to_dyadic().expect("finite");
    round_exact(d.negative, &d.mag, &BigUint::one(), d.exp, target, rm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn lit(format: FpFormat, n: i64, d: i64) -> FpLiteral {
        FpLiteral::from_rational(&BigRational::new(n.into(), d.into()), format, RoundingMode::Rne)
    }

    fn value(v: FpLiteral) -> BigRational {
        v.to_rational().expect("finite")
    }

    #[test]
    fn reduced_precision_addition_rounds_up() {
        let f = FpFormat::new(3, 3).unwrap();
        let sum = fp_eval(FpOp::Add, RoundingMode::Rne, &[lit(f, 2, 1), lit(f, 7, 4)]);
        assert_eq!(value(sum), BigRational::from_integer(4.into()));
    }

    #[test]
    fn single_precision_addition_is_exact() {
        let f = FpFormat::FLOAT32;
        let sum = fp_eval(FpOp::Add, RoundingMode::Rne, &[lit(f, 2, 1), lit(f, 7, 4)]);
        assert_eq!(value(sum), BigRational::new(15.into(), 4.into()));
    }

    #[test]
    fn nan_propagates() {
        let f = FpFormat::new(3, 3).unwrap();
        let nan = FpLiteral::nan(f);
        let one = lit(f, 1, 1);
        for op in [FpOp::Add, FpOp::Sub, FpOp::Mul, FpOp::Div] {
            assert!(fp_eval(op, RoundingMode::Rne, &[nan, one]).is_nan());
            assert!(fp_eval(op, RoundingMode::Rne, &[one, nan]).is_nan());
        }
        assert!(fp_eval(FpOp::Fma, RoundingMode::Rne, &[one, one, nan]).is_nan());
        assert_eq!(fp_eval(FpOp::Neg, RoundingMode::Rne, &[nan]), nan);
    }

    #[test]
    fn signed_zero_rules() {
        let f = FpFormat::new(3, 3).unwrap();
        let pz = FpLiteral::zero(f, false);
        let nz = FpLiteral::zero(f, true);
        let one = lit(f, 1, 1);
        assert_eq!(fp_eval(FpOp::Add, RoundingMode::Rne, &[nz, nz]), nz);
        assert_eq!(fp_eval(FpOp::Add, RoundingMode::Rne, &[pz, nz]), pz);
        assert_eq!(fp_eval(FpOp::Add, RoundingMode::Rtn, &[pz, nz]), nz);
        assert_eq!(fp_eval(FpOp::Sub, RoundingMode::Rne, &[one, one]), pz);
        assert_eq!(fp_eval(FpOp::Sub, RoundingMode::Rtn, &[one, one]), nz);
        assert_eq!(fp_eval(FpOp::Mul, RoundingMode::Rne, &[nz, one]), nz);
        assert_eq!(fp_eval(FpOp::Div, RoundingMode::Rne, &[one, nz]), FpLiteral::infinity(f, true));
    }

    #[test]
    fn infinity_rules() {
        let f = FpFormat::new(3, 3).unwrap();
        let inf = FpLiteral::infinity(f, false);
        let ninf = FpLiteral::infinity(f, true);
        let zero = FpLiteral::zero(f, false);
        assert!(fp_eval(FpOp::Add, RoundingMode::Rne, &[inf, ninf]).is_nan());
        assert!(fp_eval(FpOp::Mul, RoundingMode::Rne, &[inf, zero]).is_nan());
        assert!(fp_eval(FpOp::Div, RoundingMode::Rne, &[inf, ninf]).is_nan());
        assert_eq!(fp_eval(FpOp::Sub, RoundingMode::Rne, &[inf, ninf]), inf);
        // largest (3,3) value is 14; 14 + 14 overflows
        let max = FpLiteral::max_finite(f, false);
        assert_eq!(value(max), BigRational::from_integer(14.into()));
        assert_eq!(fp_eval(FpOp::Add, RoundingMode::Rne, &[max, max]), inf);
        assert_eq!(fp_eval(FpOp::Add, RoundingMode::Rtz, &[max, max]), max);
    }

    #[test]
    fn fma_rounds_once() {
        // 1.25 * 1.25 + -1.5 = 0.0625 exactly; separate rounding of the product in
        // (3,3) would give 1.5 and a zero result
        let f = FpFormat::new(3, 3).unwrap();
        let x = lit(f, 5, 4);
        let c = lit(f, -3, 2);
        let fused = fp_eval(FpOp::Fma, RoundingMode::Rne, &[x, x, c]);
        assert_eq!(value(fused), BigRational::new(1.into(), 16.into()));
        let p = fp_eval(FpOp::Mul, RoundingMode::Rne, &[x, x]);
        assert!(fp_eval(FpOp::Add, RoundingMode::Rne, &[p, c]).is_zero());
    }

    #[test]
    fn comparisons() {
        let f = FpFormat::new(3, 3).unwrap();
        let pz = FpLiteral::zero(f, false);
        let nz = FpLiteral::zero(f, true);
        let nan = FpLiteral::nan(f);
        let y = lit(f, 15, 4);
        assert!(fp_compare(FpPredicate::Geq, &[y, pz]));
        assert!(fp_compare(FpPredicate::Eq, &[pz, nz]));
        assert!(!fp_compare(FpPredicate::Lt, &[nan, lit(f, 1, 1)]));
        assert!(!fp_compare(FpPredicate::Eq, &[nan, nan]));
        assert!(fp_compare(FpPredicate::Lt, &[FpLiteral::infinity(f, true), nz]));
        assert!(fp_compare(FpPredicate::IsZero, &[nz]));
    }

    #[test]
    fn convert_narrows_and_widens() {
        let small = FpFormat::new(3, 3).unwrap();
        let third = FpLiteral::from_rational(&BigRational::new(1.into(), 3.into()), FpFormat::FLOAT32, RoundingMode::Rne);
        let narrowed = fp_eval(FpOp::Convert(small), RoundingMode::Rne, &[third]);
        // 1/3 in (3,3): neighbours 0.3125 and 0.375
        assert_eq!(value(narrowed), BigRational::new(5.into(), 16.into()));
        let widened = fp_eval(FpOp::Convert(FpFormat::FLOAT32), RoundingMode::Rne, &[narrowed]);
        assert_eq!(value(widened), value(narrowed));
    }
}
