//! Test support: a brute-force floating-point oracle that shares no code with
//! the evaluator, and proptest strategies for small formulas.

pub mod oracle {
    //! Reference semantics by exhaustive search over the representable values.

    use std::cell::RefCell;
    use std::collections::HashMap;
    use std::rc::Rc;

    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};

    use crate::fp::{FpFormat, FpLiteral, FpOp, RoundingMode};

    #[derive(Debug, Clone, PartialEq)]
    pub enum Exact {
        NaN,
        Infinity { negative: bool },
        /// Finite; zeros keep their sign.
        Finite { value: BigRational, negative: bool },
    }

    fn pow2(e: i64) -> BigRational {
        if e >= 0 {
            BigRational::from_integer(BigInt::one() << e as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
        }
    }

    /// Reads a literal straight from its packed bits.
    pub fn exact(lit: &FpLiteral) -> Exact {
        let format = lit.format();
        let (e, s) = (format.ebits() as i64, format.sbits() as i64);
        let bits = lit.to_packed();
        let fraction = bits & ((1u128 << (s - 1)) - 1);
        let exponent = ((bits >> (s - 1)) & ((1u128 << e) - 1)) as i64;
        let negative = (bits >> (e + s - 1)) & 1 == 1;
        let all_ones = (1i64 << e) - 1;
        let bias = (1i64 << (e - 1)) - 1;
        if exponent == all_ones {
            return if fraction == 0 { Exact::Infinity { negative } } else { Exact::NaN };
        }
        let magnitude = if exponent == 0 {
            BigRational::from_integer(BigInt::from(fraction)) * pow2(1 - bias - (s - 1))
        } else {
            BigRational::from_integer(BigInt::from(fraction + (1u128 << (s - 1)))) * pow2(exponent - bias - (s - 1))
        };
        Exact::Finite { value: if negative { -magnitude } else { magnitude }, negative }
    }

    type Table = Rc<Vec<(BigRational, FpLiteral)>>;

    thread_local! {
        static TABLES: RefCell<HashMap<FpFormat, Table>> = RefCell::default();
    }

    /// Every non-negative finite value of `format` in increasing order, with
    /// the literal that carries it.
    pub fn nonnegative_values(format: FpFormat) -> Rc<Vec<(BigRational, FpLiteral)>> {
        TABLES.with(|t| t.borrow_mut().entry(format).or_insert_with(|| Rc::new(build_table(format))).clone())
    }

    fn build_table(format: FpFormat) -> Vec<(BigRational, FpLiteral)> {
        let mut out = Vec::new();
        for bits in 0..(1u128 << (format.width() - 1)) {
            let lit = FpLiteral::from_packed(format, bits).expect("pattern within width");
            if let Exact::Finite { value, .. } = exact(&lit) {
                out.push((value, lit));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    fn negate(lit: FpLiteral) -> FpLiteral {
        let format = lit.format();
        FpLiteral::from_packed(format, lit.to_packed() ^ (1u128 << (format.width() - 1))).expect("same width")
    }

    fn even(lit: &FpLiteral) -> bool {
        lit.to_packed() & 1 == 0
    }

    /// The value `rm` selects for the nonzero rational `q`, found by scanning
    /// the representable values for the neighbours of `q`.
    pub fn round(q: &BigRational, format: FpFormat, rm: RoundingMode) -> FpLiteral {
        if q.is_zero() {
            return FpLiteral::zero(format, false);
        }
        let negative = q.is_negative();
        let magnitude = q.abs();
        let table = nonnegative_values(format);
        let (max, max_lit) = table.last().cloned().expect("formats have finite values");
        // rounding toward the sign of q moves the magnitude up
        let (up, down) = match rm {
            RoundingMode::Rtp => (!negative, negative),
            RoundingMode::Rtn => (negative, !negative),
            RoundingMode::Rtz => (false, true),
            RoundingMode::Rne | RoundingMode::Rna => (false, false),
        };
        let signed = |lit: FpLiteral| if negative { negate(lit) } else { lit };
        if magnitude > max {
            let ulp = pow2(format.emax() - (format.sbits() as i64 - 1));
            let overflow = if up {
                true
            } else if down {
                false
            } else {
                magnitude >= max + ulp / BigRational::from_integer(2.into())
            };
            return if overflow { FpLiteral::infinity(format, negative) } else { signed(max_lit) };
        }
        let upper = table.iter().position(|(v, _)| *v >= magnitude).expect("magnitude at most max");
        if table[upper].0 == magnitude {
            return signed(table[upper].1);
        }
        let (lo, lo_lit) = &table[upper - 1];
        let (hi, hi_lit) = &table[upper];
        let pick_hi = if up {
            true
        } else if down {
            false
        } else {
            let below = &magnitude - lo;
            let above = hi - &magnitude;
            match below.cmp(&above) {
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Equal if rm == RoundingMode::Rna => true,
                std::cmp::Ordering::Equal => !even(lo_lit),
            }
        };
        let chosen = if pick_hi { *hi_lit } else { *lo_lit };
        if chosen.is_zero() {
            return FpLiteral::zero(format, negative);
        }
        signed(chosen)
    }

    fn zero_sum_sign(rm: RoundingMode) -> bool {
        rm == RoundingMode::Rtn
    }

    fn finite(value: BigRational, negative: bool) -> Exact {
        Exact::Finite { value, negative }
    }

    /// Rounds an exact result, where `negative` is the sign an exact zero
    /// carries.
    fn to_literal(result: Exact, format: FpFormat, rm: RoundingMode) -> FpLiteral {
        match result {
            Exact::NaN => FpLiteral::nan(format),
            Exact::Infinity { negative } => FpLiteral::infinity(format, negative),
            Exact::Finite { value, negative } if value.is_zero() => FpLiteral::zero(format, negative),
            Exact::Finite { value, .. } => round(&value, format, rm),
        }
    }

    fn add(a: Exact, b: Exact, rm: RoundingMode) -> Exact {
        match (a, b) {
            (Exact::NaN, _) | (_, Exact::NaN) => Exact::NaN,
            (Exact::Infinity { negative: x }, Exact::Infinity { negative: y }) if x != y => Exact::NaN,
            (Exact::Infinity { negative }, _) | (_, Exact::Infinity { negative }) => Exact::Infinity { negative },
            (Exact::Finite { value: x, negative: sx }, Exact::Finite { value: y, negative: sy }) => {
                let sum = &x + &y;
                if !sum.is_zero() {
                    return finite(sum, false);
                }
                let both_zero_same_sign = x.is_zero() && y.is_zero() && sx == sy;
                finite(sum, if both_zero_same_sign { sx } else { zero_sum_sign(rm) })
            }
        }
    }

    fn neg(a: Exact) -> Exact {
        match a {
            Exact::NaN => Exact::NaN,
            Exact::Infinity { negative } => Exact::Infinity { negative: !negative },
            Exact::Finite { value, negative } => finite(-value, !negative),
        }
    }

    fn sign_of(a: &Exact) -> bool {
        match a {
            Exact::NaN => false,
            Exact::Infinity { negative } | Exact::Finite { negative, .. } => *negative,
        }
    }

    fn is_zero(a: &Exact) -> bool {
        matches!(a, Exact::Finite { value, .. } if value.is_zero())
    }

    fn mul(a: Exact, b: Exact) -> Exact {
        let negative = sign_of(&a) != sign_of(&b);
        match (&a, &b) {
            (Exact::NaN, _) | (_, Exact::NaN) => Exact::NaN,
            (Exact::Infinity { .. }, _) | (_, Exact::Infinity { .. }) => {
                if is_zero(&a) || is_zero(&b) {
                    Exact::NaN
                } else {
                    Exact::Infinity { negative }
                }
            }
            (Exact::Finite { value: x, .. }, Exact::Finite { value: y, .. }) => finite(x * y, negative),
        }
    }

    fn div(a: Exact, b: Exact) -> Exact {
        let negative = sign_of(&a) != sign_of(&b);
        match (&a, &b) {
            (Exact::NaN, _) | (_, Exact::NaN) => Exact::NaN,
            (Exact::Infinity { .. }, Exact::Infinity { .. }) => Exact::NaN,
            (Exact::Infinity { .. }, _) => Exact::Infinity { negative },
            (_, Exact::Infinity { .. }) => finite(BigRational::zero(), negative),
            (Exact::Finite { value: x, .. }, Exact::Finite { value: y, .. }) => {
                if y.is_zero() {
                    if x.is_zero() {
                        Exact::NaN
                    } else {
                        Exact::Infinity { negative }
                    }
                } else {
                    finite(x / y, negative)
                }
            }
        }
    }

    /// Reference result of `op` on `args` (rounding-mode argument excluded).
    pub fn eval(op: FpOp, rm: RoundingMode, args: &[FpLiteral]) -> FpLiteral {
        let format = args[0].format();
        let x: Vec<Exact> = args.iter().map(exact).collect();
        let result = match op {
            FpOp::Add => add(x[0].clone(), x[1].clone(), rm),
            FpOp::Sub => add(x[0].clone(), neg(x[1].clone()), rm),
            FpOp::Mul => mul(x[0].clone(), x[1].clone()),
            FpOp::Div => div(x[0].clone(), x[1].clone()),
            FpOp::Fma => {
                let product = mul(x[0].clone(), x[1].clone());
                // the product is exact, so an exact zero keeps its sign
                add(product, x[2].clone(), rm)
            }
            FpOp::Neg => return negate(args[0]),
            FpOp::Abs => {
                return if args[0].sign() { negate(args[0]) } else { args[0] };
            }
            FpOp::Convert(target) => return to_literal(x[0].clone(), target, rm),
        };
        to_literal(result, format, rm)
    }

    /// Whether two results agree bit for bit, with all NaNs identified.
    pub fn same(a: &FpLiteral, b: &FpLiteral) -> bool {
        (a.is_nan() && b.is_nan()) || a.to_packed() == b.to_packed()
    }

    /// Exact rational of a fixed-point bit pattern.
    pub fn fixed_point_value(bits: u128, width: u32, frac_bits: u32) -> BigRational {
        let unsigned = BigInt::from(bits);
        let signed = if (bits >> (width - 1)) & 1 == 1 { unsigned - (BigInt::one() << width as usize) } else { unsigned };
        BigRational::from_integer(signed) * pow2(-(frac_bits as i64))
    }
}

pub mod generators {
    //! Strategies producing small, well-sorted floating-point formulas.

    use std::sync::Arc;

    use proptest::prelude::*;

    use crate::ast::{Ast, Formula, Label, Op};
    use crate::fp::{FpFormat, FpLiteral, FpOp, FpPredicate, RoundingMode};
    use crate::sort::Sort;

    fn blank() -> Label {
        Label::new(vec![])
    }

    pub fn variable_name(i: usize) -> Arc<str> {
        format!("x{i}").into()
    }

    /// Any canonical value of `format`, finite values weighted up.
    pub fn literal(format: FpFormat) -> impl Strategy<Value = FpLiteral> {
        let width = format.width();
        let finite = (0..(1u128 << width))
            .prop_map(move |bits| FpLiteral::from_packed(format, bits).expect("in range").canonical())
            .prop_filter("finite", |v| v.is_finite());
        let any = (0..(1u128 << width)).prop_map(move |bits| FpLiteral::from_packed(format, bits).expect("in range").canonical());
        prop_oneof![6 => finite, 1 => any]
    }

    fn rounding_mode() -> impl Strategy<Value = RoundingMode> {
        prop_oneof![6 => Just(RoundingMode::Rne), 1 => proptest::sample::select(RoundingMode::ALL.to_vec())]
    }

    /// Floating-point terms over variables `x0..x{vars-1}` of `format`.
    pub fn fp_term(format: FpFormat, vars: usize, depth: u32) -> BoxedStrategy<Ast> {
        let sort = Sort::Float(format);
        let var = (0..vars).prop_map(move |i| Ast::var(variable_name(i), sort, blank()));
        let lit = literal(format).prop_map(|v| Ast::fp(v, blank()));
        let leaf = prop_oneof![3 => var, 2 => lit];
        leaf.prop_recursive(depth, 8, 3, |inner| {
            let binary = (
                proptest::sample::select(vec![FpOp::Add, FpOp::Sub, FpOp::Mul, FpOp::Div]),
                rounding_mode(),
                inner.clone(),
                inner.clone(),
            )
                .prop_map(|(op, rm, a, b)| {
                    Ast::apply(Op::Fp(op), blank(), vec![Ast::rm(rm, blank()), a, b]).expect("well sorted")
                });
            let unary = (proptest::sample::select(vec![FpOp::Neg, FpOp::Abs]), inner.clone())
                .prop_map(|(op, a)| Ast::apply(Op::Fp(op), blank(), vec![a]).expect("well sorted"));
            let fma = (rounding_mode(), inner.clone(), inner.clone(), inner).prop_map(|(rm, a, b, c)| {
                Ast::apply(Op::Fp(FpOp::Fma), blank(), vec![Ast::rm(rm, blank()), a, b, c]).expect("well sorted")
            });
            prop_oneof![6 => binary, 2 => unary, 1 => fma]
        })
        .boxed()
    }

    /// A Boolean atom over floating-point terms.
    pub fn atom(format: FpFormat, vars: usize, depth: u32) -> BoxedStrategy<Ast> {
        let term = fp_term(format, vars, depth);
        let compare = (
            proptest::sample::select(vec![
                FpPredicate::Leq,
                FpPredicate::Lt,
                FpPredicate::Geq,
                FpPredicate::Gt,
                FpPredicate::Eq,
            ]),
            term.clone(),
            term.clone(),
        )
            .prop_map(|(p, a, b)| Ast::apply(Op::FpPred(p), blank(), vec![a, b]).expect("well sorted"));
        let equal = (term.clone(), term.clone())
            .prop_map(|(a, b)| Ast::apply(Op::Eq, blank(), vec![a, b]).expect("well sorted"));
        // definitional shape: a variable on the left
        let define = ((0..vars), term.clone()).prop_map(move |(i, b)| {
            let v = Ast::var(variable_name(i), Sort::Float(format), blank());
            Ast::apply(Op::Eq, blank(), vec![v, b]).expect("well sorted")
        });
        let class = (proptest::sample::select(vec![FpPredicate::IsNaN, FpPredicate::IsInfinite, FpPredicate::IsZero]), term)
            .prop_map(|(p, a)| Ast::apply(Op::FpPred(p), blank(), vec![a]).expect("well sorted"));
        prop_oneof![5 => compare, 2 => equal, 3 => define, 1 => class].boxed()
    }

    /// A Boolean combination of atoms.
    pub fn assertion(format: FpFormat, vars: usize, depth: u32) -> BoxedStrategy<Ast> {
        atom(format, vars, depth)
            .prop_recursive(2, 6, 2, |inner| {
                prop_oneof![
                    inner.clone().prop_map(|a| Ast::apply(Op::Not, blank(), vec![a]).expect("well sorted")),
                    (inner.clone(), inner.clone())
                        .prop_map(|(a, b)| Ast::apply(Op::And, blank(), vec![a, b]).expect("well sorted")),
                    (inner.clone(), inner)
                        .prop_map(|(a, b)| Ast::apply(Op::Or, blank(), vec![a, b]).expect("well sorted")),
                ]
            })
            .boxed()
    }

    /// A formula with `vars` declared variables of `format` and one to
    /// `max_assertions` assertions.
    pub fn formula(format: FpFormat, vars: usize, max_assertions: usize, depth: u32) -> BoxedStrategy<Formula> {
        proptest::collection::vec(assertion(format, vars, depth), 1..=max_assertions)
            .prop_map(move |assertions| {
                let decls = (0..vars).map(|i| (variable_name(i), Sort::Float(format))).collect();
                Formula::new(decls, assertions)
            })
            .boxed()
    }

    /// A chain `x0 = c, x1 = f1(x0, ...), ..., x{n-1} = f(x{n-2}, ...)` of
    /// definitional equalities, each right-hand side using only earlier
    /// variables and literals, plus optional extra assertions.
    pub fn definitional_chain(format: FpFormat, vars: usize) -> BoxedStrategy<Formula> {
        let sort = Sort::Float(format);
        let steps: Vec<BoxedStrategy<Ast>> = (0..vars)
            .map(|i| {
                let rhs = if i == 0 {
                    literal(format).prop_map(|v| Ast::fp(v, blank())).boxed()
                } else {
                    fp_term(format, i, 2)
                };
                rhs.prop_map(move |r| {
                    Ast::apply(Op::Eq, blank(), vec![Ast::var(variable_name(i), sort, blank()), r]).expect("well sorted")
                })
                .boxed()
            })
            .collect();
        (steps, proptest::collection::vec(atom(format, vars, 1), 0..=1))
            .prop_map(move |(mut chain, extra)| {
                chain.extend(extra);
                let decls = (0..vars).map(|i| (variable_name(i), sort)).collect();
                Formula::new(decls, chain)
            })
            .boxed()
    }
}
