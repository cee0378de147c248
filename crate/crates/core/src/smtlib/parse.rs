use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Zero};

use super::sexp::{parse_sexprs, SExpr};
use crate::ast::{Ast, Formula, Label, Op, RealOp, RealPredicate};
use crate::bv::{BitVecValue, BvOp, BvPredicate};
use crate::error::ParseError;
use crate::fp::{FpFormat, FpLiteral, FpOp, FpPredicate, RoundingMode};
use crate::sort::{Sort, MAX_BITVEC_WIDTH};
use crate::value::Value;

/// A parsed script: the logic named by `set-logic` and the asserted formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub logic: Option<String>,
    pub formula: Formula,
}

pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let exprs = parse_sexprs(text).map_err(|(offset, message)| ParseError::Syntax { offset, message })?;
    let mut reader = TermReader::default();
    let mut logic = None;
    let mut assertions = Vec::new();
    for command in &exprs {
        let items = command.list().ok_or_else(|| syntax(command, "expected a command"))?;
        let name = command.head().ok_or_else(|| syntax(command, "expected a command name"))?;
        match name {
            "set-logic" => {
                let tag = items.get(1).and_then(SExpr::atom).ok_or_else(|| syntax(command, "missing logic"))?;
                logic = Some(tag.to_string());
            }
            "set-option" | "set-info" | "check-sat" | "get-model" | "exit" => {}
            "declare-fun" => {
                let [_, name, params, sort] = items else {
                    return Err(syntax(command, "expected (declare-fun name () sort)"));
                };
                if params.list().is_none_or(|p| !p.is_empty()) {
                    return Err(ParseError::UnsupportedConstruct("declare-fun with arguments".into()));
                }
                reader.declare(name, sort)?;
            }
            "declare-const" => {
                let [_, name, sort] = items else {
                    return Err(syntax(command, "expected (declare-const name sort)"));
                };
                reader.declare(name, sort)?;
            }
            "define-fun" => {
                let [_, name, params, sort, body] = items else {
                    return Err(syntax(command, "expected (define-fun name () sort body)"));
                };
                if params.list().is_none_or(|p| !p.is_empty()) {
                    return Err(ParseError::UnsupportedConstruct("define-fun with arguments".into()));
                }
                let body = reader.term(body)?;
                let var = reader.declare(name, sort)?;
                assertions.push(Ast::apply(Op::Eq, Label::new(vec![]), vec![var, body])?);
            }
            "assert" => {
                let [_, term] = items else {
                    return Err(syntax(command, "expected (assert term)"));
                };
                let term = reader.term(term)?;
                if term.sort() != Sort::Bool {
                    return Err(ParseError::SortMismatch(crate::error::SortError::Mismatch {
                        op: "assert".into(),
                        found: term.sort().to_string(),
                    }));
                }
                assertions.push(term);
            }
            other => return Err(ParseError::UnsupportedConstruct(other.to_string())),
        }
    }
    Ok(Script { logic, formula: Formula::new(reader.declarations, assertions) })
}

/// Parses a closed constant term such as `(fp #b0 #b100 #b00)`, `(- 4.0)` or
/// `#b0101` into a value.
pub fn parse_constant(expr: &SExpr) -> Result<Value, ParseError> {
    let term = TermReader::default().term(expr)?;
    match term.op() {
        Op::Const(v) => Ok(v.clone()),
        _ => Err(ParseError::InvalidLiteral(expr.to_string())),
    }
}

pub fn parse_sort(expr: &SExpr) -> Result<Sort, ParseError> {
    if let Some(name) = expr.atom() {
        return match name {
            "Bool" => Ok(Sort::Bool),
            "RoundingMode" | "RM" => Ok(Sort::RoundingMode),
            "Real" => Ok(Sort::Real),
            "Float16" => Ok(Sort::Float(FpFormat::FLOAT16)),
            "Float32" => Ok(Sort::Float(FpFormat::FLOAT32)),
            "Float64" => Ok(Sort::Float(FpFormat::FLOAT64)),
            "Float128" => Ok(Sort::Float(FpFormat::FLOAT128)),
            other => Err(ParseError::UnsupportedConstruct(format!("sort {other}"))),
        };
    }
    let items = expr.list().unwrap_or_default();
    match items {
        [u, name, e, s] if u.atom() == Some("_") && name.atom() == Some("FloatingPoint") => {
            Ok(Sort::float(index(e)?, index(s)?)?)
        }
        [u, name, w] if u.atom() == Some("_") && name.atom() == Some("BitVec") => Ok(Sort::bitvec(index(w)?)?),
        _ => Err(ParseError::UnsupportedConstruct(format!("sort {expr}"))),
    }
}

fn syntax(expr: &SExpr, message: &str) -> ParseError {
    ParseError::Syntax { offset: expr.offset(), message: message.to_string() }
}

fn index(expr: &SExpr) -> Result<u32, ParseError> {
    expr.atom().and_then(|a| a.parse().ok()).ok_or_else(|| syntax(expr, "expected a numeral index"))
}

fn placeholder() -> Label {
    Label::new(vec![])
}

/// Bits of a `#b`/`#x` literal, most significant first.
fn bit_literal(token: &str) -> Option<Vec<bool>> {
    if let Some(bin) = token.strip_prefix("#b") {
        if bin.is_empty() || !bin.bytes().all(|b| b == b'0' || b == b'1') {
            return None;
        }
        return Some(bin.bytes().map(|b| b == b'1').collect());
    }
    let hex = token.strip_prefix("#x")?;
    if hex.is_empty() {
        return None;
    }
    let mut bits = Vec::with_capacity(hex.len() * 4);
    for c in hex.chars() {
        let d = c.to_digit(16)?;
        bits.extend((0..4).rev().map(|i| (d >> i) & 1 == 1));
    }
    Some(bits)
}

fn bits_to_bv(bits: &[bool]) -> Option<BitVecValue> {
    let width = bits.len() as u32;
    if width == 0 || width > MAX_BITVEC_WIDTH {
        return None;
    }
    Some(BitVecValue::new(width, bits.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128)))
}

fn numeral_or_decimal(token: &str) -> Option<BigRational> {
    let (int, frac) = match token.split_once('.') {
        Some((i, f)) => (i, f),
        None => (token, ""),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || (token.contains('.') && !digits(frac)) {
        return None;
    }
    let numer = BigInt::from_str_radix(&format!("{int}{frac}"), 10).ok()?;
    let denom = BigInt::from(10u32).pow(frac.len() as u32);
    Some(BigRational::new(numer, denom))
}

#[derive(Default)]
struct TermReader {
    declarations: Vec<(Arc<str>, Sort)>,
    variables: HashMap<String, Sort>,
    scopes: Vec<HashMap<String, Ast>>,
}

impl TermReader {
    fn declare(&mut self, name: &SExpr, sort: &SExpr) -> Result<Ast, ParseError> {
        let name = name.atom().ok_or_else(|| syntax(name, "expected a symbol"))?;
        let sort = parse_sort(sort)?;
        if self.variables.insert(name.to_string(), sort).is_some() {
            return Err(ParseError::Redeclared(name.to_string()));
        }
        self.declarations.push((name.into(), sort));
        Ok(Ast::var(name, sort, placeholder()))
    }

    fn term(&mut self, expr: &SExpr) -> Result<Ast, ParseError> {
        match expr {
            SExpr::Atom(token, _) => self.atom(token),
            SExpr::List(items, _) => {
                let Some(head) = items.first() else {
                    return Err(syntax(expr, "empty application"));
                };
                match head {
                    SExpr::Atom(name, _) if name == "_" => self.indexed_constant(expr, items),
                    SExpr::Atom(name, _) if name == "let" => self.let_term(expr, items),
                    SExpr::Atom(name, _) if name == "fp" => self.fp_literal(expr, &items[1..]),
                    SExpr::Atom(name, _) => {
                        let args = items[1..].iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                        self.application(name, args)
                    }
                    SExpr::List(..) => {
                        let args = items[1..].iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                        self.indexed_application(head, args)
                    }
                }
            }
        }
    }

    fn atom(&mut self, token: &str) -> Result<Ast, ParseError> {
        for scope in self.scopes.iter().rev() {
            if let Some(bound) = scope.get(token) {
                return Ok(bound.clone());
            }
        }
        if let Some(sort) = self.variables.get(token) {
            return Ok(Ast::var(token, *sort, placeholder()));
        }
        match token {
            "true" => return Ok(Ast::bool(true, placeholder())),
            "false" => return Ok(Ast::bool(false, placeholder())),
            _ => {}
        }
        if let Some(rm) = RoundingMode::from_smtlib(token) {
            return Ok(Ast::rm(rm, placeholder()));
        }
        if token.starts_with('#') {
            let bv = bit_literal(token).and_then(|b| bits_to_bv(&b));
            return bv.map(|v| Ast::bv(v, placeholder())).ok_or_else(|| ParseError::InvalidLiteral(token.into()));
        }
        if token.as_bytes()[0].is_ascii_digit() {
            let q = numeral_or_decimal(token).ok_or_else(|| ParseError::InvalidLiteral(token.into()))?;
            return Ok(Ast::real(q, placeholder()));
        }
        Err(ParseError::Undeclared(token.to_string()))
    }

    fn let_term(&mut self, expr: &SExpr, items: &[SExpr]) -> Result<Ast, ParseError> {
        let [_, bindings, body] = items else {
            return Err(syntax(expr, "expected (let (bindings) body)"));
        };
        let bindings = bindings.list().ok_or_else(|| syntax(bindings, "expected a binding list"))?;
        let mut scope = HashMap::new();
        for binding in bindings {
            match binding.list() {
                Some([name, value]) if name.atom().is_some() => {
                    let value = self.term(value)?;
                    scope.insert(name.atom().unwrap().to_string(), value);
                }
                _ => return Err(syntax(binding, "expected (name term)")),
            }
        }
        self.scopes.push(scope);
        let body = self.term(body);
        self.scopes.pop();
        body
    }

    /// `(_ +oo e s)` and friends, and `(_ bvN w)`.
    fn indexed_constant(&mut self, expr: &SExpr, items: &[SExpr]) -> Result<Ast, ParseError> {
        let name = items.get(1).and_then(SExpr::atom).ok_or_else(|| syntax(expr, "expected an indexed symbol"))?;
        if let Some(value) = name.strip_prefix("bv") {
            let [_, _, w] = items else {
                return Err(syntax(expr, "expected (_ bvN width)"));
            };
            let width = index(w)?;
            let value: u128 = value.parse().map_err(|_| ParseError::InvalidLiteral(expr.to_string()))?;
            Sort::bitvec(width)?;
            return Ok(Ast::bv(BitVecValue::new(width, value), placeholder()));
        }
        let [_, _, e, s] = items else {
            return Err(ParseError::UnsupportedConstruct(expr.to_string()));
        };
        let format = FpFormat::new(index(e)?, index(s)?)?;
        let literal = match name {
            "+oo" => FpLiteral::infinity(format, false),
            "-oo" => FpLiteral::infinity(format, true),
            "+zero" => FpLiteral::zero(format, false),
            "-zero" => FpLiteral::zero(format, true),
            "NaN" => FpLiteral::nan(format),
            _ => return Err(ParseError::UnsupportedConstruct(name.to_string())),
        };
        Ok(Ast::fp(literal, placeholder()))
    }

    fn fp_literal(&mut self, expr: &SExpr, args: &[SExpr]) -> Result<Ast, ParseError> {
        let invalid = || ParseError::InvalidLiteral(expr.to_string());
        let bits: Vec<Vec<bool>> = args
            .iter()
            .map(|a| a.atom().and_then(bit_literal).ok_or_else(invalid))
            .collect::<Result<_, _>>()?;
        let [sign, exponent, significand] = bits.as_slice() else {
            return Err(invalid());
        };
        if sign.len() != 1 {
            return Err(invalid());
        }
        let format = FpFormat::new(exponent.len() as u32, significand.len() as u32 + 1)?;
        let literal = FpLiteral::from_bit_lists(format, sign[0], exponent, significand).map_err(|_| invalid())?;
        Ok(Ast::fp(literal.canonical(), placeholder()))
    }

    fn application(&mut self, name: &str, args: Vec<Ast>) -> Result<Ast, ParseError> {
        let op = match name {
            "not" => Op::Not,
            "and" => Op::And,
            "or" => Op::Or,
            "=>" => Op::Implies,
            "xor" => Op::Xor,
            "ite" => Op::Ite,
            "=" => Op::Eq,
            "distinct" => Op::Distinct,
            "fp.add" => Op::Fp(FpOp::Add),
            "fp.sub" => Op::Fp(FpOp::Sub),
            "fp.mul" => Op::Fp(FpOp::Mul),
            "fp.div" => Op::Fp(FpOp::Div),
            "fp.fma" => Op::Fp(FpOp::Fma),
            "fp.neg" => Op::Fp(FpOp::Neg),
            "fp.abs" => Op::Fp(FpOp::Abs),
            "fp.eq" => Op::FpPred(FpPredicate::Eq),
            "fp.leq" => Op::FpPred(FpPredicate::Leq),
            "fp.lt" => Op::FpPred(FpPredicate::Lt),
            "fp.geq" => Op::FpPred(FpPredicate::Geq),
            "fp.gt" => Op::FpPred(FpPredicate::Gt),
            "fp.isNaN" => Op::FpPred(FpPredicate::IsNaN),
            "fp.isInfinite" => Op::FpPred(FpPredicate::IsInfinite),
            "fp.isZero" => Op::FpPred(FpPredicate::IsZero),
            "bvadd" => Op::Bv(BvOp::Add),
            "bvsub" => Op::Bv(BvOp::Sub),
            "bvmul" => Op::Bv(BvOp::Mul),
            "bvsdiv" => Op::Bv(BvOp::Sdiv),
            "bvneg" => Op::Bv(BvOp::Neg),
            "bvshl" => Op::Bv(BvOp::Shl),
            "bvashr" => Op::Bv(BvOp::Ashr),
            "bvsle" => Op::BvPred(BvPredicate::Sle),
            "bvslt" => Op::BvPred(BvPredicate::Slt),
            "bvsge" => Op::BvPred(BvPredicate::Sge),
            "bvsgt" => Op::BvPred(BvPredicate::Sgt),
            "+" => Op::Real(RealOp::Add),
            "-" if args.len() == 1 => Op::Real(RealOp::Neg),
            "-" => Op::Real(RealOp::Sub),
            "*" => Op::Real(RealOp::Mul),
            "/" => Op::Real(RealOp::Div),
            "<=" => Op::RealPred(RealPredicate::Leq),
            "<" => Op::RealPred(RealPredicate::Lt),
            ">=" => Op::RealPred(RealPredicate::Geq),
            ">" => Op::RealPred(RealPredicate::Gt),
            other => return Err(ParseError::UnsupportedConstruct(other.to_string())),
        };
        let chainable = matches!(op, Op::Eq | Op::Distinct | Op::FpPred(_) | Op::BvPred(_) | Op::RealPred(_) | Op::Real(_));
        if chainable && args.len() > 2 {
            return Err(ParseError::UnsupportedConstruct(format!("{name} with {} arguments", args.len())));
        }
        if let Some(folded) = fold_real_literal(&op, &args) {
            return Ok(folded);
        }
        Ok(Ast::apply(op, placeholder(), args)?)
    }

    fn indexed_application(&mut self, head: &SExpr, args: Vec<Ast>) -> Result<Ast, ParseError> {
        let items = head.list().unwrap_or_default();
        let unsupported = || ParseError::UnsupportedConstruct(head.to_string());
        if items.first().and_then(SExpr::atom) != Some("_") {
            return Err(unsupported());
        }
        match items.get(1).and_then(SExpr::atom) {
            Some("to_fp") => {
                let [_, _, e, s] = items else { return Err(unsupported()) };
                let format = FpFormat::new(index(e)?, index(s)?)?;
                self.convert_to_fp(head, format, args)
            }
            Some("extract") => {
                let [_, _, h, l] = items else { return Err(unsupported()) };
                Ok(Ast::apply(Op::Bv(BvOp::Extract(index(h)?, index(l)?)), placeholder(), args)?)
            }
            Some("sign_extend") => {
                let [_, _, k] = items else { return Err(unsupported()) };
                Ok(Ast::apply(Op::Bv(BvOp::SignExtend(index(k)?)), placeholder(), args)?)
            }
            _ => Err(unsupported()),
        }
    }

    fn convert_to_fp(&mut self, head: &SExpr, format: FpFormat, mut args: Vec<Ast>) -> Result<Ast, ParseError> {
        let unsupported = || ParseError::UnsupportedConstruct(format!("{head} on these arguments"));
        match args.as_slice() {
            // reinterpret a bit-vector literal as an IEEE bit pattern
            [bits] => match bits.literal() {
                Some(Value::Bv(bv)) if bv.width() == format.width() => {
                    let literal = FpLiteral::from_packed(format, bv.bits()).map_err(|_| unsupported())?;
                    Ok(Ast::fp(literal.canonical(), placeholder()))
                }
                _ => Err(unsupported()),
            },
            [rm, arg] => match (rm.literal(), arg.sort(), arg.literal()) {
                (Some(Value::Rm(rm)), Sort::Real, Some(Value::Real(q))) => {
                    Ok(Ast::fp(FpLiteral::from_rational(q, format, *rm), placeholder()))
                }
                (_, Sort::Float(_), _) => {
                    Ok(Ast::apply(Op::Fp(FpOp::Convert(format)), placeholder(), std::mem::take(&mut args))?)
                }
                _ => Err(unsupported()),
            },
            _ => Err(unsupported()),
        }
    }
}

/// Folds `(- q)` and `(/ p q)` over real literals into a single literal.
fn fold_real_literal(op: &Op, args: &[Ast]) -> Option<Ast> {
    let reals: Option<Vec<&BigRational>> =
        args.iter().map(|a| if let Some(Value::Real(q)) = a.literal() { Some(q) } else { None }).collect();
    let reals = reals?;
    let q = match (op, reals.as_slice()) {
        (Op::Real(RealOp::Neg), [q]) => -(*q).clone(),
        (Op::Real(RealOp::Div), [p, q]) if !q.is_zero() => *p / *q,
        _ => return None,
    };
    Some(Ast::real(q, placeholder()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUNNING_EXAMPLE: &str = "
        (set-logic QF_FP)
        (declare-fun x () (_ FloatingPoint 8 24))
        (declare-fun y () (_ FloatingPoint 8 24))
        (assert (= y (fp.add RNE x ((_ to_fp 8 24) RNE 1.75))))
        (assert (fp.geq y (_ +zero 8 24)))
        (assert (or (= x ((_ to_fp 8 24) RNE 2.0)) (= x ((_ to_fp 8 24) roundNearestTiesToEven (- 4.0)))))
        (check-sat)
        (get-model)";

    #[test]
    fn running_example_parses() {
        let script = parse_script(RUNNING_EXAMPLE).unwrap();
        assert_eq!(script.logic.as_deref(), Some("QF_FP"));
        let formula = &script.formula;
        assert_eq!(formula.assertions().len(), 3);
        assert_eq!(formula.declarations().len(), 2);
        let lit = formula.assertions()[0].children()[1].children()[2].literal().unwrap();
        assert_eq!(lit.as_fp().unwrap().to_f64_lossy(), 1.75);
        let minus4 = formula.assertions()[2].children()[1].children()[1].literal().unwrap();
        assert_eq!(minus4.as_fp().unwrap().to_f64_lossy(), -4.0);
    }

    #[test]
    fn variables_share_labels() {
        let script = parse_script(RUNNING_EXAMPLE).unwrap();
        let a = &script.formula.assertions();
        let y0 = a[0].children()[0].label();
        let y1 = a[1].children()[0].label();
        assert_eq!(y0, y1);
        assert_eq!(script.formula.declaration("y").unwrap().label, *y0);
        let x0 = a[0].children()[1].children()[1].label();
        assert_eq!(a[2].children()[0].children()[0].label(), x0);
    }

    #[test]
    fn assert_true() {
        let script = parse_script("(assert true)").unwrap();
        assert_eq!(script.formula.assertions()[0].literal(), Some(&Value::Bool(true)));
    }

    #[test]
    fn define_fun_becomes_equality() {
        let script = parse_script("(define-fun b () Bool (not false)) (assert b)").unwrap();
        let eq = &script.formula.assertions()[0];
        assert_eq!(eq.op(), &Op::Eq);
        assert_eq!(eq.children()[0].var_name(), Some("b"));
    }

    #[test]
    fn let_is_inlined() {
        let script = parse_script(
            "(declare-fun x () Float32) (assert (let ((t (fp.add RNE x x))) (fp.lt t t)))",
        )
        .unwrap();
        let lt = &script.formula.assertions()[0];
        assert_eq!(lt.children()[0].op(), &Op::Fp(FpOp::Add));
        assert_ne!(lt.children()[0].label(), lt.children()[1].label());
    }

    #[test]
    fn literal_forms() {
        let script = parse_script(
            "(declare-fun x () (_ FloatingPoint 3 3))
             (assert (= x (fp #b0 #b100 #b00)))
             (assert (= x ((_ to_fp 3 3) #b010000)))
             (assert (= x (_ NaN 3 3)))
             (assert (= #x0f (_ bv15 8)))",
        )
        .unwrap();
        let a = script.formula.assertions();
        assert_eq!(a[0].children()[1].literal(), a[1].children()[1].literal());
        assert!(a[2].children()[1].literal().unwrap().as_fp().unwrap().is_nan());
        assert_eq!(a[3].children()[0].literal(), a[3].children()[1].literal());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_script("(push 1)"), Err(ParseError::UnsupportedConstruct(_))));
        assert!(matches!(
            parse_script("(declare-fun x () Float32) (assert (= (fp.sqrt RNE x) x))"),
            Err(ParseError::UnsupportedConstruct(_))
        ));
        assert!(matches!(
            parse_script("(declare-fun x () Float32) (assert (= x true))"),
            Err(ParseError::SortMismatch(_))
        ));
        assert!(matches!(parse_script("(assert z)"), Err(ParseError::Undeclared(_))));
        assert!(matches!(parse_script("(assert (and true"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_script("(declare-fun x () Bool) (declare-fun x () Bool)"),
            Err(ParseError::Redeclared(_))
        ));
    }

    #[test]
    fn constants() {
        let parse = |s: &str| parse_constant(&parse_sexprs(s).unwrap()[0]).unwrap();
        assert_eq!(parse("(/ 15.0 4.0)"), Value::Real(BigRational::new(15.into(), 4.into())));
        assert_eq!(parse("(- 4)"), Value::Real(BigRational::from_integer((-4).into())));
        assert_eq!(parse("roundTowardZero"), Value::Rm(RoundingMode::Rtz));
        let two = parse("(fp #b0 #x80 #b00000000000000000000000)");
        assert_eq!(two.as_fp().unwrap().to_f64_lossy(), 2.0);
    }
}
