//! Three-valued evaluation of terms under a partial model.
//!
//! A result of `None` means the value depends on a variable the model does
//! not bind (or on a real division by zero, which SMT-LIB leaves open).

use num_traits::Zero;

use crate::ast::{Ast, Model, Op, RealOp, RealPredicate};
use crate::bv::BitVecValue;
use crate::fp::{fp_compare, fp_eval, FpLiteral, FpOp, RoundingMode};
use crate::value::Value;

/// Value of `ast` under `model`.
pub fn eval(ast: &Ast, model: &Model) -> Option<Value> {
    eval_inner(ast, model, &mut None)
}

pub fn eval_bool(ast: &Ast, model: &Model) -> Option<bool> {
    eval(ast, model)?.as_bool()
}

/// Evaluates `ast` and records the value of every defined node in `out`.
pub fn eval_all(ast: &Ast, model: &Model, out: &mut Model) -> Option<Value> {
    eval_inner(ast, model, &mut Some(out))
}

/// True when every assertion evaluates to true.
pub fn satisfies(assertions: &[Ast], model: &Model) -> bool {
    assertions.iter().all(|a| eval_bool(a, model) == Some(true))
}

fn eval_inner(ast: &Ast, model: &Model, out: &mut Option<&mut Model>) -> Option<Value> {
    let value = match ast.op() {
        Op::Var(_) => model.get(ast.label()).cloned(),
        Op::Const(v) => Some(v.clone()),
        _ => {
            let args: Vec<Option<Value>> = ast.children().iter().map(|c| eval_inner(c, model, out)).collect();
            combine(ast.op(), &args)
        }
    };
    if let (Some(out), Some(v)) = (out.as_deref_mut(), &value) {
        out.insert(ast.label().clone(), v.clone());
    }
    value
}

fn bools(args: &[Option<Value>]) -> impl Iterator<Item = Option<bool>> + '_ {
    args.iter().map(|a| a.as_ref().and_then(Value::as_bool))
}

/// Kleene conjunction: false wins over unknown.
fn kleene_and(values: impl Iterator<Item = Option<bool>>) -> Option<bool> {
    let mut unknown = false;
    for v in values {
        match v {
            Some(false) => return Some(false),
            None => unknown = true,
            Some(true) => {}
        }
    }
    if unknown {
        None
    } else {
        Some(true)
    }
}

fn kleene_or(values: impl Iterator<Item = Option<bool>>) -> Option<bool> {
    kleene_and(values.map(|v| v.map(|b| !b))).map(|b| !b)
}

pub(crate) fn combine(op: &Op, args: &[Option<Value>]) -> Option<Value> {
    match op {
        Op::Not => bools(args).next()?.map(|b| Value::Bool(!b)),
        Op::And => kleene_and(bools(args)).map(Value::Bool),
        Op::Or => kleene_or(bools(args)).map(Value::Bool),
        Op::Implies => {
            // right associative: a => (b => c)
            let values: Vec<Option<bool>> = bools(args).collect();
            let (last, premises) = values.split_last()?;
            let mut acc = *last;
            for premise in premises.iter().rev() {
                acc = kleene_or([premise.map(|b| !b), acc].into_iter());
            }
            acc.map(Value::Bool)
        }
        Op::Xor => {
            let mut acc = false;
            for b in bools(args) {
                acc ^= b?;
            }
            Some(Value::Bool(acc))
        }
        Op::Ite => match args[0].as_ref().and_then(Value::as_bool) {
            Some(true) => args[1].clone(),
            Some(false) => args[2].clone(),
            None => match (&args[1], &args[2]) {
                (Some(a), Some(b)) if a == b => Some(a.clone()),
                _ => None,
            },
        },
        _ => apply_by(op, args.len(), |i| args[i].as_ref()),
    }
}

/// Applies a theory symbol (or `=`/`distinct`) to fully known arguments.
/// Returns `None` for ill-sorted arguments and real division by zero.
pub fn apply(op: &Op, args: &[Value]) -> Option<Value> {
    match op {
        Op::Not | Op::And | Op::Or | Op::Implies | Op::Xor | Op::Ite => {
            let args: Vec<Option<Value>> = args.iter().cloned().map(Some).collect();
            combine(op, &args)
        }
        _ => apply_by(op, args.len(), |i| Some(&args[i])),
    }
}

/// Copies the `n` arguments read by `get` into a fixed buffer.
fn gather<T: Copy, const N: usize>(n: usize, mut get: impl FnMut(usize) -> Option<T>) -> Option<([T; N], usize)> {
    if n == 0 || n > N {
        return None;
    }
    let first = get(0)?;
    let mut buf = [first; N];
    for (i, slot) in buf.iter_mut().enumerate().take(n).skip(1) {
        *slot = get(i)?;
    }
    Some((buf, n))
}

/// [`apply`] over arguments read by index, without allocating.
fn apply_by<'a>(op: &Op, n: usize, get: impl Fn(usize) -> Option<&'a Value>) -> Option<Value> {
    match op {
        Op::Eq | Op::Distinct => {
            if n != 2 {
                return None;
            }
            let equal = get(0)?.smt_eq(get(1)?);
            Some(Value::Bool(equal == (*op == Op::Eq)))
        }
        Op::Fp(fp_op) => {
            let (rm, skip) = if fp_op.takes_rounding_mode() { (get(0)?.as_rm()?, 1) } else { (RoundingMode::Rne, 0) };
            if n < skip || n - skip != fp_op.fp_arity() {
                return None;
            }
            let (buf, len) = gather::<FpLiteral, 3>(n - skip, |i| get(i + skip)?.as_fp().copied())?;
            let literals = &buf[..len];
            if !matches!(fp_op, FpOp::Convert(_)) && literals.iter().any(|l| l.format() != literals[0].format()) {
                return None;
            }
            Some(Value::Fp(fp_eval(*fp_op, rm, literals)))
        }
        Op::FpPred(pred) => {
            if n != pred.arity() {
                return None;
            }
            let (buf, len) = gather::<FpLiteral, 2>(n, |i| get(i)?.as_fp().copied())?;
            let literals = &buf[..len];
            if literals.iter().any(|l| l.format() != literals[0].format()) {
                return None;
            }
            Some(Value::Bool(fp_compare(*pred, literals)))
        }
        Op::Bv(bv_op) => {
            if n != bv_op.arity() {
                return None;
            }
            let (buf, len) = gather::<BitVecValue, 2>(n, |i| get(i)?.as_bv())?;
            let values = &buf[..len];
            if values.iter().any(|v| v.width() != values[0].width()) {
                return None;
            }
            Some(Value::Bv(bv_op.apply(values)))
        }
        Op::BvPred(pred) => {
            let (a, b) = (get(0)?.as_bv()?, get(1)?.as_bv()?);
            if n != 2 || a.width() != b.width() {
                return None;
            }
            Some(Value::Bool(pred.apply(a, b)))
        }
        Op::Real(real_op) => {
            let a = get(0)?.as_real()?;
            if *real_op == RealOp::Neg {
                return Some(Value::Real(-a));
            }
            let b = get(1)?.as_real()?;
            Some(Value::Real(match real_op {
                RealOp::Add => a + b,
                RealOp::Sub => a - b,
                RealOp::Mul => a * b,
                RealOp::Div if b.is_zero() => return None,
                RealOp::Div => a / b,
                RealOp::Neg => unreachable!(),
            }))
        }
        Op::RealPred(pred) => {
            let (a, b) = (get(0)?.as_real()?, get(1)?.as_real()?);
            Some(Value::Bool(match pred {
                RealPredicate::Leq => a <= b,
                RealPredicate::Lt => a < b,
                RealPredicate::Geq => a >= b,
                RealPredicate::Gt => a > b,
            }))
        }
        Op::Var(_) | Op::Const(_) | Op::Not | Op::And | Op::Or | Op::Implies | Op::Xor | Op::Ite => None,
    }
}

/// A term flattened into postorder with variables resolved to slots, for
/// evaluating one term under many assignments.
#[derive(Debug, Clone)]
pub struct Compiled<'a> {
    steps: Vec<Step<'a>>,
}

#[derive(Debug, Clone)]
enum Step<'a> {
    Slot(usize),
    Const(&'a Value),
    Apply(&'a Op, usize),
    /// Value computed ahead of time, see [`Staged`].
    Cached(usize),
}

impl<'a> Compiled<'a> {
    /// Compiles `ast`; `slot` maps a variable label to its index in the
    /// assignment passed to [`Compiled::eval`].
    pub fn new(ast: &'a Ast, slot: &impl Fn(&crate::ast::Label) -> Option<usize>) -> Option<Self> {
        let mut steps = Vec::with_capacity(ast.node_count());
        fn walk<'a>(
            ast: &'a Ast,
            slot: &impl Fn(&crate::ast::Label) -> Option<usize>,
            out: &mut Vec<Step<'a>>,
        ) -> Option<()> {
            match ast.op() {
                Op::Var(_) => out.push(Step::Slot(slot(ast.label())?)),
                Op::Const(v) => out.push(Step::Const(v)),
                op => {
                    for c in ast.children() {
                        walk(c, slot, out)?;
                    }
                    out.push(Step::Apply(op, ast.children().len()));
                }
            }
            Some(())
        }
        walk(ast, slot, &mut steps)?;
        Some(Compiled { steps })
    }

    /// Value under `assignment`, using `stack` as scratch space.
    pub fn eval(&self, assignment: &[Option<Value>], stack: &mut Vec<Option<Value>>) -> Option<Value> {
        self.eval_cached(assignment, &[], stack)
    }

    fn eval_cached(
        &self,
        assignment: &[Option<Value>],
        cache: &[Option<Value>],
        stack: &mut Vec<Option<Value>>,
    ) -> Option<Value> {
        stack.clear();
        for step in &self.steps {
            match step {
                Step::Slot(i) => stack.push(assignment[*i].clone()),
                Step::Const(v) => stack.push(Some((*v).clone())),
                Step::Cached(k) => stack.push(cache[*k].clone()),
                Step::Apply(op, n) => {
                    let base = stack.len() - n;
                    let value = combine(op, &stack[base..]);
                    stack.truncate(base);
                    stack.push(value);
                }
            }
        }
        stack.pop().flatten()
    }
}

/// Highest slot `ast` reads; `Some(None)` for closed terms, `None` if a
/// variable has no slot.
fn top_slot(ast: &Ast, slot: &impl Fn(&crate::ast::Label) -> Option<usize>) -> Option<Option<usize>> {
    match ast.op() {
        Op::Var(_) => Some(Some(slot(ast.label())?)),
        Op::Const(_) => Some(None),
        _ => {
            let mut top = None;
            for c in ast.children() {
                top = top.max(top_slot(c, slot)?);
            }
            Some(top)
        }
    }
}

/// A term evaluated under many assignments that agree below slot `level`:
/// the largest subterms that do not read `level` or later are computed once
/// per prefix by [`Staged::prepare`].
#[derive(Debug, Clone)]
pub struct Staged<'a> {
    hoisted: Vec<Compiled<'a>>,
    cache: Vec<Option<Value>>,
    body: Compiled<'a>,
    level: usize,
}

impl<'a> Staged<'a> {
    pub fn new(ast: &'a Ast, slot: &impl Fn(&crate::ast::Label) -> Option<usize>, level: usize) -> Option<Self> {
        fn walk<'a>(
            ast: &'a Ast,
            slot: &impl Fn(&crate::ast::Label) -> Option<usize>,
            level: usize,
            hoisted: &mut Vec<Compiled<'a>>,
            out: &mut Vec<Step<'a>>,
        ) -> Option<()> {
            match ast.op() {
                Op::Var(_) => out.push(Step::Slot(slot(ast.label())?)),
                Op::Const(v) => out.push(Step::Const(v)),
                op => {
                    if top_slot(ast, slot)?.is_none_or(|top| top < level) {
                        out.push(Step::Cached(hoisted.len()));
                        hoisted.push(Compiled::new(ast, slot)?);
                        return Some(());
                    }
                    for c in ast.children() {
                        walk(c, slot, level, hoisted, out)?;
                    }
                    out.push(Step::Apply(op, ast.children().len()));
                }
            }
            Some(())
        }
        let mut hoisted = Vec::new();
        let mut steps = Vec::new();
        walk(ast, slot, level, &mut hoisted, &mut steps)?;
        let cache = vec![None; hoisted.len()];
        Some(Staged { hoisted, cache, body: Compiled { steps }, level })
    }

    /// Computes the hoisted subterms under the current prefix of `assignment`.
    pub fn prepare(&mut self, assignment: &[Option<Value>], stack: &mut Vec<Option<Value>>) {
        for (slot, term) in self.cache.iter_mut().zip(&self.hoisted) {
            *slot = term.eval(assignment, stack);
        }
    }

    /// Value under `assignment`, which must agree with the one last passed to
    /// [`Staged::prepare`] below `level`.
    pub fn eval(&self, assignment: &[Option<Value>], stack: &mut Vec<Option<Value>>) -> Option<Value> {
        self.body.eval_cached(assignment, &self.cache, stack)
    }

    /// For `(= v t)` or `(= t v)` with `v` the variable at `level` and `t`
    /// not reading it: the prepared value of `t`, the only value of `v` that
    /// can make the term true.
    pub fn forced(&self, assignment: &[Option<Value>]) -> Option<Option<Value>> {
        let [a, b, Step::Apply(Op::Eq, 2)] = self.body.steps.as_slice() else { return None };
        let other = match (a, b) {
            (Step::Slot(i), other) | (other, Step::Slot(i)) if *i == self.level => other,
            _ => return None,
        };
        Some(match other {
            Step::Slot(j) if *j < self.level => assignment[*j].clone(),
            Step::Const(v) => Some((*v).clone()),
            Step::Cached(k) => self.cache[*k].clone(),
            _ => return None,
        })
    }
}
