//! Labeled abstract syntax trees.
//!
//! Every node of a parsed formula carries a [`Label`] holding its preorder
//! path, so that encoded formulas, models and precision maps can refer back
//! to the node they came from.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;

use crate::bv::{BitVecValue, BvOp, BvPredicate};
use crate::error::SortError;
use crate::fp::{FpLiteral, FpOp, FpPredicate, RoundingMode};
use crate::sort::{Sort, MAX_BITVEC_WIDTH};
use crate::value::Value;

/// Stable identifier of a node.
///
/// `path` is the preorder position in the original formula: assertion `i`
/// is `[i]`, and child `j` of a node appends `j`. Nodes that an encoding
/// inserts (casts, helper terms) reuse a path with a nonzero `derived` tag.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    path: Arc<[u32]>,
    derived: u32,
}

impl Label {
    pub fn new(path: impl Into<Arc<[u32]>>) -> Label {
        Label { path: path.into(), derived: 0 }
    }

    pub fn child(&self, index: u32) -> Label {
        let mut path = self.path.to_vec();
        path.push(index);
        Label::new(path)
    }

    /// A synthetic label for the `tag`-th node inserted at this position.
    pub fn derived(&self, tag: u32) -> Label {
        assert!(tag > 0, "derived tag 0 is reserved for original nodes");
        Label { path: self.path.clone(), derived: tag }
    }

    pub fn path(&self) -> &[u32] {
        &self.path
    }

    pub fn derived_tag(&self) -> u32 {
        self.derived
    }

    pub fn is_synthetic(&self) -> bool {
        self.derived != 0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("@")?;
        for (i, step) in self.path.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{step}")?;
        }
        if self.derived != 0 {
            write!(f, "~{}", self.derived)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RealOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

impl RealOp {
    pub fn smtlib_name(self) -> &'static str {
        match self {
            RealOp::Add => "+",
            RealOp::Sub | RealOp::Neg => "-",
            RealOp::Mul => "*",
            RealOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RealPredicate {
    Leq,
    Lt,
    Geq,
    Gt,
}

impl RealPredicate {
    pub fn smtlib_name(self) -> &'static str {
        match self {
            RealPredicate::Leq => "<=",
            RealPredicate::Lt => "<",
            RealPredicate::Geq => ">=",
            RealPredicate::Gt => ">",
        }
    }
}

/// The symbol at a node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Op {
    Var(Arc<str>),
    Const(Value),
    Not,
    And,
    Or,
    Implies,
    Xor,
    Ite,
    Eq,
    Distinct,
    /// Rounded operations take the rounding mode as their first child.
    Fp(FpOp),
    FpPred(FpPredicate),
    Bv(BvOp),
    BvPred(BvPredicate),
    Real(RealOp),
    RealPred(RealPredicate),
}

/// Coarse classification of symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Variable,
    FpOperation,
    FpPredicate,
    BvOperation,
    BvPredicate,
    RealOperation,
    RealPredicate,
    BooleanConnective,
    Equality,
    RoundingModeLiteral,
    BoolLiteral,
    FpLiteral,
    BvLiteral,
    RealLiteral,
}

impl Op {
    pub fn kind(&self) -> SymbolKind {
        match self {
            Op::Var(_) => SymbolKind::Variable,
            Op::Const(Value::Bool(_)) => SymbolKind::BoolLiteral,
            Op::Const(Value::Rm(_)) => SymbolKind::RoundingModeLiteral,
            Op::Const(Value::Fp(_)) => SymbolKind::FpLiteral,
            Op::Const(Value::Bv(_)) => SymbolKind::BvLiteral,
            Op::Const(Value::Real(_)) => SymbolKind::RealLiteral,
            Op::Not | Op::And | Op::Or | Op::Implies | Op::Xor | Op::Ite => SymbolKind::BooleanConnective,
            Op::Eq | Op::Distinct => SymbolKind::Equality,
            Op::Fp(_) => SymbolKind::FpOperation,
            Op::FpPred(_) => SymbolKind::FpPredicate,
            Op::Bv(_) => SymbolKind::BvOperation,
            Op::BvPred(_) => SymbolKind::BvPredicate,
            Op::Real(_) => SymbolKind::RealOperation,
            Op::RealPred(_) => SymbolKind::RealPredicate,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Op::Const(_))
    }

    pub fn name(&self) -> String {
        match self {
            Op::Var(name) => name.to_string(),
            Op::Const(v) => v.to_string(),
            Op::Not => "not".into(),
            Op::And => "and".into(),
            Op::Or => "or".into(),
            Op::Implies => "=>".into(),
            Op::Xor => "xor".into(),
            Op::Ite => "ite".into(),
            Op::Eq => "=".into(),
            Op::Distinct => "distinct".into(),
            Op::Fp(op) => op.smtlib_name(),
            Op::FpPred(p) => p.smtlib_name().into(),
            Op::Bv(op) => op.smtlib_name(),
            Op::BvPred(p) => p.smtlib_name().into(),
            Op::Real(op) => op.smtlib_name().into(),
            Op::RealPred(p) => p.smtlib_name().into(),
        }
    }
}

fn arity_error(op: &Op, expected: &str, found: usize) -> SortError {
    SortError::Arity { op: op.name(), expected: expected.into(), found }
}

fn mismatch(op: &Op, sorts: &[Sort]) -> SortError {
    let found = sorts.iter().map(Sort::to_string).collect::<Vec<_>>().join(", ");
    SortError::Mismatch { op: op.name(), found }
}

/// Result sort of `op` applied to arguments of the given sorts.
pub fn result_sort(op: &Op, args: &[Sort]) -> Result<Sort, SortError> {
    let exact = |n: usize| if args.len() == n { Ok(()) } else { Err(arity_error(op, &n.to_string(), args.len())) };
    let all_equal = |sorts: &[Sort]| sorts.windows(2).all(|w| w[0] == w[1]);
    match op {
        Op::Var(_) => Err(arity_error(op, "a declared sort for", args.len())),
        Op::Const(v) => {
            exact(0)?;
            Ok(v.sort())
        }
        Op::Not => {
            exact(1)?;
            if args[0] != Sort::Bool {
                return Err(mismatch(op, args));
            }
            Ok(Sort::Bool)
        }
        Op::And | Op::Or | Op::Implies | Op::Xor => {
            let min = if matches!(op, Op::And | Op::Or) { 1 } else { 2 };
            if args.len() < min {
                return Err(arity_error(op, &format!("at least {min}"), args.len()));
            }
            if args.iter().any(|s| *s != Sort::Bool) {
                return Err(mismatch(op, args));
            }
            Ok(Sort::Bool)
        }
        Op::Ite => {
            exact(3)?;
            if args[0] != Sort::Bool || args[1] != args[2] {
                return Err(mismatch(op, args));
            }
            Ok(args[1])
        }
        Op::Eq | Op::Distinct => {
            exact(2)?;
            if args[0] != args[1] {
                return Err(mismatch(op, args));
            }
            Ok(Sort::Bool)
        }
        Op::Fp(fp_op) => {
            let rm = usize::from(fp_op.takes_rounding_mode());
            exact(rm + fp_op.fp_arity())?;
            if rm == 1 && args[0] != Sort::RoundingMode {
                return Err(mismatch(op, args));
            }
            let operands = &args[rm..];
            if !operands.iter().all(|s| s.is_float()) {
                return Err(mismatch(op, args));
            }
            match fp_op {
                FpOp::Convert(target) => Ok(Sort::Float(*target)),
                _ if all_equal(operands) => Ok(operands[0]),
                _ => Err(mismatch(op, args)),
            }
        }
        Op::FpPred(pred) => {
            exact(pred.arity())?;
            if !args.iter().all(|s| s.is_float()) || !all_equal(args) {
                return Err(mismatch(op, args));
            }
            Ok(Sort::Bool)
        }
        Op::Bv(bv_op) => {
            exact(bv_op.arity())?;
            let Sort::BitVec(width) = args[0] else {
                return Err(mismatch(op, args));
            };
            if !all_equal(args) {
                return Err(mismatch(op, args));
            }
            match *bv_op {
                BvOp::SignExtend(extra) => {
                    if width + extra > MAX_BITVEC_WIDTH {
                        return Err(SortError::InvalidBitVecWidth(width + extra));
                    }
                    Ok(Sort::BitVec(width + extra))
                }
                BvOp::Extract(high, low) => {
                    if low > high || high >= width {
                        return Err(mismatch(op, args));
                    }
                    Ok(Sort::BitVec(high - low + 1))
                }
                _ => Ok(Sort::BitVec(width)),
            }
        }
        Op::BvPred(_) => {
            exact(2)?;
            if !matches!(args[0], Sort::BitVec(_)) || !all_equal(args) {
                return Err(mismatch(op, args));
            }
            Ok(Sort::Bool)
        }
        Op::Real(real_op) => {
            exact(if *real_op == RealOp::Neg { 1 } else { 2 })?;
            if args.iter().any(|s| *s != Sort::Real) {
                return Err(mismatch(op, args));
            }
            Ok(Sort::Real)
        }
        Op::RealPred(_) => {
            exact(2)?;
            if args.iter().any(|s| *s != Sort::Real) {
                return Err(mismatch(op, args));
            }
            Ok(Sort::Bool)
        }
    }
}

/// A well-sorted, labeled term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ast {
    op: Op,
    sort: Sort,
    label: Label,
    children: Vec<Ast>,
}

impl Ast {
    /// Applies `op` to `children`, checking sorts.
    pub fn apply(op: Op, label: Label, children: Vec<Ast>) -> Result<Ast, SortError> {
        let sorts: Vec<Sort> = children.iter().map(|c| c.sort).collect();
        let sort = result_sort(&op, &sorts)?;
        Ok(Ast { op, sort, label, children })
    }

    pub fn var(name: impl Into<Arc<str>>, sort: Sort, label: Label) -> Ast {
        Ast { op: Op::Var(name.into()), sort, label, children: Vec::new() }
    }

    pub fn constant(value: Value, label: Label) -> Ast {
        Ast { sort: value.sort(), op: Op::Const(value), label, children: Vec::new() }
    }

    pub fn bool(b: bool, label: Label) -> Ast {
        Ast::constant(Value::Bool(b), label)
    }

    pub fn rm(rm: RoundingMode, label: Label) -> Ast {
        Ast::constant(Value::Rm(rm), label)
    }

    pub fn fp(v: FpLiteral, label: Label) -> Ast {
        Ast::constant(Value::Fp(v), label)
    }

    pub fn bv(v: BitVecValue, label: Label) -> Ast {
        Ast::constant(Value::Bv(v), label)
    }

    pub fn real(q: BigRational, label: Label) -> Ast {
        Ast::constant(Value::Real(q), label)
    }

    pub fn op(&self) -> &Op {
        &self.op
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn children(&self) -> &[Ast] {
        &self.children
    }

    pub fn kind(&self) -> SymbolKind {
        self.op.kind()
    }

    pub fn var_name(&self) -> Option<&str> {
        match &self.op {
            Op::Var(name) => Some(name),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self.op, Op::Var(_))
    }

    pub fn literal(&self) -> Option<&Value> {
        match &self.op {
            Op::Const(v) => Some(v),
            _ => None,
        }
    }

    pub fn with_label(mut self, label: Label) -> Ast {
        self.label = label;
        self
    }

    /// Visits every node in preorder.
    pub fn for_each<'a>(&'a self, f: &mut impl FnMut(&'a Ast)) {
        f(self);
        for child in &self.children {
            child.for_each(f);
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Ast::node_count).sum::<usize>()
    }

    /// Labels of the variables occurring in this term.
    pub fn variables(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.for_each(&mut |n| {
            if n.is_var() {
                out.insert(n.label.clone());
            }
        });
        out
    }

    /// Structural equality ignoring labels.
    pub fn shape_eq(&self, other: &Ast) -> bool {
        self.op == other.op
            && self.sort == other.sort
            && self.children.len() == other.children.len()
            && self.children.iter().zip(&other.children).all(|(a, b)| a.shape_eq(b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Declaration {
    pub name: Arc<str>,
    pub sort: Sort,
    pub label: Label,
}

/// Declared variables plus asserted Boolean terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Formula {
    declarations: Vec<Declaration>,
    assertions: Vec<Ast>,
}

impl Formula {
    /// Builds a formula and assigns fresh preorder labels. Each variable takes
    /// the label of its first occurrence; a declared variable that never occurs
    /// gets `[n + k]` for `n` assertions.
    ///
    /// Panics if an assertion is not Boolean or mentions an undeclared variable.
    pub fn new(declarations: Vec<(Arc<str>, Sort)>, assertions: Vec<Ast>) -> Formula {
        let sorts: HashMap<Arc<str>, Sort> = declarations.iter().cloned().collect();
        let mut var_labels: HashMap<Arc<str>, Label> = HashMap::new();
        let assertions: Vec<Ast> = assertions
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                assert_eq!(a.sort, Sort::Bool, "assertion {i} is not Boolean");
                relabel(a, Label::new(vec![i as u32]), &mut var_labels, &sorts)
            })
            .collect();
        let mut unused = assertions.len() as u32;
        let declarations = declarations
            .into_iter()
            .map(|(name, sort)| {
                let label = var_labels.get(&name).cloned().unwrap_or_else(|| {
                    unused += 1;
                    Label::new(vec![unused - 1])
                });
                Declaration { name, sort, label }
            })
            .collect();
        Formula { declarations, assertions }
    }

    /// Assembles a formula whose labels are already assigned, as produced by an
    /// encoding.
    pub fn from_labeled(declarations: Vec<Declaration>, assertions: Vec<Ast>) -> Formula {
        Formula { declarations, assertions }
    }

    pub fn declarations(&self) -> &[Declaration] {
        &self.declarations
    }

    pub fn assertions(&self) -> &[Ast] {
        &self.assertions
    }

    pub fn declaration(&self, name: &str) -> Option<&Declaration> {
        self.declarations.iter().find(|d| &*d.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.assertions.is_empty()
    }

    /// Labels of every node, declared variables included.
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out: BTreeSet<Label> = self.declarations.iter().map(|d| d.label.clone()).collect();
        for a in &self.assertions {
            a.for_each(&mut |n| {
                out.insert(n.label.clone());
            });
        }
        out
    }

    /// Label of every node together with one node carrying it.
    pub fn nodes(&self) -> BTreeMap<Label, &Ast> {
        let mut out = BTreeMap::new();
        for a in &self.assertions {
            a.for_each(&mut |n| {
                out.entry(n.label.clone()).or_insert(n);
            });
        }
        out
    }

    /// Structural equality ignoring labels.
    pub fn shape_eq(&self, other: &Formula) -> bool {
        self.declarations.len() == other.declarations.len()
            && self.declarations.iter().zip(&other.declarations).all(|(a, b)| a.name == b.name && a.sort == b.sort)
            && self.assertions.len() == other.assertions.len()
            && self.assertions.iter().zip(&other.assertions).all(|(a, b)| a.shape_eq(b))
    }
}

fn relabel(
    ast: Ast,
    label: Label,
    var_labels: &mut HashMap<Arc<str>, Label>,
    sorts: &HashMap<Arc<str>, Sort>,
) -> Ast {
    if let Op::Var(name) = &ast.op {
        let declared = sorts.get(name).unwrap_or_else(|| panic!("variable `{name}` is not declared"));
        assert_eq!(*declared, ast.sort, "variable `{name}` used at the wrong sort");
        let label = var_labels.entry(name.clone()).or_insert(label).clone();
        return ast.with_label(label);
    }
    let children = ast
        .children
        .into_iter()
        .enumerate()
        .map(|(i, c)| relabel(c, label.child(i as u32), var_labels, sorts))
        .collect();
    Ast { op: ast.op, sort: ast.sort, label, children }
}

/// A partial assignment from labels to values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    values: BTreeMap<Label, Value>,
}

impl Model {
    pub fn new() -> Model {
        Model::default()
    }

    pub fn get(&self, label: &Label) -> Option<&Value> {
        self.values.get(label)
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.values.contains_key(label)
    }

    pub fn insert(&mut self, label: Label, value: Value) -> Option<Value> {
        self.values.insert(label, value)
    }

    pub fn remove(&mut self, label: &Label) -> Option<Value> {
        self.values.remove(label)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Value)> {
        self.values.iter()
    }

    /// Keeps only the bindings of the declared variables of `formula`.
    pub fn restricted_to_variables(&self, formula: &Formula) -> Model {
        let mut out = Model::new();
        for d in formula.declarations() {
            if let Some(v) = self.get(&d.label) {
                out.insert(d.label.clone(), v.clone());
            }
        }
        out
    }

    /// Value of the variable called `name` in `formula`.
    pub fn value_of<'a>(&'a self, formula: &Formula, name: &str) -> Option<&'a Value> {
        self.get(&formula.declaration(name)?.label)
    }
}

impl FromIterator<(Label, Value)> for Model {
    fn from_iter<T: IntoIterator<Item = (Label, Value)>>(iter: T) -> Self {
        Model { values: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a Model {
    type Item = (&'a Label, &'a Value);
    type IntoIter = std::collections::btree_map::Iter<'a, Label, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.values.iter()
    }
}
