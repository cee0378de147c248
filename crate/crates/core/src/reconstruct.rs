//! Model reconstruction: turning a decoded model into a candidate model of
//! the original formula under its full semantics.
//!
//! The decoded model binds every node label of the original formula, with
//! the values the approximate model gave the corresponding encoded nodes.
//! Atom truth values are read from it directly, so an atom that held only
//! because of rounding in the approximation still counts as true.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::{Ast, Formula, Label, Model, Op};
use crate::eval::{combine, satisfies};
use crate::value::Value;

/// A Boolean-skeleton leaf together with its truth value in the decoded model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriticalAtom<'a> {
    pub atom: &'a Ast,
    pub polarity: bool,
    /// Whether the skeleton's decoded truth depends on this atom's value.
    pub binding: bool,
}

/// Collects the atoms of every assertion's Boolean skeleton. Boolean
/// literals are skipped, as are atoms the decoded model leaves undefined.
pub fn extract_critical_atoms<'a>(assertions: &'a [Ast], decoded: &Model) -> Vec<CriticalAtom<'a>> {
    let mut atoms = Vec::new();
    for a in assertions {
        let required = decoded.get(a.label()).and_then(Value::as_bool);
        collect(a, decoded, required.is_some(), &mut atoms);
    }
    atoms
}

fn truth(ast: &Ast, decoded: &Model) -> Option<bool> {
    decoded.get(ast.label()).and_then(Value::as_bool)
}

fn collect<'a>(ast: &'a Ast, decoded: &Model, binding: bool, out: &mut Vec<CriticalAtom<'a>>) {
    let value = truth(ast, decoded);
    let children = ast.children();
    match ast.op() {
        Op::Const(_) => {}
        Op::Not => collect(&children[0], decoded, binding, out),
        // a satisfied disjunction only needs its true disjuncts, a falsified
        // conjunction only its false conjuncts
        Op::And | Op::Or => {
            let absorbing = matches!(ast.op(), Op::Or);
            for c in children {
                let needed = binding && (value != Some(absorbing) || truth(c, decoded) == Some(absorbing));
                collect(c, decoded, needed, out);
            }
        }
        Op::Implies => {
            let last = children.len() - 1;
            for (i, c) in children.iter().enumerate() {
                // the implication is the disjunction of the negated premises and the conclusion
                let makes_true = if i == last { Some(true) } else { Some(false) };
                let needed = binding && (value != Some(true) || truth(c, decoded) == makes_true);
                collect(c, decoded, needed, out);
            }
        }
        Op::Xor => {
            for c in children {
                collect(c, decoded, binding, out);
            }
        }
        Op::Ite if ast.sort() == crate::sort::Sort::Bool => {
            let taken = truth(&children[0], decoded);
            collect(&children[0], decoded, binding, out);
            collect(&children[1], decoded, binding && taken == Some(true), out);
            collect(&children[2], decoded, binding && taken == Some(false), out);
        }
        _ => {
            if let Some(polarity) = value {
                out.push(CriticalAtom { atom: ast, polarity, binding });
            }
        }
    }
}

/// A true `x = t` atom with a variable side. For `x = y` the variable on
/// the left is the defined one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinitionalEquality {
    pub defined: Label,
    pub depends_on: BTreeSet<Label>,
    /// Both sides are variables.
    pub var_var: bool,
}

/// Recognizes a binding, true `=` atom with a variable on at least one side.
pub fn definitional(atom: &CriticalAtom) -> Option<DefinitionalEquality> {
    if !atom.binding || !atom.polarity || *atom.atom.op() != Op::Eq {
        return None;
    }
    let [lhs, rhs] = atom.atom.children() else { return None };
    match (lhs.is_var(), rhs.is_var()) {
        (true, true) => Some(DefinitionalEquality {
            defined: lhs.label().clone(),
            depends_on: BTreeSet::from([rhs.label().clone()]),
            var_var: true,
        }),
        (true, false) => {
            Some(DefinitionalEquality { defined: lhs.label().clone(), depends_on: rhs.variables(), var_var: false })
        }
        (false, true) => {
            Some(DefinitionalEquality { defined: rhs.label().clone(), depends_on: lhs.variables(), var_var: false })
        }
        (false, false) => None,
    }
}

/// Topological order of the variables in the definitional graph. `x = f(..)`
/// adds an edge from each variable of `f(..)` to `x`; `x = y` adds both
/// directions. Kahn's algorithm always takes a variable of lowest remaining
/// in-degree, ties by label, which also breaks cycles.
fn variable_order(defs: &[DefinitionalEquality]) -> BTreeMap<Label, usize> {
    let mut edges: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
    let mut add_edge = |from: &Label, to: &Label| {
        edges.entry(to.clone()).or_default();
        if from != to {
            edges.entry(from.clone()).or_default().insert(to.clone());
        } else {
            edges.entry(from.clone()).or_default();
        }
    };
    for d in defs {
        for dep in &d.depends_on {
            add_edge(dep, &d.defined);
            if d.var_var {
                add_edge(&d.defined, dep);
            }
        }
        if d.depends_on.is_empty() {
            add_edge(&d.defined, &d.defined);
        }
    }
    let mut in_degree: BTreeMap<Label, usize> = edges.keys().map(|l| (l.clone(), 0)).collect();
    for targets in edges.values() {
        for t in targets {
            *in_degree.get_mut(t).unwrap() += 1;
        }
    }
    let mut order = BTreeMap::new();
    while !in_degree.is_empty() {
        let next = in_degree.iter().min_by(|a, b| a.1.cmp(b.1).then_with(|| a.0.cmp(b.0))).unwrap().0.clone();
        in_degree.remove(&next);
        for t in &edges[&next] {
            if let Some(d) = in_degree.get_mut(t) {
                *d -= 1;
            }
        }
        order.insert(next, order.len());
    }
    order
}

/// Puts the definitional equalities first, sorted by the topological position
/// of the variable they define (the later of the two for `x = y`, with
/// `x = y` after other equalities at the same position), then the remaining
/// atoms in input order.
pub fn order_definitional<'a>(atoms: &[CriticalAtom<'a>]) -> Vec<CriticalAtom<'a>> {
    let defs: Vec<(usize, DefinitionalEquality)> =
        atoms.iter().enumerate().filter_map(|(i, a)| definitional(a).map(|d| (i, d))).collect();
    let order = variable_order(&defs.iter().map(|(_, d)| d.clone()).collect::<Vec<_>>());
    let mut keyed: Vec<((usize, bool, usize), usize)> = defs
        .iter()
        .map(|(i, d)| {
            let mut position = order[&d.defined];
            if d.var_var {
                position = position.max(order[d.depends_on.first().unwrap()]);
            }
            ((position, d.var_var, *i), *i)
        })
        .collect();
    keyed.sort();
    let definitional: BTreeSet<usize> = defs.iter().map(|(i, _)| *i).collect();
    let mut out: Vec<CriticalAtom<'a>> = keyed.into_iter().map(|(_, i)| atoms[i]).collect();
    out.extend(atoms.iter().enumerate().filter(|(i, _)| !definitional.contains(i)).map(|(_, a)| *a));
    out
}

/// Equality-as-assignment: if `atom` is an `=` that is true in the decoded
/// model, one side is a variable unassigned in `candidate`, and the other
/// side's value is defined in `candidate`, binds the variable to that value.
/// When both sides are unassigned variables, the left one takes the decoded
/// value of the right one.
pub fn equality_as_assignment(atom: &Ast, decoded: &Model, candidate: &mut Model) -> bool {
    if *atom.op() != Op::Eq || truth(atom, decoded) != Some(true) {
        return false;
    }
    let [lhs, rhs] = atom.children() else { return false };
    let unassigned = |side: &Ast, candidate: &Model| side.is_var() && !candidate.contains(side.label());
    if unassigned(lhs, candidate) {
        if let Some(v) = crate::eval::eval(rhs, candidate) {
            candidate.insert(lhs.label().clone(), v);
            return true;
        }
    }
    if unassigned(rhs, candidate) {
        if let Some(v) = crate::eval::eval(lhs, candidate) {
            candidate.insert(rhs.label().clone(), v);
            return true;
        }
    }
    if unassigned(lhs, candidate) && rhs.is_var() {
        if let Some(v) = fetch(rhs.label(), decoded, candidate) {
            candidate.insert(lhs.label().clone(), v);
            return true;
        }
    }
    false
}

/// Current value of a variable, copied from the decoded model on first use.
fn fetch(label: &Label, decoded: &Model, candidate: &mut Model) -> Option<Value> {
    if let Some(v) = candidate.get(label) {
        return Some(v.clone());
    }
    let v = decoded.get(label)?.clone();
    candidate.insert(label.clone(), v.clone());
    Some(v)
}

/// Bottom-up evaluation under full semantics, fetching variables lazily.
fn evaluate(ast: &Ast, decoded: &Model, candidate: &mut Model) -> Option<Value> {
    match ast.op() {
        Op::Var(_) => fetch(ast.label(), decoded, candidate),
        Op::Const(v) => Some(v.clone()),
        op => {
            let args: Vec<Option<Value>> = ast.children().iter().map(|c| evaluate(c, decoded, candidate)).collect();
            combine(op, &args)
        }
    }
}

/// Reconstructs one atom: its non-variable children are evaluated first,
/// then equality-as-assignment is tried at the root, and otherwise the atom
/// is evaluated with all its variables fetched.
fn reconstruct_atom(atom: &Ast, assign: bool, decoded: &Model, candidate: &mut Model) {
    for child in atom.children() {
        if !child.is_var() {
            evaluate(child, decoded, candidate);
        }
    }
    if assign && equality_as_assignment(atom, decoded, candidate) {
        return;
    }
    evaluate(atom, decoded, candidate);
}

/// Whether equality-as-assignment would fire on `atom` using candidate
/// values only.
fn ready(atom: &Ast, candidate: &Model) -> bool {
    let [lhs, rhs] = atom.children() else { return false };
    let open = |side: &Ast| side.is_var() && !candidate.contains(side.label());
    let known = |side: &Ast| side.variables().iter().all(|v| candidate.contains(v));
    (open(lhs) && known(rhs)) || (open(rhs) && known(lhs))
}

/// Builds a candidate model for `formula` from `decoded`.
///
/// If the decoded variable values already satisfy the formula they are
/// returned unchanged. Otherwise the critical atoms are processed in order:
/// definitional equalities, other binding equalities, other binding atoms,
/// and finally the non-binding atoms. Among the definitional equalities, the
/// first one (in topological order) whose other side is fully known fires
/// next; when none is, the first remaining one is processed. A variable is
/// never rebound once assigned. Untouched variables keep their decoded values.
pub fn reconstruct(formula: &Formula, decoded: &Model) -> Model {
    let decoded_vars = decoded.restricted_to_variables(formula);
    if satisfies(formula.assertions(), &decoded_vars) {
        return decoded_vars;
    }
    let atoms = extract_critical_atoms(formula.assertions(), decoded);
    let ordered = order_definitional(&atoms);
    let n_definitional = ordered.iter().take_while(|a| definitional(a).is_some()).count();
    let (defs, rest) = ordered.split_at(n_definitional);

    let mut candidate = Model::new();
    let mut pending: Vec<&CriticalAtom> = defs.iter().collect();
    while !pending.is_empty() {
        let next = pending.iter().position(|a| ready(a.atom, &candidate)).unwrap_or(0);
        let atom = pending.remove(next);
        reconstruct_atom(atom.atom, true, decoded, &mut candidate);
    }

    let is_eq = |a: &&CriticalAtom| matches!(a.atom.op(), Op::Eq | Op::FpPred(crate::fp::FpPredicate::Eq));
    let binding: Vec<&CriticalAtom> = rest.iter().filter(|a| a.binding).collect();
    let (equalities, others): (Vec<&CriticalAtom>, Vec<&CriticalAtom>) = binding.into_iter().partition(is_eq);
    for atom in equalities.into_iter().chain(others) {
        reconstruct_atom(atom.atom, false, decoded, &mut candidate);
    }
    for atom in rest.iter().filter(|a| !a.binding) {
        reconstruct_atom(atom.atom, false, decoded, &mut candidate);
    }

    let mut out = Model::new();
    for d in formula.declarations() {
        if let Some(v) = candidate.get(&d.label).or_else(|| decoded.get(&d.label)) {
            out.insert(d.label.clone(), v.clone());
        }
    }
    out
}
