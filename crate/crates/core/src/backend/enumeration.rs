use std::time::{Duration, Instant};

use super::{Backend, BackendVerdict, UnknownReason};
use crate::ast::{Ast, Formula, Label, Model, Op};
use crate::bv::BitVecValue;
use crate::eval::{eval_bool, Staged};
use crate::fp::{enumerate_sort, RoundingMode};
use crate::sort::Sort;
use crate::value::Value;

/// Default cap on the number of assignments the enumerator may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 20;

/// Exhaustive search over every assignment to the declared variables, in
/// declaration order with each domain in increasing bit order. Floats range
/// over canonical values only (one NaN).
#[derive(Debug, Clone)]
pub struct Enumeration {
    budget: u64,
}

impl Default for Enumeration {
    fn default() -> Self {
        Enumeration { budget: DEFAULT_ENUMERATION_BUDGET }
    }
}

fn domain(sort: Sort, budget: u64) -> Result<Vec<Value>, UnknownReason> {
    Ok(match sort {
        Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Sort::RoundingMode => RoundingMode::ALL.into_iter().map(Value::Rm).collect(),
        Sort::Float(f) => enumerate_sort(f, budget)
            .map_err(|_| UnknownReason::SortTooLarge)?
            .filter(|v| v.is_canonical())
            .map(Value::Fp)
            .collect(),
        Sort::BitVec(w) => {
            if w >= 64 || (1u64 << w) > budget {
                return Err(UnknownReason::SortTooLarge);
            }
            (0..1u128 << w).map(|bits| Value::Bv(BitVecValue::new(w, bits))).collect()
        }
        Sort::Real => return Err(UnknownReason::Unsupported("real variables cannot be enumerated".into())),
    })
}

/// Splits nested conjunctions so each conjunct is checked as early as its
/// variables allow.
fn flatten_and<'a>(ast: &'a Ast, out: &mut Vec<&'a Ast>) {
    if matches!(ast.op(), Op::And) {
        ast.children().iter().for_each(|c| flatten_and(c, out));
    } else {
        out.push(ast);
    }
}

struct Search<'a> {
    domains: Vec<Vec<Value>>,
    /// Assertions that become decidable once variable `i` is bound.
    checks: Vec<Vec<Staged<'a>>>,
    deadline: Option<Instant>,
    steps: u64,
    assignment: Vec<Option<Value>>,
    stack: Vec<Option<Value>>,
}

enum Outcome {
    Found,
    Exhausted,
    TimedOut,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) -> Outcome {
        if depth == self.domains.len() {
            return Outcome::Found;
        }
        for check in &mut self.checks[depth] {
            check.prepare(&self.assignment, &mut self.stack);
        }
        // an equality pinning this variable leaves one candidate at most
        let forced = self.checks[depth].iter().find_map(|c| c.forced(&self.assignment));
        for i in 0..self.domains[depth].len() {
            if let Some(forced) = &forced {
                if !forced.as_ref().is_some_and(|v| v.smt_eq(&self.domains[depth][i])) {
                    continue;
                }
            }
            self.steps += 1;
            if self.steps.is_multiple_of(4096) && self.deadline.is_some_and(|d| Instant::now() >= d) {
                return Outcome::TimedOut;
            }
            self.assignment[depth] = Some(self.domains[depth][i].clone());
            let stack = &mut self.stack;
            let assignment = &self.assignment;
            if self.checks[depth].iter().all(|a| a.eval(assignment, stack) == Some(Value::Bool(true))) {
                match self.run(depth + 1) {
                    Outcome::Exhausted => {}
                    done => return done,
                }
            }
        }
        self.assignment[depth] = None;
        Outcome::Exhausted
    }
}

impl Enumeration {
    pub fn new(budget: u64) -> Self {
        Enumeration { budget }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// The verdict without a time limit.
    pub fn decide(&self, formula: &Formula) -> BackendVerdict {
        self.search(formula, None)
    }

    fn search(&self, formula: &Formula, deadline: Option<Instant>) -> BackendVerdict {
        let mut domains = Vec::new();
        let mut total: u64 = 1;
        for d in formula.declarations() {
            let values = match domain(d.sort, self.budget) {
                Ok(v) => v,
                Err(reason) => return BackendVerdict::Unknown(reason),
            };
            total = total.saturating_mul(values.len() as u64);
            if total > self.budget {
                return BackendVerdict::Unknown(UnknownReason::SortTooLarge);
            }
            domains.push(values);
        }
        let labels: Vec<Label> = formula.declarations().iter().map(|d| d.label.clone()).collect();
        let position = |l: &Label| labels.iter().position(|x| x == l);
        // variable-free assertions are decided up front
        let mut checks: Vec<Vec<Staged>> = vec![Vec::new(); labels.len()];
        let mut conjuncts = Vec::new();
        for a in formula.assertions() {
            flatten_and(a, &mut conjuncts);
        }
        for a in conjuncts {
            match a.variables().iter().filter_map(position).max() {
                Some(last) => match Staged::new(a, &position, last) {
                    Some(compiled) => checks[last].push(compiled),
                    None => return BackendVerdict::Unknown(UnknownReason::Unsupported("undeclared variable".into())),
                },
                None if eval_bool(a, &Model::new()) != Some(true) => return BackendVerdict::Unsat,
                None => {}
            }
        }
        let n = labels.len();
        let mut search =
            Search { domains, checks, deadline, steps: 0, assignment: vec![None; n], stack: Vec::new() };
        match search.run(0) {
            Outcome::Found => BackendVerdict::sat(
                labels.into_iter().zip(search.assignment).map(|(l, v)| (l, v.expect("complete assignment"))).collect(),
            ),
            Outcome::Exhausted => BackendVerdict::Unsat,
            Outcome::TimedOut => BackendVerdict::Unknown(UnknownReason::Timeout),
        }
    }
}

impl Backend for Enumeration {
    fn name(&self) -> &str {
        "enum"
    }

    fn check_sat(&mut self, formula: &Formula, _logic: &str, timeout: Option<Duration>) -> BackendVerdict {
        self.search(formula, timeout.map(|t| Instant::now() + t))
    }
}
