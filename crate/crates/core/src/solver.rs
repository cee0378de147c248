//! The approximation-refinement loop.

use std::time::{Duration, Instant};

use crate::approx::Approximation;
use crate::ast::{Formula, Model};
use crate::backend::{default_value, Backend, BackendVerdict, UnknownReason};
use crate::eval::satisfies;
use crate::precision::PrecisionMap;

/// Logic tag passed to the fallback solver.
pub const INPUT_LOGIC: &str = "QF_FP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_iterations: usize,
    /// Wall-clock budget for the whole solve, checked between iterations.
    pub time: Option<Duration>,
    /// Timeout of each backend call.
    pub backend_timeout: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_iterations: 100, time: None, backend_timeout: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(Model),
    Unsat,
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            Verdict::Sat(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseTimings {
    pub encode: Duration,
    pub backend: Duration,
    pub decode: Duration,
    pub reconstruct: Duration,
    pub refine: Duration,
}

impl PhaseTimings {
    pub fn sum(&self) -> Duration {
        self.encode + self.backend + self.decode + self.reconstruct + self.refine
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Precision used by each iteration; a fallback iteration records the
    /// all-top map.
    pub precision_history: Vec<PrecisionMap>,
    pub timings: PhaseTimings,
    pub total: Duration,
    pub fallback_used: bool,
    pub max_precision_reached: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    pub stats: SolveStats,
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let started = Instant::now();
    let out = f();
    *slot += started.elapsed();
    out
}

/// Runs `backend` on the original formula and checks any model it returns.
fn decide(formula: &Formula, backend: &mut dyn Backend, limits: &Limits, stats: &mut SolveStats) -> Verdict {
    let verdict = timed(&mut stats.timings.backend, || backend.check_sat(formula, INPUT_LOGIC, limits.backend_timeout));
    match verdict {
        BackendVerdict::Sat { model, .. } if satisfies(formula.assertions(), &model) => Verdict::Sat(model),
        BackendVerdict::Sat { .. } => Verdict::Unknown(UnknownReason::BackendFailure(format!(
            "{} returned a model that violates the formula",
            backend.name()
        ))),
        BackendVerdict::Unsat => Verdict::Unsat,
        BackendVerdict::Unknown(reason) => Verdict::Unknown(reason),
    }
}

/// Solves `formula` with `backend` directly, without approximation.
pub fn solve_direct(formula: &Formula, backend: &mut dyn Backend, limits: &Limits) -> SolveOutcome {
    let started = Instant::now();
    let mut stats = SolveStats::default();
    let verdict = if formula.assertions().is_empty() {
        Verdict::Sat(formula.declarations().iter().map(|d| (d.label.clone(), default_value(d.sort))).collect())
    } else {
        stats.iterations = 1;
        decide(formula, backend, limits, &mut stats)
    };
    stats.total = started.elapsed();
    SolveOutcome { verdict, stats }
}

/// Approximation-refinement solving of `formula`.
///
/// Each iteration encodes at the current precision, solves the encoding with
/// `backend`, and tries to turn its model into a model of `formula`. Failures
/// refine the precision. Once it is all top, or after an encoding or decoding
/// error, `fallback` decides the original formula; that final step counts as
/// an iteration.
pub fn solve(
    formula: &Formula,
    approx: &dyn Approximation,
    backend: &mut dyn Backend,
    fallback: &mut dyn Backend,
    limits: &Limits,
) -> SolveOutcome {
    let started = Instant::now();
    let mut stats = SolveStats::default();
    let verdict = run(formula, approx, backend, fallback, limits, &mut stats, started);
    stats.total = started.elapsed();
    SolveOutcome { verdict, stats }
}

fn run(
    formula: &Formula,
    approx: &dyn Approximation,
    backend: &mut dyn Backend,
    fallback: &mut dyn Backend,
    limits: &Limits,
    stats: &mut SolveStats,
    started: Instant,
) -> Verdict {
    if formula.assertions().is_empty() {
        return Verdict::Sat(formula.declarations().iter().map(|d| (d.label.clone(), default_value(d.sort))).collect());
    }
    let order = approx.order();
    let mut precision = approx.initial_precision(formula);
    let mut fall_back = |precision: &PrecisionMap, stats: &mut SolveStats| {
        let top = precision.map(|_| order.top());
        match stats.precision_history.last_mut() {
            Some(last) => *last = top,
            None => stats.precision_history.push(top),
        }
        stats.fallback_used = true;
        stats.max_precision_reached = true;
        decide(formula, fallback, limits, stats)
    };
    loop {
        if stats.iterations >= limits.max_iterations || limits.time.is_some_and(|t| started.elapsed() >= t) {
            return Verdict::Unknown(UnknownReason::Budget);
        }
        stats.iterations += 1;
        stats.precision_history.push(precision.clone());
        if precision.is_all_top(order) {
            return fall_back(&precision, stats);
        }
        let encoded = match timed(&mut stats.timings.encode, || approx.encode(formula, &precision)) {
            Ok(encoded) => encoded,
            Err(_) => return fall_back(&precision, stats),
        };
        let answer = timed(&mut stats.timings.backend, || {
            backend.check_sat(&encoded, approx.output_logic(), limits.backend_timeout)
        });
        let next = match answer {
            BackendVerdict::Sat { model, .. } => {
                if encoded.assertions().iter().any(|a| crate::eval::eval_bool(a, &model) == Some(false)) {
                    return Verdict::Unknown(UnknownReason::BackendFailure(format!(
                        "{} returned a model that violates the approximate formula",
                        backend.name()
                    )));
                }
                let decoded = match timed(&mut stats.timings.decode, || {
                    approx.decode(formula, &encoded, &model, &precision)
                }) {
                    Ok(decoded) => decoded,
                    Err(_) => return fall_back(&precision, stats),
                };
                let candidate = timed(&mut stats.timings.reconstruct, || approx.reconstruct(formula, &decoded));
                if satisfies(formula.assertions(), &candidate) {
                    return Verdict::Sat(candidate);
                }
                timed(&mut stats.timings.refine, || approx.model_refine(formula, &decoded, &candidate, &precision))
            }
            BackendVerdict::Unknown(UnknownReason::BackendFailure(detail)) => {
                return Verdict::Unknown(UnknownReason::BackendFailure(detail))
            }
            // no model: an unknown answer is refined like an unsat one
            BackendVerdict::Unsat | BackendVerdict::Unknown(_) => {
                timed(&mut stats.timings.refine, || approx.proof_refine(formula, &[], &precision))
            }
        };
        if next == precision || !precision.leq(&next, order) {
            // refinement is stuck; the fallback decides in a final iteration
            if stats.iterations >= limits.max_iterations {
                return Verdict::Unknown(UnknownReason::Budget);
            }
            stats.iterations += 1;
            stats.precision_history.push(precision.clone());
            return fall_back(&precision, stats);
        }
        precision = next;
    }
}
