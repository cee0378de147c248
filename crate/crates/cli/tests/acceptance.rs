//! Acceptance criteria 1 to 10, one PASS/FAIL line each.

use std::cell::Cell;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use approxsmt::approx::{decode_fp_value, scale_format};
use approxsmt::backend::{parse_model, Enumeration};
use approxsmt::fp::fp_eval;
use approxsmt::reconstruct::reconstruct;
use approxsmt::testing::{generators, oracle};
use approxsmt::{
    eval, eval_bool, parse_script, print_script, satisfies, solve, Approximation, BackendVerdict, BitVecValue,
    FixedPoint, Formula, FpFormat, FpLiteral, FpOp, Limits, Model, Op, Precision, PrecisionMap, RealArithmetic,
    ReducedPrecision, RoundingMode, Value, Verdict,
};
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

type Check = Result<String, String>;

fn format(e: u32, s: u32) -> FpFormat {
    FpFormat::new(e, s).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn lit(n: i64, d: i64, f: FpFormat) -> FpLiteral {
    FpLiteral::from_rational(&q(n, d), f, RoundingMode::Rne)
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/corpus")
}

fn running_example() -> PathBuf {
    corpus_dir().join("01_running_example.smt2")
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_approxsmt")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn property_failure<T: std::fmt::Debug>(e: TestError<T>) -> String {
    match e {
        TestError::Fail(reason, value) => format!("{reason}; minimal input {value:?}"),
        TestError::Abort(reason) => format!("aborted: {reason}"),
    }
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn running_example_end_to_end() -> Check {
    let started = Instant::now();
    let file = running_example();
    let out = cli(&["solve", file.to_str().unwrap(), "--approx", "rpfp", "--backend", "enum", "--fallback", "enum"])?;
    let elapsed = started.elapsed();
    let (verdict, model_text) = out.split_once('\n').unwrap_or((out.as_str(), ""));
    ensure(verdict == "sat", || format!("verdict {verdict}"))?;
    let formula = parse_script(&std::fs::read_to_string(&file).unwrap()).unwrap().formula;
    let model = parse_model(model_text, &formula).map_err(|e| e.to_string())?;
    for (i, a) in formula.assertions().iter().enumerate() {
        ensure(eval_bool(a, &model) == Some(true), || format!("assertion {} is not true", i + 1))?;
    }
    let f32 = FpFormat::FLOAT32;
    let x = model.value_of(&formula, "x").cloned();
    let y = model.value_of(&formula, "y").cloned();
    if x == Some(Value::Fp(lit(2, 1, f32))) {
        ensure(y == Some(Value::Fp(lit(15, 4, f32))), || format!("x = 2.0 but y = {y:?}"))?;
    }
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("x = {}, y = {}", x.unwrap(), y.unwrap()))
}

fn reduced_precision_rounding() -> Check {
    let f = format(3, 3);
    let sum = fp_eval(FpOp::Add, RoundingMode::Rne, &[lit(2, 1, f), lit(7, 4, f)]);
    let four = lit(4, 1, f);
    ensure(sum.to_packed() == four.to_packed(), || format!("2.0 + 1.75 = {sum}"))?;
    Ok(format!("2.0 + 1.75 = {sum} in (3,3)"))
}

fn evaluator_matches_oracle() -> Check {
    let started = Instant::now();
    let f = format(3, 3);
    let all: Vec<FpLiteral> = (0..64u128).map(|b| FpLiteral::from_packed(f, b).unwrap()).collect();
    let mut checked = 0;
    for op in [FpOp::Add, FpOp::Sub, FpOp::Mul] {
        for a in &all {
            for b in &all {
                let args = [*a, *b];
                let got = fp_eval(op, RoundingMode::Rne, &args);
                let want = oracle::eval(op, RoundingMode::Rne, &args);
                ensure(oracle::same(&got, &want), || format!("{op:?} {a} {b}: {got} vs {want}"))?;
                checked += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} pairs match"))
}

fn decode_preserves_values() -> Check {
    let started = Instant::now();
    let wide = FpFormat::FLOAT32;
    for bits in 0..64u128 {
        let v = FpLiteral::from_packed(format(3, 3), bits).unwrap();
        let w = decode_fp_value(wide, &v).map_err(|e| format!("{v}: {e}"))?;
        let same = if v.is_finite() {
            w.to_rational() == v.to_rational() && w.is_zero() == v.is_zero() && (!v.is_zero() || w.sign() == v.sign())
        } else {
            w.class() == v.class() && (v.is_nan() || w.sign() == v.sign())
        };
        ensure(same, || format!("{v} became {w}"))?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok("64 patterns preserved".into())
}

fn fixed_point_golden_encoding() -> Check {
    let file = running_example();
    let printed = cli(&["encode", file.to_str().unwrap(), "--approx", "bv", "--precision", "5,5"])?;
    for constant in ["#b0000111000", "#b0001000000", "#b1110000000"] {
        ensure(printed.contains(constant), || format!("{constant} missing"))?;
    }
    let formula = parse_script(&std::fs::read_to_string(&file).unwrap()).unwrap().formula;
    let p = PrecisionMap::Uniform(Precision::Pair(5, 5));
    let encoded = FixedPoint.encode(&formula, &p).map_err(|e| e.to_string())?;
    ensure(print_script(&encoded, "QF_BV") == printed, || "CLI output differs from the encoding".into())?;
    let bits = |s: &str| Value::Bv(BitVecValue::new(10, u128::from_str_radix(s, 2).unwrap()));
    let model: Model = [
        (encoded.declaration("x").unwrap().label.clone(), bits("0001000000")),
        (encoded.declaration("y").unwrap().label.clone(), bits("0001111000")),
    ]
    .into_iter()
    .collect();
    ensure(satisfies(encoded.assertions(), &model), || "model violates the encoding".into())?;
    // the printed text must mean the same thing
    let reparsed = parse_script(&printed).map_err(|e| e.to_string())?.formula;
    let remodel: Model = reparsed
        .declarations()
        .iter()
        .map(|d| (d.label.clone(), model.value_of(&encoded, &d.name).unwrap().clone()))
        .collect();
    ensure(satisfies(reparsed.assertions(), &remodel), || "model violates the printed encoding".into())?;
    let decoded = FixedPoint.decode(&formula, &encoded, &model, &p).map_err(|e| e.to_string())?;
    let f32 = FpFormat::FLOAT32;
    ensure(decoded.value_of(&formula, "x") == Some(&Value::Fp(lit(2, 1, f32))), || "x is not 2.0".into())?;
    ensure(decoded.value_of(&formula, "y") == Some(&Value::Fp(lit(15, 4, f32))), || "y is not 3.75".into())?;
    Ok("constants and model decode as expected".into())
}

fn scale_checks() -> Check {
    let f32 = FpFormat::FLOAT32;
    for (p, want) in [(0, format(3, 3)), (5, f32), (2, format(5, 11))] {
        let got = scale_format(f32, p);
        ensure(got == want, || format!("p = {p}: {got:?}"))?;
    }
    Ok("(3,3), (8,24), (5,11)".into())
}

fn uniform_chain(approx: &dyn Approximation, formula: &Formula) -> usize {
    let order = approx.order();
    let mut p = approx.initial_precision(formula);
    let mut steps = 0;
    while !p.is_all_top(order) && steps < 100 {
        p = approx.proof_refine(formula, &[], &p);
        steps += 1;
    }
    steps
}

fn refinement_chains() -> Check {
    let formula = parse_script(&std::fs::read_to_string(running_example()).unwrap()).unwrap().formula;
    let rpfp = uniform_chain(&ReducedPrecision, &formula);
    let bv = uniform_chain(&FixedPoint, &formula);
    let ra = uniform_chain(&RealArithmetic, &formula);
    ensure((rpfp, bv, ra) == (5, 5, 1), || format!("chains {rpfp}/{bv}/{ra}"))?;
    ensure(FixedPoint.order().top() == Precision::Pair(25, 25), || "bv top".into())?;
    Ok("5/5/1 steps".into())
}

/// A decoded model from a uniformly random model of the lowest encoding.
fn decoded_from_random(formula: &Formula, seeds: &[u128]) -> Model {
    let approx = ReducedPrecision;
    let p = approx.initial_precision(formula);
    let encoded = approx.encode(formula, &p).unwrap();
    let model: Model = encoded
        .declarations()
        .iter()
        .zip(seeds)
        .map(|(d, bits)| {
            let approxsmt::Sort::Float(f) = d.sort else { unreachable!() };
            let v = FpLiteral::from_packed(f, bits & ((1 << f.width()) - 1)).unwrap();
            (d.label.clone(), Value::Fp(v.canonical()))
        })
        .collect();
    approx.decode(formula, &encoded, &model, &p).unwrap()
}

/// Assigns each chain variable the value of its right-hand side in the
/// lowest encoding, in order, so every chain equality holds there.
fn decoded_along_chain(formula: &Formula, links: usize) -> Model {
    let approx = ReducedPrecision;
    let p = approx.initial_precision(formula);
    let encoded = approx.encode(formula, &p).unwrap();
    let mut model = Model::new();
    for d in encoded.declarations() {
        let approxsmt::Sort::Float(f) = d.sort else { unreachable!() };
        model.insert(d.label.clone(), Value::Fp(FpLiteral::zero(f, false)));
    }
    for link in &encoded.assertions()[..links] {
        let [lhs, rhs] = link.children() else { unreachable!() };
        let value = eval(rhs, &model).unwrap();
        model.insert(lhs.label().clone(), value);
    }
    approx.decode(formula, &encoded, &model, &p).unwrap()
}

fn deterministic_and_conservative(formula: &Formula, decoded: &Model) -> Result<Model, TestCaseError> {
    let a = reconstruct(formula, decoded);
    let b = reconstruct(formula, decoded);
    prop_assert_eq!(&a, &b, "reconstruction is not deterministic");
    if satisfies(formula.assertions(), &decoded.restricted_to_variables(formula)) {
        prop_assert!(satisfies(formula.assertions(), &a), "a satisfying decoded model was lost");
    }
    Ok(a)
}

fn reconstruction_properties() -> Check {
    let random_cases = Cell::new(0usize);
    let case = (1usize..=3, prop_oneof![Just(format(3, 3)), Just(format(3, 4))]).prop_flat_map(|(vars, f)| {
        (generators::formula(f, vars, 3, 2), proptest::collection::vec(any::<u128>(), vars))
    });
    runner(600)
        .run(&case, |(formula, seeds)| {
            random_cases.set(random_cases.get() + 1);
            deterministic_and_conservative(&formula, &decoded_from_random(&formula, &seeds)).map(drop)
        })
        .map_err(property_failure)?;

    let chain_cases = Cell::new(0usize);
    let chain = (1usize..=3).prop_flat_map(|vars| (Just(vars), generators::definitional_chain(format(3, 4), vars)));
    runner(600)
        .run(&chain, |(links, formula)| {
            chain_cases.set(chain_cases.get() + 1);
            let decoded = decoded_along_chain(&formula, links);
            for link in &formula.assertions()[..links] {
                prop_assert_eq!(decoded.get(link.label()), Some(&Value::Bool(true)), "chain link false after decoding");
            }
            let rebuilt = deterministic_and_conservative(&formula, &decoded)?;
            for (i, link) in formula.assertions()[..links].iter().enumerate() {
                prop_assert!(matches!(link.op(), Op::Eq));
                prop_assert_eq!(eval_bool(link, &rebuilt), Some(true), "chain link {} is false", i);
            }
            Ok(())
        })
        .map_err(property_failure)?;
    let total = random_cases.get() + chain_cases.get();
    ensure(total >= 1000, || format!("only {total} cases"))?;
    Ok(format!("{total} cases ({} with definitional chains)", chain_cases.get()))
}

fn solver_soundness() -> Check {
    let started = Instant::now();
    let f = format(3, 3);
    let cases = Cell::new(0usize);
    let max_iterations = Cell::new([0usize; 3]);
    let case = (1usize..=3).prop_flat_map(move |vars| generators::formula(f, vars, 3, 2));
    runner(500)
        .run(&case, |formula| {
            cases.set(cases.get() + 1);
            let direct = Enumeration::default().decide(&formula);
            let approximations: [(&dyn Approximation, usize); 3] =
                [(&ReducedPrecision, 6), (&FixedPoint, 6), (&RealArithmetic, 2)];
            for (k, (approx, bound)) in approximations.into_iter().enumerate() {
                let outcome =
                    solve(&formula, approx, &mut Enumeration::default(), &mut Enumeration::default(), &Limits::default());
                match (&outcome.verdict, &direct) {
                    (Verdict::Sat(m), BackendVerdict::Sat { .. }) => {
                        prop_assert!(satisfies(formula.assertions(), m), "{}: model does not re-check", approx.name())
                    }
                    (Verdict::Unsat, BackendVerdict::Unsat) => {}
                    (got, want) => prop_assert!(false, "{}: {:?} but enumeration says {:?}", approx.name(), got, want),
                }
                let n = outcome.stats.iterations;
                prop_assert!(n <= bound, "{} took {} iterations", approx.name(), n);
                let mut most = max_iterations.get();
                most[k] = most[k].max(n);
                max_iterations.set(most);
            }
            Ok(())
        })
        .map_err(property_failure)?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    let [r, b, a] = max_iterations.get();
    Ok(format!("{} formulas, most iterations rpfp {r}, bv {b}, ra {a}", cases.get()))
}

fn corpus_round_trip() -> Check {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "smt2"))
        .collect();
    files.sort();
    ensure(files.len() == 20, || format!("{} corpus files", files.len()))?;
    for file in &files {
        let name = file.file_name().unwrap().to_string_lossy();
        let script = parse_script(&std::fs::read_to_string(file).unwrap()).map_err(|e| format!("{name}: {e}"))?;
        let logic = script.logic.as_deref().unwrap_or("QF_FP");
        let printed = print_script(&script.formula, logic);
        let again = parse_script(&printed).map_err(|e| format!("{name} reprinted: {e}"))?;
        ensure(again.formula == script.formula, || format!("{name} changed"))?;
        ensure(print_script(&again.formula, logic) == printed, || format!("{name} printed differently"))?;
    }
    Ok(format!("{} files", files.len()))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("running example end to end", running_example_end_to_end),
        ("reduced-precision rounding", reduced_precision_rounding),
        ("evaluator matches oracle", evaluator_matches_oracle),
        ("decode preserves values", decode_preserves_values),
        ("fixed-point golden encoding", fixed_point_golden_encoding),
        ("scaled formats", scale_checks),
        ("refinement chain lengths", refinement_chains),
        ("reconstruction properties", reconstruction_properties),
        ("solver soundness and termination", solver_soundness),
        ("SMT-LIB round trip", corpus_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.2} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
