use std::hint::black_box;

use approxsmt::{
    parse_script, solve, solve_direct, Approximation, Enumeration, FixedPoint, Formula, Limits,
    ReducedPrecision,
};
use criterion::{criterion_group, criterion_main, Criterion};

const RUNNING_EXAMPLE: &str = include_str!("../../core/tests/corpus/01_running_example.smt2");

const SMALL: &str = "(declare-fun x () (_ FloatingPoint 3 3)) (declare-fun y () (_ FloatingPoint 3 3))
    (assert (= y (fp.mul RNE x x)))
    (assert (fp.gt y ((_ to_fp 3 3) RNE 2.0)))
    (assert (fp.lt x ((_ to_fp 3 3) RNE 0.0)))";

fn formula(text: &str) -> Formula {
    parse_script(text).expect("benchmark input parses").formula
}

fn loops(c: &mut Criterion) {
    let example = formula(RUNNING_EXAMPLE);
    let small = formula(SMALL);
    // real arithmetic needs an external solver for Float32, so it is left out
    let approximations: [&dyn Approximation; 2] = [&ReducedPrecision, &FixedPoint];
    for approx in approximations {
        c.bench_function(&format!("solve running example {}", approx.name()), |b| {
            b.iter(|| {
                solve(
                    black_box(&example),
                    approx,
                    &mut Enumeration::default(),
                    &mut Enumeration::default(),
                    &Limits::default(),
                )
            })
        });
    }
    c.bench_function("enumerate (3,3) pair", |b| {
        b.iter(|| solve_direct(black_box(&small), &mut Enumeration::default(), &Limits::default()))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = loops
}
criterion_main!(benches);
