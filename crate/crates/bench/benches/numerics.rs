use std::hint::black_box;

use approxsmt::approx::{decode_fp_value, encode_fixed_point_literal, FixedPointFormat};
use approxsmt::fp::fp_eval;
use approxsmt::{FpFormat, FpLiteral, FpOp, RoundingMode};
use criterion::{criterion_group, criterion_main, Criterion};
use num_rational::BigRational;

fn arithmetic(c: &mut Criterion) {
    let small = FpFormat::new(3, 3).unwrap();
    let all: Vec<FpLiteral> = (0..64u128).map(|b| FpLiteral::from_packed(small, b).unwrap()).collect();
    for op in [FpOp::Add, FpOp::Mul, FpOp::Div] {
        c.bench_function(&format!("{op:?} (3,3) all pairs"), |b| {
            b.iter(|| {
                for x in &all {
                    for y in &all {
                        black_box(fp_eval(op, RoundingMode::Rne, &[*x, *y]));
                    }
                }
            })
        });
    }
    let f64 = FpFormat::new(11, 53).unwrap();
    let third = FpLiteral::from_rational(&BigRational::new(1.into(), 3.into()), f64, RoundingMode::Rne);
    let seven = FpLiteral::from_rational(&BigRational::from_integer(7.into()), f64, RoundingMode::Rne);
    c.bench_function("Fma Float64", |b| {
        b.iter(|| fp_eval(FpOp::Fma, RoundingMode::Rne, black_box(&[third, seven, third])))
    });
}

fn codecs(c: &mut Criterion) {
    let small = FpFormat::new(3, 3).unwrap();
    let all: Vec<FpLiteral> = (0..64u128).map(|b| FpLiteral::from_packed(small, b).unwrap()).collect();
    c.bench_function("widen (3,3) to Float32", |b| {
        b.iter(|| all.iter().filter(|v| decode_fp_value(FpFormat::FLOAT32, v).is_ok()).count())
    });
    let fmt = FixedPointFormat::new(9, 9);
    c.bench_function("fixed-point (9,9) encode", |b| {
        b.iter(|| all.iter().filter(|v| !v.is_nan() && encode_fixed_point_literal(v, fmt).is_ok()).count())
    });
}

criterion_group!(benches, arithmetic, codecs);
criterion_main!(benches);
