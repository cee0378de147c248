//! Criterion benchmarks for approxsmt; see `benches/`.
