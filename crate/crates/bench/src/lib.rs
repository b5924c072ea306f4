//! Criterion benchmarks for the time steppers live in `benches/`.
