//! Criterion benchmarks for the estimation hot paths live in `benches/`.
