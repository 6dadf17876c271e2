//! Criterion benchmarks for the halfsign core; see `benches/`.
