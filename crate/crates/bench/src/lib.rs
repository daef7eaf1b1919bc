//! Criterion benchmarks for `cvqudit`; see `benches/`.
