//! Criterion benchmarks for the `twoenv` toolkit live in `benches/`.
