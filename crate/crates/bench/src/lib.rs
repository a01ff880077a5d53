//! Criterion benchmarks for the folding engine live in `benches/`.
