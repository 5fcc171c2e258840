//! Criterion benchmarks for the solver, model builder and validator; see `benches/`.
