//! Criterion benchmarks for the analysis pipeline; see `benches/`.
