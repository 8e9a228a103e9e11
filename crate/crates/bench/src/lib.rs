//! Criterion benchmarks for `invlim-core`; see `benches/`.
