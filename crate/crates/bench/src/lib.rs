//! Criterion benchmarks for the magnon-core kernels; see `benches/`.
