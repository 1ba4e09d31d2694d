//! Criterion benchmarks for the mdd-core kernels; see `benches/kernels.rs`.
