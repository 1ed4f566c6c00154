//! Criterion benchmarks for the construction and certification pipeline.
//! The benchmarks live in `benches/`; this crate has no library API.
