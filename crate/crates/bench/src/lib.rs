//! Criterion benchmarks for the OTOC engine and the exact oracle; see `benches/`.
