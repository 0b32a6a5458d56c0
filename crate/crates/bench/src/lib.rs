//! Benchmarks for hkcoeff live in `benches/`.
