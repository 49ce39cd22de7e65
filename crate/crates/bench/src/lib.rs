//! Benchmarks for starmax-core live in `benches/`.
