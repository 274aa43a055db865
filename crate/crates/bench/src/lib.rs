//! Benchmarks for `fracvar-core`; see `benches/`.
