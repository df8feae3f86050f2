//! Criterion benchmarks for `bixon-core`; see `benches/`.
