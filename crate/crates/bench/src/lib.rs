//! Criterion benchmarks for `optprice-core`; see `benches/`.
