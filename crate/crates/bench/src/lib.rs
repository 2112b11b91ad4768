//! Benchmarks only; see benches/core_ops.rs.
