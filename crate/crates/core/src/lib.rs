//! Whitehead calculus for right-angled Artin groups: Γ-Whitehead partitions,
//! Salvetti blowups as combinatorial cube complexes, hyperplane collapses,
//! the conjugacy-length norm on marked Salvettis, and peak reduction
//! factoring long-range outer automorphisms into Whitehead moves.

#![forbid(unsafe_code)]

pub mod auto;
pub mod complex;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod partition;
pub mod rose;
pub mod spine;
pub mod stargraph;
pub mod suites;
pub mod wire;
pub mod word;

pub use auto::Automorphism;
pub use error::Error;
pub use graph::DefiningGraph;
pub use partition::{GwPair, GwPartition, LetterSet};
pub use rose::MarkedRose;
pub use word::{ConjClass, Letter, Word};
