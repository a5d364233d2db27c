//! Deterministic pattern-avoiding stack-sorting of set partitions.
//!
//! * [`partition`]: words, canonical forms and their statistics.
//! * [`machine`]: the stack machine `φ_σ`, its `aba` fast path, traces and
//!   sorting depth.
//! * [`enumeration`]: restricted-growth streams and exhaustive witness search.
//! * [`verification`]: checks of the structural facts about `φ_aba`.
//! * [`cli`]: the command-line front end.

pub mod cli;
pub mod enumeration;
pub mod machine;
pub mod partition;
pub mod verification;

pub use enumeration::{
    canonical_partitions, find_witnesses, find_witnesses_parallel, stirling2, witness_table,
    CellSpec, Family, WitnessProfile, WitnessReport,
};
pub use machine::{apply_phi, apply_phi_aba, iterate, sorting_depth, trace, Depth, Pattern, Trace};
pub use partition::{CanonicalPartition, Letter, PositionSet, SetPartition};
