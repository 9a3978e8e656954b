//! Constructive content around boundedly finite-to-one maps on permutations
//! and partitions of an infinite set.
//!
//! * [`perm`] and [`partition`] model finitely supported permutations and
//!   partitions with finite blocks over the atom universe of [`carrier`].
//! * [`injection`] is an explicit injection from permutations moving exactly
//!   `n` points into those moving exactly `m >= n + 2` points, with decoder.
//! * [`diag_perm`] and [`diag_part`] are diagonalization engines: fed any
//!   oracle claiming to be boundedly `k`-to-one into permutations moving at
//!   most `n` points (respectively finite sets), they emit an ever-growing
//!   stream of pairwise distinct inputs or a certificate that the claimed
//!   bound was violated.
//! * [`fraenkel`] classifies candidate assignments `s -> t` against a finite
//!   support `E` into the three contradictions of the support argument.
//! * [`diag`] holds the shared bound arithmetic, oracle ledger and
//!   certificates; [`oracles`] the built-in adversaries; [`cli`] the command
//!   front end.
//!
//! The `parallel` feature (on by default) runs the exhaustive loops on
//! rayon; [`Strategy::Sequential`] forces the single-threaded path.

pub mod carrier;
pub mod cli;
pub mod diag;
pub mod diag_part;
pub mod diag_perm;
pub mod error;
pub mod exec;
pub mod fraenkel;
pub mod injection;
pub mod oracles;
pub mod partition;
pub mod perm;

pub use carrier::{atom_cmp, fresh_atoms, spec_contains, Atom, AtomSet, SetSpec};
pub use exec::Strategy;
pub use partition::{ClassPartition, ClassSet, FinitaryPartition, QuotientFrame};
pub use perm::{compose, deflate, FinPerm};
