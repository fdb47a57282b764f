//! Exact-arithmetic toolkit for computational experiments on random walks
//! over solvable matrix groups.
//!
//! The crate is organized around a sparse multivariate Laurent polynomial
//! core ([`laurent`]), quotient-ring services with probabilistic
//! fingerprints ([`quotient`]), normal-form group elements for lamplighter
//! groups, `G_k(p)` matrix groups and the torsion-free Baumslag group
//! ([`groups`]), cube-independence certification ([`cube`]), decision
//! procedures for the spaced polynomial property ([`spp`]), Monte Carlo
//! entropy lower-bound estimators ([`walks`]), and basic-block extraction
//! from upper-triangular generator matrices ([`blocks`]).
//!
//! Everything is deterministic given explicit seeds; all algebra is exact
//! (arbitrary-precision integers, no floating point in any verdict path).
//!
//! See the `examples/` directory for one runnable program per capability,
//! and the `blab` binary for the command-line front end.

pub mod blocks;
pub mod config;
pub mod cube;
pub mod experiments;
pub mod field;
pub mod groups;
pub mod laurent;
pub mod quotient;
pub mod spp;
pub mod walks;
