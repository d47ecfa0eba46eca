//! Exact-arithmetic randomized bipartite matching.
//!
//! The crate covers three algorithm families on bipartite graphs with `n`
//! vertices per side:
//!
//! * the determinant test for perfect matchings and constructive
//!   extraction of a matching from a nonzero evaluation ([`edmonds`]);
//! * the randomized matching finder that isolates a unique minimum-weight
//!   perfect matching with powers-of-two weights ([`mvv`], [`isolation`]);
//! * augmenting paths, Hall violators and the Hungarian method
//!   ([`classical`]).
//!
//! The failure probability of each randomized step is backed by an explicit
//! surjection from a small sample space onto the error set
//! ([`sz_witness`], [`isolation`]). [`oracle`] enumerates small instances
//! exhaustively to check those surjections and every algorithm against
//! brute force; [`verify`] bundles the checks into reportable suites.
//!
//! All arithmetic on determinants and weights is exact. Indices are 0-based.

pub mod bipartite;
pub mod classical;
pub mod edmonds;
pub mod error;
pub mod exact_linear;
pub mod isolation;
pub mod mvv;
pub mod oracle;
pub mod sz_witness;
pub mod verify;

pub use bipartite::{BipartiteGraph, Matching, WeightAssignment};
pub use error::{Error, Result};
pub use exact_linear::{ExactInt, IntMatrix};
