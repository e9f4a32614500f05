//! Generalized entropy functionals and a numerical engine that decides,
//! family by family, which axiom systems they satisfy.
//!
//! - [`simplex`]: distributions and the constructions axioms are stated over.
//! - [`catalog`]: closed-form entropies and the identities between them.
//! - [`engine`]: axiom predicates, randomized trials and counterexample search.
//! - [`classifier`]: parameter sweeps, labels and the reference claim table.
//! - [`cli`]: the command-line front end.

#![forbid(unsafe_code)]

pub mod catalog;
pub mod classifier;
pub mod cli;
pub mod engine;
pub mod error;
pub mod simplex;

pub use catalog::{EntropySpec, Eq10Variant, Family};
pub use engine::{check, AxiomId, CheckConfig, Status, Suite, Verdict};
pub use error::{Error, Result};
pub use simplex::{CondDist, Dist, Refinement};
