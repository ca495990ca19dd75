//! Artificial gene regulatory networks (GRNs) with input/output extensions,
//! evolved by a (μ+λ) evolution strategy into bang-bang controllers for the
//! single-pole cart balancing benchmark.
//!
//! Module map:
//! - [`genome`]: bit-string genomes, initialization, gene scanning, protein synthesis.
//! - [`regulation`]: compiled regulatory networks and concentration dynamics.
//! - [`cartpole`]: cart-pole physics with bang-bang force.
//! - [`controller`]: GRN/cart coupling, episodes and fitness.
//! - [`evolution`]: (μ+λ)-ES with 1/5-rule mutation-rate control.
//! - [`analysis`]: generalization suite, solvability oracle, network export.
//! - [`cli`]: command-line front end.

pub mod analysis;
pub mod cartpole;
pub mod cli;
pub mod controller;
pub mod error;
pub mod evolution;
pub mod genome;
pub mod regulation;
pub(crate) mod seeds;

pub use error::{GrnError, Result};
