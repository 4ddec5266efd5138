//! Simulation, training and verification toolkit for parity-gate quantum
//! binary classifiers.
//!
//! A classifier couples one readout qubit to N data qubits through blocks of
//! `XX` / `ZZ` Ising gates. Binary patterns are loaded as computational basis
//! states and the readout expectation serves as the logit. The crate covers
//! the dense simulator ([`statevec`]), the model ([`qnn`]), hinge-loss
//! training with parameter-shift gradients ([`train`]), the binarized digit
//! pipeline ([`data`]), negation-symmetry checks ([`symmetry`]), a small
//! classical baseline ([`baseline`]) and the experiment driver ([`cli`]).

pub mod baseline;
pub mod cli;
pub mod data;
mod error;
pub mod qnn;
pub mod statevec;
pub mod symmetry;
pub mod train;

pub use error::{Error, Result};
