//! Stabilizer-based entanglement witnesses for two-particle hyperentangled
//! states and graph states.
//!
//! The crate builds the states and their stabilizer groups exactly, constructs
//! a family of witness operators from few local-measurement settings, and
//! provides both exact evaluation (closed-form rational eigenvalues and
//! traces) and a simulated-measurement path (local settings, finite shots,
//! white noise). A brute-force separability oracle checks the overlap bound
//! that underpins one of the witness constructions.
//!
//! The crate is `no_std` + `alloc`; all floating-point work goes through
//! `libm`-backed `num-traits`. Everything dense is capped at a small qubit
//! count; the exact paths work on bitmasks and scale to tens of qubits.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod graph;
pub mod linalg;
pub mod measure;
pub mod oracle;
pub mod pauli;
pub mod stabilizer;
pub mod state;
pub mod witness;

#[cfg(test)]
pub(crate) mod testkit;

pub use error::{Error, Result};
pub use graph::GraphSpec;
pub use measure::{Basis, MeasurementSetting, SettingOutcome, WitnessDecomposition};
pub use pauli::{DofLayout, Particle, PauliString, Phase, MAX_QUBITS};
pub use stabilizer::{StabilizerSet, SystemSpec};
pub use state::{
    build_graph_state, build_he_state, example_psi1, example_psi2, example_rho_prime,
    DensityOperator, QuantumState, StateVector,
};
pub use witness::{detect, AlphaCertificate, DetectionReport, Rational, Witness, WitnessKind};
