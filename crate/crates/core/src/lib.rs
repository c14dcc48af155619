//! Simulator for recovering a quantum state after a measurement without using the
//! measurement outcome.
//!
//! The state `ρ` is embedded with an ancilla as `ρ ⊕ 0` on `H_d ⊕ H_d⊥`, partially
//! transferred into the orthogonal complement, measured there only, and then recovered
//! by a fixed two-outcome measurement that never sees the first outcome. Success has
//! probability `cos²φ`, returns `ρ` exactly, and leaves a flat posterior over the first
//! measurement's outcomes.
//!
//! - [`block`]: operators on `H_d ⊕ H_d⊥` as four blocks, with exact block sparsity.
//! - [`qcore`]: density matrices, instruments, sampling and state metrics.
//! - [`protocol`]: the recovery protocol and its closed-form quantities.
//! - [`qrm`]: the outcome-dependent reversible-measurement baseline and trade-off check.
//! - [`dense`]: an independent tensor-product implementation used as an oracle.
//! - [`batch`]: seeded parallel Monte Carlo.

pub mod batch;
pub mod block;
pub mod cli;
pub mod config;
pub mod dense;
pub mod error;
pub mod linalg;
pub mod protocol;
pub mod qcore;
pub mod qrm;
pub mod random;
pub mod trial;

pub use block::BlockOperator;
pub use config::{ConfigSpec, ProtocolConfig};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use qcore::{DensityMatrix, QuantumInstrument, TrialStream};
pub use trial::{Recovery, TrialRecord};
