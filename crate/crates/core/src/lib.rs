//! Simulation and compilation of measurement-driven cluster-state gate
//! blocks ("telesistors").

pub mod compiler;
pub mod dense;
pub mod error;
pub mod network;
pub mod outcome;
pub mod pauli;
pub mod phase;
pub mod register;
pub mod tableau;
pub mod transistor;

pub use error::{Error, Result};
pub use outcome::{Measurement, OutcomePolicy, OutcomeStream};
pub use pauli::{Basis, CliffordGate, Pauli, PauliString};
pub use tableau::{Boundary, InitState, StabilizerTableau};
