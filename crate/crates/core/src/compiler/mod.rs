//! Circuit front end and netlist compilation.

mod circuit;
mod compile;
mod verify;

pub use crate::network::{emit_netlist, load_netlist};
pub use circuit::{parse_circuit, parse_circuit_bytes, CircuitIR, Gate, GateKind, ParseError, MAX_CIRCUIT_QUBITS};
pub use compile::{compile, LadderKind, SizePolicy};
pub use verify::{
    random_circuit, simulate_circuit, verify_circuit, verify_netlist, VerifyFailure, VerifyOptions, VerifyReport,
};
