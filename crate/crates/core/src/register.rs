//! Dynamic qubit registers over the two simulation backends.
//!
//! Qubits get stable [`QubitId`]s when allocated and disappear when
//! measured, which keeps long gate-block chains within the dense cap.

use serde::{Deserialize, Serialize};

use crate::dense::{basis_vector, init_vector, magic_vector, StateVector};
use crate::error::{Error, Result};
use crate::outcome::{Measurement, OutcomeStream};
use crate::pauli::{Basis, CliffordGate, Pauli, PauliString};
use crate::tableau::{InitState, StabilizerTableau};

pub type QubitId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Tableau,
    Oracle,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tableau" => Ok(Backend::Tableau),
            "oracle" => Ok(Backend::Oracle),
            other => Err(Error::Capability(format!("unknown backend '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alloc {
    State(InitState),
    /// `T|+⟩`.
    Magic,
    /// Arbitrary single-qubit pure state, oracle only.
    Amplitudes([num_complex::Complex64; 2]),
}

impl From<InitState> for Alloc {
    fn from(s: InitState) -> Self {
        Alloc::State(s)
    }
}

pub trait Register {
    fn backend(&self) -> Backend;

    fn alloc(&mut self, init: Alloc) -> Result<QubitId>;

    fn clifford(&mut self, gate: CliffordGate, qubits: &[QubitId]) -> Result<()>;

    /// Measures a single qubit and removes it from the register.
    fn measure(&mut self, qubit: QubitId, basis: Basis, outcomes: &mut OutcomeStream) -> Result<Measurement>;

    /// Live qubits in allocation order.
    fn live(&self) -> &[QubitId];

    /// Dense copy of the register state with qubit `k` of the result being
    /// `order[k]`; `order` must list every live qubit.
    fn dense_state(&self, order: &[QubitId]) -> Result<StateVector>;

    fn pauli(&mut self, qubit: QubitId, p: Pauli) -> Result<()> {
        match p {
            Pauli::I => Ok(()),
            Pauli::X => self.clifford(CliffordGate::X, &[qubit]),
            Pauli::Y => self.clifford(CliffordGate::Y, &[qubit]),
            Pauli::Z => self.clifford(CliffordGate::Z, &[qubit]),
        }
    }

    fn alloc_many(&mut self, init: Alloc, count: usize) -> Result<Vec<QubitId>> {
        (0..count).map(|_| self.alloc(init)).collect()
    }
}

pub fn new_register(backend: Backend) -> Box<dyn Register> {
    match backend {
        Backend::Tableau => Box::new(TableauRegister::new()),
        Backend::Oracle => Box::new(DenseRegister::new()),
    }
}

fn position(live: &[QubitId], id: QubitId) -> Result<usize> {
    live.iter().position(|&q| q == id).ok_or_else(|| Error::Port(format!("qubit #{id} is not live")))
}

fn positions(live: &[QubitId], ids: &[QubitId]) -> Result<Vec<usize>> {
    ids.iter().map(|&id| position(live, id)).collect()
}

#[derive(Debug, Clone)]
pub struct TableauRegister {
    tableau: StabilizerTableau,
    live: Vec<QubitId>,
    next: QubitId,
}

impl Default for TableauRegister {
    fn default() -> Self {
        Self::new()
    }
}

impl TableauRegister {
    pub fn new() -> Self {
        TableauRegister { tableau: StabilizerTableau::empty(), live: Vec::new(), next: 0 }
    }

    pub fn tableau(&self) -> &StabilizerTableau {
        &self.tableau
    }

    /// Builds the register-wide Pauli with the given single-qubit factors.
    pub fn pauli_string(&self, ops: &[(QubitId, Pauli)]) -> Result<PauliString> {
        let mut p = PauliString::identity(self.live.len());
        for &(id, letter) in ops {
            p.set(position(&self.live, id)?, letter);
        }
        Ok(p)
    }

    /// `+1`, `-1` or `0` as in [`StabilizerTableau::expectation`].
    pub fn expectation(&self, ops: &[(QubitId, Pauli)]) -> Result<i8> {
        self.tableau.expectation(&self.pauli_string(ops)?)
    }
}

impl Register for TableauRegister {
    fn backend(&self) -> Backend {
        Backend::Tableau
    }

    fn alloc(&mut self, init: Alloc) -> Result<QubitId> {
        let Alloc::State(s) = init else {
            return Err(Error::Capability("non-stabilizer states on the tableau backend (use the oracle)".into()));
        };
        self.tableau.append_qubit(s);
        let id = self.next;
        self.next += 1;
        self.live.push(id);
        Ok(id)
    }

    fn clifford(&mut self, gate: CliffordGate, qubits: &[QubitId]) -> Result<()> {
        let pos = positions(&self.live, qubits)?;
        self.tableau.apply_clifford(gate, &pos)
    }

    fn measure(&mut self, qubit: QubitId, basis: Basis, outcomes: &mut OutcomeStream) -> Result<Measurement> {
        let pos = position(&self.live, qubit)?;
        let p = PauliString::single(self.live.len(), pos, basis.pauli());
        let m = self.tableau.measure_pauli(&p, outcomes)?;
        self.tableau.remove_qubit(pos)?;
        self.live.remove(pos);
        Ok(m)
    }

    fn live(&self) -> &[QubitId] {
        &self.live
    }

    fn dense_state(&self, order: &[QubitId]) -> Result<StateVector> {
        if order.len() != self.live.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} of {} live qubits requested",
                order.len(),
                self.live.len()
            )));
        }
        let dense =
            if self.live.is_empty() { StateVector::new_zero(0)? } else { StateVector::from_tableau(&self.tableau)? };
        dense.permuted(&positions(&self.live, order)?)
    }
}

#[derive(Debug, Clone)]
pub struct DenseRegister {
    state: StateVector,
    live: Vec<QubitId>,
    next: QubitId,
}

impl Default for DenseRegister {
    fn default() -> Self {
        Self::new()
    }
}

impl DenseRegister {
    pub fn new() -> Self {
        DenseRegister { state: StateVector::new_zero(0).expect("scalar state"), live: Vec::new(), next: 0 }
    }

    /// Register holding `state`, with qubit `k` of the state as id `k`.
    pub fn from_state(state: StateVector) -> Self {
        let n = state.num_qubits();
        DenseRegister { state, live: (0..n).collect(), next: n }
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Applies an arbitrary unitary, big-endian over `qubits`.
    pub fn apply_matrix(&mut self, m: &crate::dense::Matrix, qubits: &[QubitId]) -> Result<()> {
        let pos = positions(&self.live, qubits)?;
        self.state.apply_matrix(m, &pos)
    }

    /// Reads the state as a matrix over the given live qubits, as in
    /// [`StateVector::as_matrix`].
    pub fn as_matrix(&self, rows: &[QubitId], cols: &[QubitId]) -> Result<crate::dense::Matrix> {
        self.state.as_matrix(&positions(&self.live, rows)?, &positions(&self.live, cols)?)
    }
}

impl Register for DenseRegister {
    fn backend(&self) -> Backend {
        Backend::Oracle
    }

    fn alloc(&mut self, init: Alloc) -> Result<QubitId> {
        let v = match init {
            Alloc::State(s) => init_vector(s),
            Alloc::Magic => magic_vector(),
            Alloc::Amplitudes(v) => {
                let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
                if norm == 0.0 {
                    return Err(Error::ZeroProbability);
                }
                [v[0] / norm, v[1] / norm]
            }
        };
        self.state.push_qubit(v)?;
        let id = self.next;
        self.next += 1;
        self.live.push(id);
        Ok(id)
    }

    fn clifford(&mut self, gate: CliffordGate, qubits: &[QubitId]) -> Result<()> {
        let pos = positions(&self.live, qubits)?;
        self.state.apply_clifford(gate, &pos)
    }

    fn measure(&mut self, qubit: QubitId, basis: Basis, outcomes: &mut OutcomeStream) -> Result<Measurement> {
        let pos = position(&self.live, qubit)?;
        let m = self.state.measure(pos, basis, outcomes)?;
        self.state.discard(pos, basis_vector(basis, m.outcome))?;
        self.live.remove(pos);
        Ok(m)
    }

    fn live(&self) -> &[QubitId] {
        &self.live
    }

    fn dense_state(&self, order: &[QubitId]) -> Result<StateVector> {
        if order.len() != self.live.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} of {} live qubits requested",
                order.len(),
                self.live.len()
            )));
        }
        self.state.permuted(&positions(&self.live, order)?)
    }
}
