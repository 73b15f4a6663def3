//! Building and measuring gate blocks on a register.
//!
//! Every block is driven in three phases: `prepare` allocates the bulk
//! resource state, `couple` entangles it with the incoming logical qubits by
//! CZ, and `measure` performs the X-basis bulk measurement, leaving the
//! outputs on the last sites. Ladder columns are allocated one column ahead
//! of their measurement; the omitted orderings only reorder commuting
//! operations.

use crate::dense::LogicalMap;
use crate::error::{Error, Result};
use crate::outcome::{Measurement, OutcomePolicy, OutcomeStream};
use crate::pauli::{Basis, CliffordGate};
use crate::register::{DenseRegister, QubitId, Register};
use crate::tableau::InitState;

use super::frame::{ByproductFrame, FrameTable};
use super::{TransistorKind, TransistorSpec};

#[derive(Debug, Clone)]
pub struct PreparedBlock {
    spec: TransistorSpec,
    inputs: Option<Vec<QubitId>>,
    layout: Layout,
}

#[derive(Debug, Clone)]
enum Layout {
    /// Sites 2..=L+1 of the chain.
    Wire(Vec<QubitId>),
    /// Middle rows of the input column and the first bulk column.
    Ladder { input_middle: Vec<QubitId>, second: Vec<QubitId> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockRun {
    pub outputs: Vec<QubitId>,
    /// Outcome bits in measurement order, input side first.
    pub outcomes: Vec<bool>,
    pub measurements: Vec<Measurement>,
    /// Sublattice parities the frame depends on: for wires one entry per
    /// index class (`[even, odd]` for H, `[k≡1, k≡2, k≡0 mod 3]` for S),
    /// for the two-row honeycomb `[a_odd, a_even, b_odd, b_even]` per leg.
    pub parities: Vec<bool>,
    pub frame: ByproductFrame,
}

fn cz(reg: &mut dyn Register, a: QubitId, b: QubitId) -> Result<()> {
    reg.clifford(CliffordGate::CZ, &[a, b])
}

/// 0-based row pairs carrying rungs in 1-based column `c`.
fn rungs(spec: &TransistorSpec, c: usize) -> Vec<(usize, usize)> {
    let w = spec.width;
    match spec.kind {
        TransistorKind::SquareCZ => (0..w - 1).map(|r| (r, r + 1)).collect(),
        TransistorKind::HoneycombCZ if c == 1 => Vec::new(),
        TransistorKind::HoneycombCZ if c.is_multiple_of(2) => (1..w - 1).step_by(2).map(|r| (r, r + 1)).collect(),
        TransistorKind::HoneycombCZ => (0..w - 1).step_by(2).map(|r| (r, r + 1)).collect(),
        _ => Vec::new(),
    }
}

fn alloc_column(
    reg: &mut dyn Register,
    spec: &TransistorSpec,
    c: usize,
    prev: Option<&[QubitId]>,
) -> Result<Vec<QubitId>> {
    let col = reg.alloc_many(InitState::Plus.into(), spec.width)?;
    for (r, s) in rungs(spec, c) {
        cz(reg, col[r], col[s])?;
    }
    if let Some(prev) = prev {
        for (&a, &b) in prev.iter().zip(&col) {
            cz(reg, a, b)?;
        }
    }
    Ok(col)
}

/// Allocates the block's resource state.
pub fn prepare(spec: &TransistorSpec, reg: &mut dyn Register) -> Result<PreparedBlock> {
    spec.validate_size()?;
    let layout = match spec.kind {
        TransistorKind::HWire | TransistorKind::SWire => {
            let sites = reg.alloc_many(InitState::Plus.into(), spec.measured_length)?;
            for pair in sites.windows(2) {
                cz(reg, pair[0], pair[1])?;
            }
            if spec.kind == TransistorKind::SWire {
                for &s in &sites {
                    reg.clifford(CliffordGate::S, &[s])?;
                }
            }
            Layout::Wire(sites)
        }
        TransistorKind::SquareCZ | TransistorKind::HoneycombCZ => {
            let w = spec.width;
            let init = if spec.kind == TransistorKind::SquareCZ { InitState::Plus } else { InitState::Zero };
            let input_middle = reg.alloc_many(init.into(), w - 2)?;
            if spec.kind == TransistorKind::SquareCZ {
                for pair in input_middle.windows(2) {
                    cz(reg, pair[0], pair[1])?;
                }
            }
            let second = alloc_column(reg, spec, 2, None)?;
            for (r, &m) in input_middle.iter().enumerate() {
                cz(reg, m, second[r + 1])?;
            }
            Layout::Ladder { input_middle, second }
        }
    };
    Ok(PreparedBlock { spec: *spec, inputs: None, layout })
}

impl PreparedBlock {
    pub fn spec(&self) -> &TransistorSpec {
        &self.spec
    }

    /// Qubits coupled to the input edge; empty before coupling.
    pub fn inputs(&self) -> &[QubitId] {
        self.inputs.as_deref().unwrap_or(&[])
    }

    /// Every qubit the block has allocated so far.
    pub fn qubits(&self) -> Vec<QubitId> {
        match &self.layout {
            Layout::Wire(sites) => sites.clone(),
            Layout::Ladder { input_middle, second } => input_middle.iter().chain(second).copied().collect(),
        }
    }

    /// CZ-couples the incoming logical qubits to the block's input edge.
    pub fn couple(&mut self, reg: &mut dyn Register, inputs: &[QubitId]) -> Result<()> {
        if self.inputs.is_some() {
            return Err(Error::Port(format!("{} block is already coupled", self.spec.kind.name())));
        }
        if inputs.len() != self.spec.ports() {
            return Err(Error::Port(format!(
                "{} block takes {} input(s), got {}",
                self.spec.kind.name(),
                self.spec.ports(),
                inputs.len()
            )));
        }
        match &self.layout {
            Layout::Wire(sites) => cz(reg, inputs[0], sites[0])?,
            Layout::Ladder { input_middle, second } => {
                let (a, b) = (inputs[0], inputs[1]);
                cz(reg, a, second[0])?;
                cz(reg, b, second[self.spec.width - 1])?;
                if self.spec.kind == TransistorKind::SquareCZ {
                    match (input_middle.first(), input_middle.last()) {
                        (Some(&first), Some(&last)) => {
                            cz(reg, a, first)?;
                            cz(reg, last, b)?;
                        }
                        _ => cz(reg, a, b)?,
                    }
                }
            }
        }
        self.inputs = Some(inputs.to_vec());
        Ok(())
    }

    /// Performs the bulk measurement and returns the outputs with their
    /// byproduct frame.
    pub fn measure(self, reg: &mut dyn Register, outcomes: &mut OutcomeStream) -> Result<BlockRun> {
        let spec = self.spec;
        let (outputs, measurements) = self.measure_unframed(reg, outcomes)?;
        let bits: Vec<bool> = measurements.iter().map(|m| m.outcome).collect();
        let frame = FrameTable::cached(&spec)?.frame(&bits)?;
        Ok(BlockRun { outputs, parities: parities(&spec, &bits), outcomes: bits, measurements, frame })
    }

    fn measure_unframed(
        self,
        reg: &mut dyn Register,
        outcomes: &mut OutcomeStream,
    ) -> Result<(Vec<QubitId>, Vec<Measurement>)> {
        let inputs = self
            .inputs
            .ok_or_else(|| Error::Port(format!("{} block measured before coupling", self.spec.kind.name())))?;
        let mut measurements = Vec::with_capacity(self.spec.outcome_count());
        let mut x_measure = |reg: &mut dyn Register, q: QubitId| -> Result<()> {
            measurements.push(reg.measure(q, Basis::X, outcomes)?);
            Ok(())
        };
        let outputs = match self.layout {
            Layout::Wire(sites) => {
                let chain: Vec<QubitId> = inputs.iter().chain(&sites).copied().collect();
                let (measured, out) = chain.split_at(chain.len() - 1);
                if self.spec.kind == TransistorKind::SWire {
                    reg.clifford(CliffordGate::S, &[inputs[0]])?;
                }
                for &q in measured {
                    x_measure(reg, q)?;
                }
                if self.spec.kind == TransistorKind::SWire {
                    reg.clifford(CliffordGate::H, &[out[0]])?;
                }
                out.to_vec()
            }
            Layout::Ladder { input_middle, second } => {
                let w = self.spec.width;
                let columns = match self.spec.kind {
                    TransistorKind::SquareCZ => self.spec.measured_length,
                    _ => 2 * self.spec.measured_length + 1,
                };
                let mut current: Vec<QubitId> =
                    std::iter::once(inputs[0]).chain(input_middle).chain(std::iter::once(inputs[1])).collect();
                let mut next = second;
                for c in 1..columns {
                    if c > 1 {
                        let fresh = alloc_column(reg, &self.spec, c + 1, Some(&next))?;
                        current = std::mem::replace(&mut next, fresh);
                    }
                    for &q in &current {
                        x_measure(reg, q)?;
                    }
                }
                // `next` now holds the output column.
                for &q in &next[1..w - 1] {
                    x_measure(reg, q)?;
                }
                vec![next[0], next[w - 1]]
            }
        };
        if measurements.iter().any(|m| !m.random) {
            return Err(Error::Capability(format!(
                "{} block produced a deterministic bulk outcome; the input edge is not a valid port state",
                self.spec.kind.name()
            )));
        }
        Ok((outputs, measurements))
    }

    /// Decouples an unused block by measuring all its qubits in the Z basis.
    pub fn discard(self, reg: &mut dyn Register, outcomes: &mut OutcomeStream) -> Result<Vec<Measurement>> {
        self.qubits().into_iter().map(|q| reg.measure(q, Basis::Z, outcomes)).collect()
    }
}

/// Sublattice parities of an outcome record, see [`BlockRun::parities`].
pub fn parities(spec: &TransistorSpec, bits: &[bool]) -> Vec<bool> {
    let class_parity = |classes: usize, class_of: &dyn Fn(usize) -> usize| {
        let mut p = vec![false; classes];
        for (k, &b) in bits.iter().enumerate() {
            p[class_of(k + 1)] ^= b;
        }
        p
    };
    match spec.kind {
        TransistorKind::HWire => class_parity(2, &|k| k % 2),
        TransistorKind::SWire => class_parity(3, &|k| (k + 2) % 3),
        TransistorKind::HoneycombCZ if spec.width == 2 => {
            // Column c (1-based) holds a_c at 2(c-1) and b_c at 2(c-1)+1.
            class_parity(4, &|k| {
                let (c, leg) = ((k - 1) / 2 + 1, (k - 1) % 2);
                2 * leg + (c + 1) % 2
            })
        }
        _ => Vec::new(),
    }
}

/// Runs the whole block on already-live input qubits.
pub fn execute(
    spec: &TransistorSpec,
    reg: &mut dyn Register,
    inputs: &[QubitId],
    outcomes: &mut OutcomeStream,
) -> Result<BlockRun> {
    let mut block = prepare(spec, reg)?;
    block.couple(reg, inputs)?;
    block.measure(reg, outcomes)
}

pub(crate) fn execute_unframed(
    spec: &TransistorSpec,
    reg: &mut dyn Register,
    inputs: &[QubitId],
    outcomes: &mut OutcomeStream,
) -> Result<Vec<QubitId>> {
    let mut block = prepare(spec, reg)?;
    block.couple(reg, inputs)?;
    Ok(block.measure_unframed(reg, outcomes)?.0)
}

/// Map from input to output ports induced by one outcome branch, read off
/// the block's Choi state: every input is half of a Bell pair with a
/// reference qubit, and the final (reference, output) amplitudes are the
/// matrix entries.
pub fn logical_map_of_branch(spec: &TransistorSpec, outcomes: &[bool]) -> Result<LogicalMap> {
    spec.validate_size()?;
    if outcomes.len() != spec.outcome_count() {
        return Err(Error::OutcomeLength { expected: spec.outcome_count(), got: outcomes.len() });
    }
    let mut reg = DenseRegister::new();
    let mut refs = Vec::new();
    let mut inputs = Vec::new();
    for _ in 0..spec.ports() {
        let r = reg.alloc(InitState::Plus.into())?;
        let i = reg.alloc(InitState::Zero.into())?;
        reg.clifford(CliffordGate::CX, &[r, i])?;
        refs.push(r);
        inputs.push(i);
    }
    let mut stream = OutcomePolicy::Forced(outcomes.to_vec()).stream();
    let run = execute(spec, &mut reg, &inputs, &mut stream)?;
    stream.finish()?;
    Ok(LogicalMap::new(reg.as_matrix(&run.outputs, &refs)?))
}
