use std::collections::{HashMap, HashSet};
use std::fmt;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::dense::StateVector;
use crate::error::{Error, Result};
use crate::outcome::{Measurement, OutcomePolicy, OutcomeStream};
use crate::pauli::{Basis, CliffordGate, Pauli, PauliString};
use crate::register::{new_register, Alloc, Backend, DenseRegister, QubitId, Register};
use crate::tableau::InitState;
use crate::transistor::{prepare, BlockRun, ByproductFrame, NominalGate, PreparedBlock, TransistorSpec};

use super::{JunctionKind, Netlist, Node, Port};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    PrepareBlock,
    Couple,
    MeasureBulk,
    Inject,
    CorrectFrame,
    Readout,
    /// Z-basis measurement of an unselected branch.
    Decouple,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Action::PrepareBlock => "prepare-block",
            Action::Couple => "couple",
            Action::MeasureBulk => "measure-bulk",
            Action::Inject => "inject",
            Action::CorrectFrame => "correct-frame",
            Action::Readout => "readout",
            Action::Decouple => "decouple",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleStep {
    pub ordinal: usize,
    pub action: Action,
    pub operands: Vec<String>,
}

/// Where a frame came from during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrameOrigin {
    Block(usize),
    Junction(usize),
    /// Back-action of decoupling the unselected branch of a junction.
    Decouple(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameEvent {
    pub origin: FrameOrigin,
    pub frame: ByproductFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrectionMode {
    /// Each frame is applied to the qubits as soon as it is known.
    #[default]
    OnSite,
    /// Frames are tracked symbolically through the nominal gates and applied
    /// once at the outputs. Clifford netlists only.
    EndPropagated,
}

#[derive(Debug, Clone)]
pub enum RunInputs {
    /// Computational basis state, one bit per logical qubit.
    Bits(Vec<bool>),
    /// `|+⟩` on every logical qubit.
    Plus,
    /// Arbitrary single-qubit states (oracle only).
    Product(Vec<[C64; 2]>),
    /// Arbitrary joint state, qubit `k` = logical qubit `k` (oracle only).
    State(StateVector),
}

impl RunInputs {
    fn len(&self) -> usize {
        match self {
            RunInputs::Bits(b) => b.len(),
            RunInputs::Plus => usize::MAX,
            RunInputs::Product(v) => v.len(),
            RunInputs::State(s) => s.num_qubits(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub backend: Backend,
    pub policy: OutcomePolicy,
    pub mode: CorrectionMode,
}

impl RunOptions {
    pub fn new(backend: Backend, policy: OutcomePolicy) -> Self {
        RunOptions { backend, policy, mode: CorrectionMode::OnSite }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Corrected logical output state, qubit `k` = `out:k`.
    pub state: StateVector,
    pub frames: Vec<FrameEvent>,
    /// Every measurement in execution order.
    pub log: Vec<Measurement>,
    pub readouts: Vec<bool>,
    pub schedule: Vec<ScheduleStep>,
}

impl RunOutput {
    /// Random outcome bits in consumption order; replaying them as a forced
    /// policy reproduces the run.
    pub fn outcome_bits(&self) -> Vec<bool> {
        self.log.iter().filter(|m| m.random).map(|m| m.outcome).collect()
    }
}

/// Couples an output qubit to the input edge of a prepared block. The
/// junction is a CZ, which turns the edge stabilizers of both sides into
/// bulk three-body terms.
pub fn couple_serial(reg: &mut dyn Register, outputs: &[QubitId], block: &mut PreparedBlock) -> Result<()> {
    block.couple(reg, outputs)
}

fn correct(reg: &mut dyn Register, run: &BlockRun) -> Result<()> {
    for (k, &q) in run.outputs.iter().enumerate() {
        reg.pauli(q, run.frame.port(k))?;
    }
    Ok(())
}

/// Fans `data` out to the entries of both prepared branches, then decouples
/// the unselected one by measuring all its qubits in the Z basis. Returns
/// the selected branch, the decoupling measurements and the Z back-action
/// bit on `data`, which has not yet been corrected.
fn fan_out(
    reg: &mut dyn Register,
    data: QubitId,
    mut branches: [Vec<PreparedBlock>; 2],
    choice: usize,
    stream: &mut OutcomeStream,
) -> Result<(Vec<PreparedBlock>, Vec<Measurement>, bool)> {
    if choice > 1 {
        return Err(Error::Port(format!("invalid branch {choice} for a two-way selection")));
    }
    for branch in branches.iter_mut() {
        let entry = branch.first_mut().ok_or_else(|| Error::Port("empty branch".into()))?;
        if entry.spec().ports() != 1 {
            return Err(Error::Port("branch entries must be wires".into()));
        }
        entry.couple(reg, &[data])?;
    }
    let [a, b] = branches;
    let (chosen, dropped) = if choice == 0 { (a, b) } else { (b, a) };
    let mut decouple = Vec::new();
    for block in dropped {
        decouple.extend(block.discard(reg, stream)?);
    }
    // The entry site is the only dropped qubit joined to `data`.
    let back_action = decouple.first().is_some_and(|m| m.outcome);
    Ok((chosen, decouple, back_action))
}

#[derive(Debug, Clone)]
pub struct SelectRun {
    pub output: QubitId,
    pub decouple: Vec<Measurement>,
    pub runs: Vec<BlockRun>,
}

/// Runs one of two alternative wire chains on `data`, chosen by `choice`,
/// with frames corrected on site. `frames[c]` is applied after branch `c`.
pub fn conditional_select(
    reg: &mut dyn Register,
    data: QubitId,
    branches: [&[TransistorSpec]; 2],
    frames: [Option<Pauli>; 2],
    choice: usize,
    stream: &mut OutcomeStream,
) -> Result<SelectRun> {
    let prepared = [prepare_all(reg, branches[0])?, prepare_all(reg, branches[1])?];
    let (chosen, decouple, back_action) = fan_out(reg, data, prepared, choice, stream)?;
    if back_action {
        reg.pauli(data, Pauli::Z)?;
    }
    let mut q = data;
    let mut runs = Vec::new();
    for (k, mut block) in chosen.into_iter().enumerate() {
        if k > 0 {
            couple_serial(reg, &[q], &mut block)?;
        }
        let run = block.measure(reg, stream)?;
        correct(reg, &run)?;
        q = run.outputs[0];
        runs.push(run);
    }
    if let Some(p) = frames[choice] {
        reg.pauli(q, p)?;
    }
    Ok(SelectRun { output: q, decouple, runs })
}

fn prepare_all(reg: &mut dyn Register, specs: &[TransistorSpec]) -> Result<Vec<PreparedBlock>> {
    specs.iter().map(|s| prepare(s, reg)).collect()
}

#[derive(Debug, Clone)]
pub struct InjectionRun {
    pub output: QubitId,
    /// Z readout of the magic qubit.
    pub outcome: bool,
    /// Whether the S correction branch was taken.
    pub conditional: bool,
}

/// Branches of the S correction after the magic readout: `[on 0, on 1]`.
pub(crate) fn injection_branches(dagger: bool) -> ([Vec<TransistorSpec>; 2], [Option<Pauli>; 2]) {
    let identity = vec![TransistorSpec::identity_wire(2)];
    let s = vec![TransistorSpec::s_wire(3), TransistorSpec::h_wire(1)];
    if dagger {
        // Outcome 0 leaves T|ψ⟩, so T† needs S† = S·Z.
        ([s, identity], [Some(Pauli::Z), None])
    } else {
        ([identity, s], [None, None])
    }
}

/// Applies `T` (or `T†`) to `data` by consuming the magic qubit `magic`,
/// which must hold `T|+⟩`. The CX from data to magic is an H-wire, a CZ
/// ladder and another H-wire on the magic side, and the S correction is a
/// conditional selection between an identity wire and an S chain.
pub fn inject_t(
    reg: &mut dyn Register,
    data: QubitId,
    magic: QubitId,
    dagger: bool,
    ladder: &TransistorSpec,
    stream: &mut OutcomeStream,
) -> Result<InjectionRun> {
    if reg.backend() == Backend::Tableau {
        return Err(Error::Capability("magic-state injection on the tableau backend (use the oracle)".into()));
    }
    let run = crate::transistor::execute(&TransistorSpec::h_wire(1), reg, &[magic], stream)?;
    correct(reg, &run)?;
    let run = crate::transistor::execute(ladder, reg, &[data, run.outputs[0]], stream)?;
    correct(reg, &run)?;
    let (data, m) = (run.outputs[0], run.outputs[1]);
    let run = crate::transistor::execute(&TransistorSpec::h_wire(1), reg, &[m], stream)?;
    correct(reg, &run)?;
    let outcome = reg.measure(run.outputs[0], Basis::Z, stream)?.outcome;
    let (branches, frames) = injection_branches(dagger);
    let choice = usize::from(outcome);
    let sel = conditional_select(reg, data, [&branches[0], &branches[1]], frames, choice, stream)?;
    let conditional = branches[choice].len() > 1;
    Ok(InjectionRun { output: sel.output, outcome, conditional })
}

fn letter_mul(a: Pauli, b: Pauli) -> Pauli {
    let ((ax, az), (bx, bz)) = (a.bits(), b.bits());
    Pauli::from_bits(ax ^ bx, az ^ bz)
}

/// Image of a frame on a block's inputs after its nominal gate.
fn propagate(gate: NominalGate, letters: &[Pauli]) -> Result<Vec<Pauli>> {
    let ops: Vec<(usize, Pauli)> = letters.iter().copied().enumerate().collect();
    let mut p = PauliString::from_sparse(letters.len(), &ops);
    match gate {
        NominalGate::Identity => {}
        NominalGate::H => p.conjugate(CliffordGate::H, &[0])?,
        NominalGate::Q => {
            p.conjugate(CliffordGate::S, &[0])?;
            p.conjugate(CliffordGate::H, &[0])?;
        }
        NominalGate::CZ => p.conjugate(CliffordGate::CZ, &[0, 1])?,
    }
    Ok((0..letters.len()).map(|k| p.get(k)).collect())
}

struct Executor<'a> {
    net: &'a Netlist,
    reg: Box<dyn Register>,
    stream: OutcomeStream,
    mode: CorrectionMode,
    carriers: HashMap<Port, QubitId>,
    pending: HashMap<QubitId, Pauli>,
    prepared: HashMap<usize, PreparedBlock>,
    coupled: HashSet<usize>,
    dropped: HashSet<usize>,
    readouts: Vec<Option<bool>>,
    feeds: HashMap<Port, Vec<usize>>,
    entry_of: HashMap<usize, usize>,
    schedule: Vec<ScheduleStep>,
    frames: Vec<FrameEvent>,
}

impl Executor<'_> {
    fn step(&mut self, action: Action, operands: Vec<String>) {
        let ordinal = self.schedule.len();
        self.schedule.push(ScheduleStep { ordinal, action, operands });
    }

    fn apply_frame(&mut self, q: QubitId, p: Pauli, origin: FrameOrigin) -> Result<()> {
        if p == Pauli::I {
            return Ok(());
        }
        match self.mode {
            CorrectionMode::OnSite => {
                self.reg.pauli(q, p)?;
                self.step(Action::CorrectFrame, vec![format!("{origin:?}"), format!("q{q}"), p.letter().to_string()]);
            }
            CorrectionMode::EndPropagated => {
                let cur = self.pending.remove(&q).unwrap_or(Pauli::I);
                self.pending.insert(q, letter_mul(cur, p));
            }
        }
        Ok(())
    }

    /// Live qubit arriving at `sink`, with the junction frame applied.
    fn take(&mut self, sink: Port) -> Result<QubitId> {
        let feeds = self.feeds.get(&sink).cloned().unwrap_or_default();
        for j in feeds {
            let junction = &self.net.junctions[j];
            let source = junction.a;
            let q = match source {
                Port::Magic(_) => {
                    let q = self.reg.alloc(Alloc::Magic)?;
                    self.step(Action::Inject, vec![source.to_string(), sink.to_string()]);
                    q
                }
                _ => match self.carriers.remove(&source) {
                    Some(q) => q,
                    None => continue,
                },
            };
            if let Some(l) = junction.frame {
                self.apply_frame(q, l.pauli(), FrameOrigin::Junction(j))?;
                self.frames.push(FrameEvent {
                    origin: FrameOrigin::Junction(j),
                    frame: ByproductFrame::from_letters(&[l.pauli()]),
                });
            }
            return Ok(q);
        }
        Err(Error::Netlist(format!("nothing arrives at {sink}")))
    }

    fn run_block(&mut self, b: usize) -> Result<()> {
        let spec = self.net.blocks[b].spec;
        if !self.prepared.contains_key(&b) {
            let block = prepare(&spec, self.reg.as_mut())?;
            self.step(Action::PrepareBlock, vec![format!("b{b}")]);
            self.prepared.insert(b, block);
        }
        let mut block = self.prepared.remove(&b).expect("prepared above");
        let inputs: Vec<QubitId> = if self.coupled.contains(&b) {
            block.inputs().to_vec()
        } else {
            let inputs = (0..spec.ports()).map(|k| self.take(Port::BlockIn(b, k))).collect::<Result<Vec<_>>>()?;
            couple_serial(self.reg.as_mut(), &inputs, &mut block)?;
            let ops = inputs.iter().enumerate().map(|(k, q)| format!("q{q}->b{b}.in{k}")).collect();
            self.step(Action::Couple, ops);
            inputs
        };
        let run = block.measure(self.reg.as_mut(), &mut self.stream)?;
        self.step(Action::MeasureBulk, vec![format!("b{b}"), format!("{} outcomes", run.outcomes.len())]);
        if self.mode == CorrectionMode::EndPropagated {
            let before: Vec<Pauli> = inputs.iter().map(|q| self.pending.remove(q).unwrap_or(Pauli::I)).collect();
            for (k, p) in propagate(spec.nominal_clifford(), &before)?.into_iter().enumerate() {
                self.pending.insert(run.outputs[k], p);
            }
        }
        for (k, &q) in run.outputs.iter().enumerate() {
            self.apply_frame(q, run.frame.port(k), FrameOrigin::Block(b))?;
            self.carriers.insert(Port::BlockOut(b, k), q);
        }
        self.frames.push(FrameEvent { origin: FrameOrigin::Block(b), frame: run.frame });
        Ok(())
    }

    fn fire_select(&mut self, j: usize) -> Result<()> {
        let junction = &self.net.junctions[j];
        let control = junction.control.expect("validated select");
        let choice = self.readouts[control]
            .ok_or_else(|| Error::Netlist(format!("readout:{control} is read before it is measured")))?;
        let data = self.take_select_source(j)?;
        let mut prepared: [Vec<PreparedBlock>; 2] = [Vec::new(), Vec::new()];
        for (c, branch) in junction.branches.iter().enumerate() {
            for &b in branch {
                prepared[c].push(prepare(&self.net.blocks[b].spec, self.reg.as_mut())?);
                self.step(Action::PrepareBlock, vec![format!("b{b}")]);
            }
        }
        let choice = usize::from(choice);
        let (chosen, decouple, back_action) = fan_out(self.reg.as_mut(), data, prepared, choice, &mut self.stream)?;
        for branch in &junction.branches {
            self.step(Action::Couple, vec![format!("q{data}->b{}.in0", branch[0])]);
        }
        for &b in &junction.branches[1 - choice] {
            self.dropped.insert(b);
            self.step(Action::Decouple, vec![format!("b{b}")]);
        }
        debug_assert!(!decouple.is_empty());
        if back_action {
            self.apply_frame(data, Pauli::Z, FrameOrigin::Decouple(j))?;
            self.frames.push(FrameEvent {
                origin: FrameOrigin::Decouple(j),
                frame: ByproductFrame::from_letters(&[Pauli::Z]),
            });
        }
        for (block, &b) in chosen.into_iter().zip(&junction.branches[choice]) {
            self.prepared.insert(b, block);
        }
        self.coupled.insert(junction.branches[choice][0]);
        Ok(())
    }

    fn take_select_source(&mut self, j: usize) -> Result<QubitId> {
        let junction = &self.net.junctions[j];
        let q = self
            .carriers
            .remove(&junction.a)
            .ok_or_else(|| Error::Netlist(format!("{} is not live at its selection", junction.a)))?;
        if let Some(l) = junction.frame {
            self.apply_frame(q, l.pauli(), FrameOrigin::Junction(j))?;
            self.frames.push(FrameEvent {
                origin: FrameOrigin::Junction(j),
                frame: ByproductFrame::from_letters(&[l.pauli()]),
            });
        }
        Ok(q)
    }

    fn readout(&mut self, r: usize) -> Result<()> {
        let q = self.take(Port::Readout(r))?;
        let pending = self.pending.remove(&q).unwrap_or(Pauli::I);
        let m = self.reg.measure(q, Basis::Z, &mut self.stream)?;
        let value = m.outcome ^ pending.bits().0;
        self.step(Action::Readout, vec![format!("readout:{r}"), u8::from(value).to_string()]);
        self.readouts[r] = Some(value);
        Ok(())
    }
}

fn allocate_inputs(net: &Netlist, inputs: &RunInputs, backend: Backend) -> Result<Box<dyn Register>> {
    if inputs.len() != usize::MAX && inputs.len() != net.qubits {
        return Err(Error::Netlist(format!("netlist has {} logical inputs, got {}", net.qubits, inputs.len())));
    }
    if backend == Backend::Tableau && matches!(inputs, RunInputs::Product(_) | RunInputs::State(_)) {
        return Err(Error::Capability("arbitrary input states on the tableau backend (use the oracle)".into()));
    }
    if let RunInputs::State(s) = inputs {
        return Ok(Box::new(DenseRegister::from_state(s.clone())));
    }
    let mut reg = new_register(backend);
    for q in 0..net.qubits {
        let init = match inputs {
            RunInputs::Bits(b) => Alloc::State(if b[q] { InitState::One } else { InitState::Zero }),
            RunInputs::Plus => Alloc::State(InitState::Plus),
            RunInputs::Product(v) => Alloc::Amplitudes(v[q]),
            RunInputs::State(_) => unreachable!(),
        };
        reg.alloc(init)?;
    }
    Ok(reg)
}

/// Executes a validated netlist in topological order.
pub fn run_netlist(net: &Netlist, inputs: &RunInputs, options: &RunOptions) -> Result<RunOutput> {
    net.validate()?;
    if net.has_magic() && options.backend == Backend::Tableau {
        return Err(Error::Capability("T injection on the tableau backend (run with the oracle backend)".into()));
    }
    let has_select = net.junctions.iter().any(|j| j.kind == JunctionKind::ConditionalSelect);
    if options.mode == CorrectionMode::EndPropagated && (net.has_magic() || has_select) {
        return Err(Error::Capability("end-propagated frames for non-Clifford netlists".into()));
    }
    if let OutcomePolicy::Forced(bits) = &options.policy {
        let expected = net.random_event_count();
        if bits.len() != expected {
            return Err(Error::OutcomeLength { expected, got: bits.len() });
        }
    }
    let order = net.execution_order()?;
    let reg = allocate_inputs(net, inputs, options.backend)?;
    let mut feeds: HashMap<Port, Vec<usize>> = HashMap::new();
    let mut entry_of = HashMap::new();
    for (i, j) in net.junctions.iter().enumerate() {
        if j.kind == JunctionKind::ConditionalSelect {
            for branch in &j.branches {
                entry_of.insert(branch[0], i);
            }
        } else {
            feeds.entry(j.b[0]).or_default().push(i);
        }
    }
    let mut ex = Executor {
        net,
        reg,
        stream: options.policy.stream(),
        mode: options.mode,
        carriers: (0..net.qubits).map(|q| (Port::Input(q), q)).collect(),
        pending: HashMap::new(),
        prepared: HashMap::new(),
        coupled: HashSet::new(),
        dropped: HashSet::new(),
        readouts: vec![None; net.readouts.len()],
        feeds,
        entry_of,
        schedule: Vec::new(),
        frames: Vec::new(),
    };
    let mut fired = HashSet::new();
    for node in order {
        match node {
            Node::Block(b) => {
                if let Some(&j) = ex.entry_of.get(&b) {
                    if fired.insert(j) {
                        ex.fire_select(j)?;
                    }
                }
                if !ex.dropped.contains(&b) {
                    ex.run_block(b)?;
                }
            }
            Node::Readout(r) => ex.readout(r)?,
            Node::Output(_) => {}
        }
    }
    let outputs = (0..net.qubits).map(|q| ex.take(Port::Output(q))).collect::<Result<Vec<_>>>()?;
    for &q in &outputs {
        if let Some(p) = ex.pending.remove(&q) {
            if p != Pauli::I {
                ex.reg.pauli(q, p)?;
                ex.step(Action::CorrectFrame, vec!["output".into(), format!("q{q}"), p.letter().to_string()]);
            }
        }
    }
    if ex.reg.live().len() != outputs.len() {
        return Err(Error::Netlist(format!("{} qubit(s) left unmeasured", ex.reg.live().len() - outputs.len())));
    }
    ex.stream.finish()?;
    let state = ex.reg.dense_state(&outputs)?;
    Ok(RunOutput {
        state,
        frames: ex.frames,
        log: ex.stream.log().to_vec(),
        readouts: ex.readouts.into_iter().map(|r| r.unwrap_or(false)).collect(),
        schedule: ex.schedule,
    })
}
