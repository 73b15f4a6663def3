use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{injection_branches, FrameLetter, Junction, JunctionKind, Netlist, Port};
use crate::transistor::TransistorSpec;

use super::circuit::{CircuitIR, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LadderKind {
    #[default]
    Honeycomb,
    Square,
}

/// Block sizes chosen by the compiler.
///
/// `scale` is the size multiplier `m` of every rule: H-wires measure
/// `2m - 1` sites, S-wires `3m`, square ladders `2(w+1)m + 1` columns and
/// honeycomb ladders `m*w + 1` steps. The defaults give minimal blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizePolicy {
    pub ladder: LadderKind,
    pub ladder_width: usize,
    pub scale: usize,
}

impl Default for SizePolicy {
    fn default() -> Self {
        SizePolicy { ladder: LadderKind::Honeycomb, ladder_width: 2, scale: 1 }
    }
}

impl SizePolicy {
    pub fn h_wire(&self) -> TransistorSpec {
        TransistorSpec::h_wire(2 * self.scale - 1)
    }

    pub fn s_wire(&self) -> TransistorSpec {
        TransistorSpec::s_wire(3 * self.scale)
    }

    pub fn ladder(&self) -> TransistorSpec {
        let (w, m) = (self.ladder_width, self.scale);
        match self.ladder {
            LadderKind::Square => TransistorSpec::square_cz(w, 2 * (w + 1) * m + 1),
            LadderKind::Honeycomb => TransistorSpec::honeycomb_cz(w, m * w + 1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale == 0 {
            return Err(Error::InvalidSize("size scale must be at least 1".into()));
        }
        for spec in [self.h_wire(), self.s_wire(), self.ladder()] {
            spec.validate_size()?;
        }
        Ok(())
    }
}

/// Live end of one logical qubit: the ports it may leave from (two after a
/// conditional selection) and the Pauli frame owed on each.
struct Wire {
    ends: Vec<(Port, Option<FrameLetter>)>,
}

struct Builder {
    net: Netlist,
    wires: Vec<Wire>,
    policy: SizePolicy,
}

impl Builder {
    fn feed(&mut self, q: usize, sink: Port) {
        for (src, frame) in std::mem::take(&mut self.wires[q].ends) {
            self.net.junctions.push(Junction::serial(src, sink, frame));
        }
    }

    fn wire(&mut self, q: usize, spec: TransistorSpec) {
        let b = self.net.add_block(spec);
        self.feed(q, Port::BlockIn(b, 0));
        self.wires[q].ends = vec![(Port::BlockOut(b, 0), None)];
    }

    fn pauli(&mut self, q: usize, letter: FrameLetter) {
        for end in &mut self.wires[q].ends {
            end.1 = FrameLetter::combine(end.1, Some(letter));
        }
    }

    fn cz(&mut self, a: usize, b: usize) {
        let block = self.net.add_block(self.policy.ladder());
        self.feed(a, Port::BlockIn(block, 0));
        self.feed(b, Port::BlockIn(block, 1));
        self.wires[a].ends = vec![(Port::BlockOut(block, 0), None)];
        self.wires[b].ends = vec![(Port::BlockOut(block, 1), None)];
    }

    fn inject(&mut self, q: usize, dagger: bool) {
        let magic = self.net.add_magic();
        let h_in = self.net.add_block(self.policy.h_wire());
        self.net.junctions.push(Junction {
            kind: JunctionKind::Injection,
            a: magic,
            b: vec![Port::BlockIn(h_in, 0)],
            frame: None,
            control: None,
            branches: Vec::new(),
        });
        let ladder = self.net.add_block(self.policy.ladder());
        self.feed(q, Port::BlockIn(ladder, 0));
        self.net.junctions.push(Junction::serial(Port::BlockOut(h_in, 0), Port::BlockIn(ladder, 1), None));
        let h_out = self.net.add_block(self.policy.h_wire());
        self.net.junctions.push(Junction::serial(Port::BlockOut(ladder, 1), Port::BlockIn(h_out, 0), None));
        let readout = self.net.add_readout();
        self.net.junctions.push(Junction::serial(Port::BlockOut(h_out, 0), readout, None));
        let Port::Readout(control) = readout else { unreachable!() };

        let (specs, frames) = injection_branches(dagger);
        let mut branches = Vec::new();
        let mut ends = Vec::new();
        for (specs, frame) in specs.iter().zip(frames) {
            let ids: Vec<usize> = specs.iter().map(|s| self.net.add_block(*s)).collect();
            for pair in ids.windows(2) {
                self.net.junctions.push(Junction::serial(Port::BlockOut(pair[0], 0), Port::BlockIn(pair[1], 0), None));
            }
            ends.push((
                Port::BlockOut(*ids.last().expect("nonempty branch"), 0),
                frame.and_then(FrameLetter::from_pauli),
            ));
            branches.push(ids);
        }
        self.net.junctions.push(Junction {
            kind: JunctionKind::ConditionalSelect,
            a: Port::BlockOut(ladder, 0),
            b: branches.iter().map(|ids| Port::BlockIn(ids[0], 0)).collect(),
            frame: None,
            control: Some(control),
            branches,
        });
        self.wires[q].ends = ends;
    }
}

/// Compiles a circuit into a netlist.
///
/// H is an H-wire. S is an S-wire (which applies `Q = HS`) followed by an
/// H-wire, since `H·Q = S`; S† adds a Z frame. CZ is a ladder and CX is a
/// ladder between H-wires on the target. Pauli gates only update frames
/// carried by the next junction. T and T† inject a magic state: an H-wire on
/// the magic qubit, a ladder with the data qubit, a second H-wire and a
/// readout whose value selects between an identity wire and an S chain.
pub fn compile(ir: &CircuitIR, policy: &SizePolicy) -> Result<Netlist> {
    policy.validate()?;
    let mut b = Builder {
        net: Netlist::new(ir.qubits),
        wires: (0..ir.qubits).map(|q| Wire { ends: vec![(Port::Input(q), None)] }).collect(),
        policy: *policy,
    };
    for gate in &ir.gates {
        let q = gate.qubits[0];
        match gate.kind {
            GateKind::H => b.wire(q, policy.h_wire()),
            GateKind::S => {
                b.wire(q, policy.s_wire());
                b.wire(q, policy.h_wire());
            }
            GateKind::Sdg => {
                b.wire(q, policy.s_wire());
                b.wire(q, policy.h_wire());
                b.pauli(q, FrameLetter::Z);
            }
            GateKind::X => b.pauli(q, FrameLetter::X),
            GateKind::Y => b.pauli(q, FrameLetter::Y),
            GateKind::Z => b.pauli(q, FrameLetter::Z),
            GateKind::CZ => b.cz(q, gate.qubits[1]),
            GateKind::CX => {
                let t = gate.qubits[1];
                b.wire(t, policy.h_wire());
                b.cz(q, t);
                b.wire(t, policy.h_wire());
            }
            GateKind::T => b.inject(q, false),
            GateKind::Tdg => b.inject(q, true),
        }
    }
    for q in 0..ir.qubits {
        b.feed(q, Port::Output(q));
    }
    b.net.validate()?;
    Ok(b.net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::parse_circuit;
    use crate::transistor::TransistorKind;

    #[test]
    fn single_gates() {
        let policy = SizePolicy::default();
        let n = compile(&parse_circuit("qubits 1\nH 0").unwrap(), &policy).unwrap();
        assert_eq!(n.blocks.len(), 1);
        assert_eq!(n.blocks[0].spec, TransistorSpec::h_wire(1));

        let n = compile(&parse_circuit("qubits 1\nZ 0").unwrap(), &policy).unwrap();
        assert!(n.blocks.is_empty());
        assert_eq!(n.junctions, vec![Junction::serial(Port::Input(0), Port::Output(0), Some(FrameLetter::Z))]);

        let n = compile(&parse_circuit("qubits 1\nT 0").unwrap(), &policy).unwrap();
        assert_eq!(n.magic_ports.len(), 1);
        let selects = n.junctions.iter().filter(|j| j.kind == JunctionKind::ConditionalSelect).count();
        assert_eq!(selects, 1);
        assert_eq!(n.blocks.len(), 6);
    }

    #[test]
    fn square_policy() {
        let policy = SizePolicy { ladder: LadderKind::Square, ..SizePolicy::default() };
        let n = compile(&parse_circuit("qubits 2\nCX 0 1").unwrap(), &policy).unwrap();
        let kinds: Vec<TransistorKind> = n.blocks.iter().map(|b| b.spec.kind).collect();
        assert_eq!(kinds, [TransistorKind::HWire, TransistorKind::SquareCZ, TransistorKind::HWire]);
        assert_eq!(n.blocks[1].spec, TransistorSpec::square_cz(2, 7));
    }

    #[test]
    fn policy_scale() {
        let policy = SizePolicy { scale: 2, ladder_width: 4, ..SizePolicy::default() };
        policy.validate().unwrap();
        assert_eq!(policy.h_wire(), TransistorSpec::h_wire(3));
        assert_eq!(policy.ladder(), TransistorSpec::honeycomb_cz(4, 9));
        assert!(SizePolicy { scale: 0, ..policy }.validate().is_err());
        assert!(SizePolicy { ladder_width: 3, ..policy }.validate().is_err());
    }
}
