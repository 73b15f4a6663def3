//! Networks of gate blocks joined by junctions, and their execution.

mod exec;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::transistor::{TransistorKind, TransistorSpec};

pub use exec::{
    conditional_select, couple_serial, inject_t, run_netlist, Action, CorrectionMode, FrameEvent, FrameOrigin,
    InjectionRun, RunInputs, RunOptions, RunOutput, ScheduleStep, SelectRun,
};

pub(crate) use exec::injection_branches;

pub const NETLIST_SCHEMA: &str = "telesistor-netlist v1";

/// Named attachment point in a netlist.
///
/// Text forms: `in:Q`, `out:Q`, `magic:M`, `readout:R`, `bB.inK`, `bB.outK`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Port {
    Input(usize),
    Output(usize),
    Magic(usize),
    Readout(usize),
    BlockIn(usize, usize),
    BlockOut(usize, usize),
}

impl Port {
    /// Ports that produce a logical qubit.
    pub fn is_source(self) -> bool {
        matches!(self, Port::Input(_) | Port::Magic(_) | Port::BlockOut(..))
    }

    pub fn is_sink(self) -> bool {
        !self.is_source()
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Port::Input(q) => write!(f, "in:{q}"),
            Port::Output(q) => write!(f, "out:{q}"),
            Port::Magic(m) => write!(f, "magic:{m}"),
            Port::Readout(r) => write!(f, "readout:{r}"),
            Port::BlockIn(b, k) => write!(f, "b{b}.in{k}"),
            Port::BlockOut(b, k) => write!(f, "b{b}.out{k}"),
        }
    }
}

impl FromStr for Port {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("invalid port '{s}'");
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        if let Some((head, n)) = s.split_once(':') {
            let n = num(n)?;
            return match head {
                "in" => Ok(Port::Input(n)),
                "out" => Ok(Port::Output(n)),
                "magic" => Ok(Port::Magic(n)),
                "readout" => Ok(Port::Readout(n)),
                _ => Err(bad()),
            };
        }
        let rest = s.strip_prefix('b').ok_or_else(bad)?;
        let (block, port) = rest.split_once('.').ok_or_else(bad)?;
        let block = num(block)?;
        if let Some(k) = port.strip_prefix("in") {
            Ok(Port::BlockIn(block, num(k)?))
        } else if let Some(k) = port.strip_prefix("out") {
            Ok(Port::BlockOut(block, num(k)?))
        } else {
            Err(bad())
        }
    }
}

impl TryFrom<String> for Port {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<Port> for String {
    fn from(p: Port) -> String {
        p.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JunctionKind {
    Serial,
    ConditionalSelect,
    Injection,
}

/// Pauli letter carried by a junction, serialized as `"X"`, `"Y"`, `"Z"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameLetter {
    X,
    Y,
    Z,
}

impl FrameLetter {
    pub fn pauli(self) -> Pauli {
        match self {
            FrameLetter::X => Pauli::X,
            FrameLetter::Y => Pauli::Y,
            FrameLetter::Z => Pauli::Z,
        }
    }

    pub fn from_pauli(p: Pauli) -> Option<FrameLetter> {
        match p {
            Pauli::I => None,
            Pauli::X => Some(FrameLetter::X),
            Pauli::Y => Some(FrameLetter::Y),
            Pauli::Z => Some(FrameLetter::Z),
        }
    }

    /// Product of two letters up to phase; `None` for the identity.
    pub fn combine(a: Option<FrameLetter>, b: Option<FrameLetter>) -> Option<FrameLetter> {
        let bits = |l: Option<FrameLetter>| l.map_or((false, false), |l| l.pauli().bits());
        let ((ax, az), (bx, bz)) = (bits(a), bits(b));
        match Pauli::from_bits(ax ^ bx, az ^ bz) {
            Pauli::I => None,
            Pauli::X => Some(FrameLetter::X),
            Pauli::Y => Some(FrameLetter::Y),
            Pauli::Z => Some(FrameLetter::Z),
        }
    }
}

/// Coupling from one source port to one sink, or to two alternative branch
/// entries for a conditional selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Junction {
    pub kind: JunctionKind,
    pub a: Port,
    pub b: Vec<Port>,
    /// Pauli applied to the qubit as it crosses the junction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameLetter>,
    /// Readout whose value picks the branch (`0` takes `b[0]`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<usize>,
    /// Blocks of each candidate branch in execution order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<Vec<usize>>,
}

impl Junction {
    pub fn serial(a: Port, b: Port, frame: Option<FrameLetter>) -> Self {
        Junction { kind: JunctionKind::Serial, a, b: vec![b], frame, control: None, branches: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPorts {
    #[serde(rename = "in")]
    pub inputs: Vec<Port>,
    #[serde(rename = "out")]
    pub outputs: Vec<Port>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub id: usize,
    #[serde(flatten)]
    pub spec: TransistorSpec,
    pub ports: BlockPorts,
}

impl BlockEntry {
    pub fn new(id: usize, spec: TransistorSpec) -> Self {
        let ports = BlockPorts {
            inputs: (0..spec.ports()).map(|k| Port::BlockIn(id, k)).collect(),
            outputs: (0..spec.ports()).map(|k| Port::BlockOut(id, k)).collect(),
        };
        BlockEntry { id, spec, ports }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalIo {
    pub inputs: Vec<Port>,
    pub outputs: Vec<Port>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Netlist {
    pub schema: String,
    pub qubits: usize,
    pub blocks: Vec<BlockEntry>,
    pub junctions: Vec<Junction>,
    pub magic_ports: Vec<Port>,
    pub readouts: Vec<Port>,
    pub logical_io: LogicalIo,
}

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

/// Graph node of the execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Block(usize),
    Readout(usize),
    Output(usize),
}

impl Netlist {
    pub fn new(qubits: usize) -> Self {
        Netlist {
            schema: NETLIST_SCHEMA.to_string(),
            qubits,
            blocks: Vec::new(),
            junctions: Vec::new(),
            magic_ports: Vec::new(),
            readouts: Vec::new(),
            logical_io: LogicalIo {
                inputs: (0..qubits).map(Port::Input).collect(),
                outputs: (0..qubits).map(Port::Output).collect(),
            },
        }
    }

    pub fn add_block(&mut self, spec: TransistorSpec) -> usize {
        let id = self.blocks.len();
        self.blocks.push(BlockEntry::new(id, spec));
        id
    }

    pub fn add_magic(&mut self) -> Port {
        let p = Port::Magic(self.magic_ports.len());
        self.magic_ports.push(p);
        p
    }

    pub fn add_readout(&mut self) -> Port {
        let p = Port::Readout(self.readouts.len());
        self.readouts.push(p);
        p
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Number of random measurement outcomes a run consumes; independent of
    /// inputs and of the branch taken.
    pub fn random_event_count(&self) -> usize {
        // Wire branches consume one outcome per prepared site whether they
        // are measured (chosen) or decoupled, so every block counts fully.
        self.blocks.iter().map(|b| b.spec.outcome_count()).sum::<usize>() + self.readouts.len()
    }

    pub fn has_magic(&self) -> bool {
        !self.magic_ports.is_empty()
    }

    fn check_port(&self, p: Port, path: &str) -> Result<()> {
        let ok = match p {
            Port::Input(q) | Port::Output(q) => q < self.qubits,
            Port::Magic(m) => self.magic_ports.contains(&Port::Magic(m)),
            Port::Readout(r) => self.readouts.contains(&Port::Readout(r)),
            Port::BlockIn(b, k) | Port::BlockOut(b, k) => self.blocks.get(b).is_some_and(|e| k < e.spec.ports()),
        };
        if ok {
            Ok(())
        } else {
            Err(schema_err(path, format!("port {p} does not exist")))
        }
    }

    /// Checks every structural invariant, reporting the first failure with
    /// its location in the serialized form.
    pub fn validate(&self) -> Result<()> {
        if self.schema != NETLIST_SCHEMA {
            return Err(schema_err("schema", format!("expected '{NETLIST_SCHEMA}', found '{}'", self.schema)));
        }
        if self.qubits == 0 {
            return Err(schema_err("qubits", "at least one logical qubit is required"));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            let path = format!("blocks[{i}]");
            if b.id != i {
                return Err(schema_err(format!("{path}.id"), format!("expected id {i}, found {}", b.id)));
            }
            b.spec.validate_size().map_err(|v| schema_err(&path, v.to_string()))?;
            if b.ports != BlockEntry::new(i, b.spec).ports {
                return Err(schema_err(format!("{path}.ports"), "port list does not match the block kind"));
            }
        }
        for (k, p) in self.magic_ports.iter().enumerate() {
            if *p != Port::Magic(k) {
                return Err(schema_err(format!("magic_ports[{k}]"), format!("expected magic:{k}, found {p}")));
            }
        }
        for (k, p) in self.readouts.iter().enumerate() {
            if *p != Port::Readout(k) {
                return Err(schema_err(format!("readouts[{k}]"), format!("expected readout:{k}, found {p}")));
            }
        }
        let io = LogicalIo {
            inputs: (0..self.qubits).map(Port::Input).collect(),
            outputs: (0..self.qubits).map(Port::Output).collect(),
        };
        if self.logical_io != io {
            return Err(schema_err("logical_io", "must list in:0.. and out:0.. for every logical qubit"));
        }

        let mut outgoing: HashMap<Port, usize> = HashMap::new();
        let mut incoming: HashMap<Port, Vec<usize>> = HashMap::new();
        let branch_of = self.branch_membership()?;
        for (i, j) in self.junctions.iter().enumerate() {
            let path = format!("junctions[{i}]");
            self.check_port(j.a, &format!("{path}.a"))?;
            if !j.a.is_source() {
                return Err(schema_err(format!("{path}.a"), format!("{} is not an output port", j.a)));
            }
            for (k, &b) in j.b.iter().enumerate() {
                self.check_port(b, &format!("{path}.b[{k}]"))?;
                if !b.is_sink() {
                    return Err(schema_err(format!("{path}.b[{k}]"), format!("{b} is not an input port")));
                }
                incoming.entry(b).or_default().push(i);
            }
            if let Some(prev) = outgoing.insert(j.a, i) {
                return Err(schema_err(&path, format!("{} already feeds junctions[{prev}]", j.a)));
            }
            match j.kind {
                JunctionKind::Serial | JunctionKind::Injection => {
                    if j.b.len() != 1 {
                        return Err(schema_err(format!("{path}.b"), "serial junctions have exactly one target"));
                    }
                    if j.control.is_some() || !j.branches.is_empty() {
                        return Err(schema_err(&path, "only conditional-select junctions carry control and branches"));
                    }
                    if (j.kind == JunctionKind::Injection) != matches!(j.a, Port::Magic(_)) {
                        return Err(schema_err(
                            format!("{path}.a"),
                            "injection junctions start exactly at magic ports",
                        ));
                    }
                }
                JunctionKind::ConditionalSelect => self.check_select(j, &path)?,
            }
        }
        for (p, _) in self.all_source_ports() {
            if !outgoing.contains_key(&p) {
                return Err(schema_err("junctions", format!("output port {p} has no outgoing junction")));
            }
        }
        for p in self.all_sink_ports() {
            match incoming.get(&p).map(Vec::as_slice) {
                None | Some([]) => return Err(schema_err("junctions", format!("input port {p} is never fed"))),
                Some([_]) => {}
                Some([x, y]) => {
                    let side = |j: usize| match self.junctions[j].a {
                        Port::BlockOut(b, _) => branch_of.get(&b).copied(),
                        _ => None,
                    };
                    match (side(*x), side(*y)) {
                        (Some((s1, c1)), Some((s2, c2))) if s1 == s2 && c1 != c2 => {}
                        _ => {
                            return Err(schema_err(
                                format!("junctions[{y}]"),
                                format!("{p} is fed twice outside a conditional merge"),
                            ))
                        }
                    }
                }
                Some(_) => return Err(schema_err("junctions", format!("{p} is fed more than twice"))),
            }
        }
        self.execution_order()?;
        Ok(())
    }

    fn check_select(&self, j: &Junction, path: &str) -> Result<()> {
        if j.b.len() != 2 || j.branches.len() != 2 {
            return Err(schema_err(format!("{path}.b"), "conditional-select needs exactly two candidate branches"));
        }
        let control = j.control.ok_or_else(|| schema_err(format!("{path}.control"), "missing control readout"))?;
        self.check_port(Port::Readout(control), &format!("{path}.control"))?;
        for (c, branch) in j.branches.iter().enumerate() {
            let bpath = format!("{path}.branches[{c}]");
            let first = *branch.first().ok_or_else(|| schema_err(&bpath, "empty branch"))?;
            if j.b[c] != Port::BlockIn(first, 0) {
                return Err(schema_err(
                    format!("{path}.b[{c}]"),
                    format!("must be the entry b{first}.in0 of its branch"),
                ));
            }
            for &b in branch {
                let entry =
                    self.blocks.get(b).ok_or_else(|| schema_err(&bpath, format!("block {b} does not exist")))?;
                if !matches!(entry.spec.kind, TransistorKind::HWire | TransistorKind::SWire) {
                    return Err(schema_err(&bpath, format!("branch block {b} must be a wire")));
                }
            }
        }
        Ok(())
    }

    /// Maps each branch block to (select junction index, candidate).
    fn branch_membership(&self) -> Result<HashMap<usize, (usize, usize)>> {
        let mut out = HashMap::new();
        for (i, j) in self.junctions.iter().enumerate() {
            for (c, branch) in j.branches.iter().enumerate() {
                for &b in branch {
                    if out.insert(b, (i, c)).is_some() {
                        return Err(schema_err(
                            format!("junctions[{i}].branches"),
                            format!("block {b} is in two branches"),
                        ));
                    }
                }
            }
        }
        Ok(out)
    }

    fn all_source_ports(&self) -> Vec<(Port, ())> {
        let mut v: Vec<Port> = (0..self.qubits).map(Port::Input).collect();
        v.extend(self.magic_ports.iter().copied());
        for b in &self.blocks {
            v.extend(b.ports.outputs.iter().copied());
        }
        v.into_iter().map(|p| (p, ())).collect()
    }

    fn all_sink_ports(&self) -> Vec<Port> {
        let mut v: Vec<Port> = (0..self.qubits).map(Port::Output).collect();
        v.extend(self.readouts.iter().copied());
        for b in &self.blocks {
            v.extend(b.ports.inputs.iter().copied());
        }
        v
    }

    /// Topological order of blocks, readouts and outputs.
    pub(crate) fn execution_order(&self) -> Result<Vec<Node>> {
        let mut g: DiGraph<Node, ()> = DiGraph::new();
        let mut idx: HashMap<Node, NodeIndex> = HashMap::new();
        let mut node = |g: &mut DiGraph<Node, ()>, n: Node| *idx.entry(n).or_insert_with(|| g.add_node(n));
        for b in 0..self.blocks.len() {
            node(&mut g, Node::Block(b));
        }
        let owner = |p: Port| match p {
            Port::BlockIn(b, _) | Port::BlockOut(b, _) => Some(Node::Block(b)),
            Port::Readout(r) => Some(Node::Readout(r)),
            Port::Output(q) => Some(Node::Output(q)),
            Port::Input(_) | Port::Magic(_) => None,
        };
        for j in &self.junctions {
            let from = owner(j.a);
            for &b in &j.b {
                let to = node(&mut g, owner(b).expect("sinks have owners"));
                if let Some(from) = from {
                    let from = node(&mut g, from);
                    g.add_edge(from, to, ());
                }
                if let Some(r) = j.control {
                    let ctl = node(&mut g, Node::Readout(r));
                    g.add_edge(ctl, to, ());
                }
            }
        }
        // Branch blocks run only after their select has fired.
        for j in self.junctions.iter().filter(|j| j.kind == JunctionKind::ConditionalSelect) {
            for branch in &j.branches {
                for pair in branch.windows(2) {
                    let (a, b) = (node(&mut g, Node::Block(pair[0])), node(&mut g, Node::Block(pair[1])));
                    g.add_edge(a, b, ());
                }
            }
        }
        toposort(&g, None)
            .map(|order| order.into_iter().map(|i| g[i]).collect())
            .map_err(|cycle| schema_err("junctions", format!("netlist is cyclic at {:?}", g[cycle.node_id()])))
    }
}

/// Serializes a netlist as pretty-printed JSON.
pub fn emit_netlist(netlist: &Netlist) -> Result<String> {
    serde_json::to_string_pretty(netlist).map_err(|e| Error::Netlist(e.to_string()))
}

/// Parses and validates a serialized netlist.
pub fn load_netlist(text: &str) -> Result<Netlist> {
    let netlist: Netlist = serde_json::from_str(text)
        .map_err(|e| schema_err(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    netlist.validate()?;
    Ok(netlist)
}
