//! Text format for Clifford+T circuits.
//!
//! ```text
//! # comments run to end of line
//! qubits 2
//! H 0
//! CX 0 1
//! T 1
//! ```
//!
//! The first non-blank line must be the `qubits N` header. Every other line
//! holds one gate: a mnemonic followed by whitespace-separated qubit
//! indices.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}, line {line}, column {column}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Upper bound on the declared register size.
pub const MAX_CIRCUIT_QUBITS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    S,
    Sdg,
    T,
    Tdg,
    X,
    Y,
    Z,
    CZ,
    CX,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::CZ,
        GateKind::CX,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::T => "T",
            GateKind::Tdg => "Tdg",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::CZ => "CZ",
            GateKind::CX => "CX",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::CZ | GateKind::CX => 2,
            _ => 1,
        }
    }

    pub fn is_pauli(self) -> bool {
        matches!(self, GateKind::X | GateKind::Y | GateKind::Z)
    }

    fn from_mnemonic(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|g| g.mnemonic() == s)
    }
}

fn suggestion(word: &str) -> Option<&'static str> {
    match word.to_ascii_uppercase().as_str() {
        "CNOT" | "CX" => Some("CX"),
        "CPHASE" | "CZ" => Some("CZ"),
        "SDAG" | "SDG" | "S_DAG" => Some("Sdg"),
        "TDAG" | "TDG" | "T_DAG" => Some("Tdg"),
        "HADAMARD" | "H" => Some("H"),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// 1-based source line, 0 for gates built in code.
    pub line: usize,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Self {
        Gate { kind, qubits: qubits.to_vec(), line: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitIR {
    pub qubits: usize,
    pub gates: Vec<Gate>,
}

impl CircuitIR {
    pub fn new(qubits: usize) -> Self {
        CircuitIR { qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, kind: GateKind, qubits: &[usize]) -> &mut Self {
        self.gates.push(Gate::new(kind, qubits));
        self
    }
}

impl fmt::Display for CircuitIR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.qubits)?;
        for g in &self.gates {
            write!(f, "{}", g.kind.mnemonic())?;
            for q in &g.qubits {
                write!(f, " {q}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((line[..s].chars().count() + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn parse_index(tok: &str, line: usize, col: usize) -> Result<usize, ParseError> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(line, col, format!("expected a qubit index, found '{tok}'")));
    }
    tok.parse().map_err(|_| err(line, col, format!("qubit index '{tok}' is too large")))
}

pub fn parse_circuit(text: &str) -> Result<CircuitIR, ParseError> {
    let mut ir: Option<CircuitIR> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(&(col, head)) = toks.first() else { continue };
        let Some(ir) = ir.as_mut() else {
            if head != "qubits" {
                return Err(err(line_no, col, format!("missing 'qubits N' header, found '{head}'")));
            }
            if toks.len() != 2 {
                return Err(err(line_no, col, "header must be 'qubits N'"));
            }
            let (ncol, ntok) = toks[1];
            let n = parse_index(ntok, line_no, ncol)?;
            if n == 0 || n > MAX_CIRCUIT_QUBITS {
                return Err(err(line_no, ncol, format!("qubit count must be in 1..={MAX_CIRCUIT_QUBITS}, got {n}")));
            }
            ir = Some(CircuitIR::new(n));
            continue;
        };
        let kind = GateKind::from_mnemonic(head).ok_or_else(|| {
            let hint = suggestion(head).map(|s| format!(" (use {s})")).unwrap_or_default();
            err(line_no, col, format!("unknown mnemonic '{head}'{hint}"))
        })?;
        let args = &toks[1..];
        if args.len() != kind.arity() {
            let at = args.get(kind.arity()).map_or(col, |t| t.0);
            return Err(err(
                line_no,
                at,
                format!("{} takes {} qubit(s), got {}", kind.mnemonic(), kind.arity(), args.len()),
            ));
        }
        let mut qubits = Vec::with_capacity(args.len());
        for &(acol, atok) in args {
            let q = parse_index(atok, line_no, acol)?;
            if q >= ir.qubits {
                return Err(err(line_no, acol, format!("qubit {q} out of range for {} qubits", ir.qubits)));
            }
            if qubits.contains(&q) {
                return Err(err(line_no, acol, format!("{} targets must be distinct", kind.mnemonic())));
            }
            qubits.push(q);
        }
        ir.gates.push(Gate { kind, qubits, line: line_no });
    }
    ir.ok_or_else(|| err(text.lines().count().max(1), 1, "missing 'qubits N' header"))
}

/// Byte-level entry point; invalid UTF-8 is reported at its position.
pub fn parse_circuit_bytes(bytes: &[u8]) -> Result<CircuitIR, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_circuit(text),
        Err(e) => {
            let good = &bytes[..e.valid_up_to()];
            let line = good.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = good.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            let column = String::from_utf8_lossy(&good[line_start..]).chars().count() + 1;
            Err(err(line, column, "invalid UTF-8"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_programs() {
        let ir = parse_circuit("qubits 1\nH 0").unwrap();
        assert_eq!(ir.gates, vec![Gate { kind: GateKind::H, qubits: vec![0], line: 2 }]);
        let ir = parse_circuit("qubits 2\nCZ 0 1\nT 1").unwrap();
        assert_eq!(ir.gates.len(), 2);
        assert_eq!(ir.gates[1].kind, GateKind::T);
    }

    #[test]
    fn comments_and_blank_lines() {
        let ir = parse_circuit("# teleport\n\nqubits 2 # two\n  H 0\n\nCX 0 1  # entangle\n").unwrap();
        assert_eq!(ir.qubits, 2);
        assert_eq!(ir.gates.len(), 2);
        assert_eq!(ir.gates[1].line, 6);
    }

    #[test]
    fn located_errors() {
        let e = parse_circuit("qubits 1\nCNOT 0").unwrap_err();
        assert_eq!(e.to_string(), "unknown mnemonic 'CNOT' (use CX), line 2, column 1");
        let e = parse_circuit("qubits 2\nCZ 0").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (2, "CZ takes 2 qubit(s), got 1"));
        let e = parse_circuit("qubits 2\nH  5").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        let e = parse_circuit("H 0").unwrap_err();
        assert!(e.message.starts_with("missing 'qubits N' header"));
        let e = parse_circuit("").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_circuit("qubits 2\nCX 1 1").unwrap_err();
        assert_eq!(e.column, 6);
        let e = parse_circuit("qubits 0").unwrap_err();
        assert_eq!(e.column, 8);
    }

    #[test]
    fn invalid_utf8_is_located() {
        let e = parse_circuit_bytes(b"qubits 1\nH \xff0").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }

    #[test]
    fn display_round_trip() {
        let text = "qubits 3\nH 0\nSdg 2\nCX 2 1\nTdg 0\n";
        let ir = parse_circuit(text).unwrap();
        assert_eq!(ir.to_string(), text);
    }
}
