use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{gates, Matrix, StateVector};
use crate::error::Result;
use crate::network::{run_netlist, Netlist, RunInputs, RunOptions};
use crate::outcome::OutcomePolicy;
use crate::register::Backend;

use super::circuit::{CircuitIR, GateKind};
use super::compile::{compile, SizePolicy};

fn gate_matrix(kind: GateKind) -> Matrix {
    match kind {
        GateKind::H => gates::h(),
        GateKind::S => gates::s(),
        GateKind::Sdg => gates::sdg(),
        GateKind::T => gates::t(),
        GateKind::Tdg => gates::tdg(),
        GateKind::X => gates::x(),
        GateKind::Y => gates::y(),
        GateKind::Z => gates::z(),
        GateKind::CZ => gates::cz(),
        GateKind::CX => gates::cx(),
    }
}

/// Applies the circuit directly to a dense state.
pub fn simulate_circuit(ir: &CircuitIR, input: &StateVector) -> Result<StateVector> {
    let mut s = input.clone();
    for g in &ir.gates {
        s.apply_matrix(&gate_matrix(g.kind), &g.qubits)?;
    }
    Ok(s)
}

/// Uniformly random gates from the full set on `qubits` wires.
pub fn random_circuit<R: Rng + ?Sized>(qubits: usize, depth: usize, rng: &mut R) -> CircuitIR {
    let mut ir = CircuitIR::new(qubits);
    let kinds: Vec<GateKind> = GateKind::ALL.iter().copied().filter(|k| qubits > 1 || k.arity() == 1).collect();
    for _ in 0..depth {
        let kind = kinds[rng.random_range(0..kinds.len())];
        let a = rng.random_range(0..qubits);
        if kind.arity() == 2 {
            let b = (a + rng.random_range(1..qubits)) % qubits;
            ir.push(kind, &[a, b]);
        } else {
            ir.push(kind, &[a]);
        }
    }
    ir
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    /// Extra runs per trial on uniformly random forced outcome strings.
    pub forced_branches: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyFailure {
    pub trial: usize,
    pub outcomes: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub runs: usize,
    pub max_deviation: f64,
    /// Worst run above tolerance, if any.
    pub failure: Option<VerifyFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Compares a compiled netlist with direct simulation on random inputs,
/// once with sampled outcomes and once per forced branch in every trial.
/// Trial `t` uses its own seed derived from `seed`, so reports do not
/// depend on how trials are scheduled.
pub fn verify_netlist(ir: &CircuitIR, net: &Netlist, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport { runs: 0, max_deviation: 0.0, failure: None };
    let events = net.random_event_count();
    for trial in 0..opts.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let input = StateVector::random(ir.qubits, &mut rng)?;
        let expected = simulate_circuit(ir, &input)?;
        let mut policies = vec![OutcomePolicy::Sample { seed: rng.random() }];
        policies.extend(
            (0..opts.forced_branches).map(|_| OutcomePolicy::Forced((0..events).map(|_| rng.random()).collect())),
        );
        for policy in policies {
            let out = run_netlist(net, &RunInputs::State(input.clone()), &RunOptions::new(Backend::Oracle, policy))?;
            let deviation = out.state.phase_distance(&expected);
            report.runs += 1;
            report.max_deviation = report.max_deviation.max(deviation);
            let worse = report.failure.as_ref().is_none_or(|f| deviation > f.deviation);
            if deviation > opts.tol && worse {
                report.failure = Some(VerifyFailure { trial, outcomes: bit_string(&out.outcome_bits()), deviation });
            }
        }
    }
    Ok(report)
}

/// Compiles with `policy` and runs [`verify_netlist`].
pub fn verify_circuit(ir: &CircuitIR, policy: &SizePolicy, opts: &VerifyOptions) -> Result<VerifyReport> {
    verify_netlist(ir, &compile(ir, policy)?, opts)
}
