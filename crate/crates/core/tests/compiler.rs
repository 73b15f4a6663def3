use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use telesistor::compiler::{compile, parse_circuit, parse_circuit_bytes, random_circuit, GateKind, SizePolicy};
use telesistor::network::JunctionKind;

const WORDS: [&str; 16] = ["qubits", "H", "S", "Sdg", "T", "Tdg", "X", "Y", "Z", "CZ", "CX", "0", "1", "7", "-1", "#"];

fn token_soup<R: Rng>(rng: &mut R) -> Vec<u8> {
    let mut text = String::new();
    for _ in 0..rng.random_range(0..12) {
        for _ in 0..rng.random_range(0..5) {
            text.push_str(WORDS[rng.random_range(0..WORDS.len())]);
            text.push(if rng.random_bool(0.9) { ' ' } else { '\t' });
        }
        text.push('\n');
    }
    text.into_bytes()
}

#[test]
fn parser_is_total() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..10_000 {
        let bytes = if i % 2 == 0 {
            (0..rng.random_range(0..64)).map(|_| rng.random::<u8>()).collect()
        } else {
            token_soup(&mut rng)
        };
        if let Err(e) = parse_circuit_bytes(&bytes) {
            assert!(e.line >= 1 && e.column >= 1, "{e:?}");
        }
    }
}

#[test]
fn printed_circuits_parse_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..200 {
        let ir = random_circuit(rng.random_range(1..=5), rng.random_range(0..20), &mut rng);
        let back = parse_circuit(&ir.to_string()).unwrap();
        let key = |c: &telesistor::compiler::CircuitIR| -> Vec<(GateKind, Vec<usize>)> {
            c.gates.iter().map(|g| (g.kind, g.qubits.clone())).collect()
        };
        assert_eq!((back.qubits, key(&back)), (ir.qubits, key(&ir)));
    }
}

#[test]
fn block_counts_under_default_policy() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..50 {
        let ir = random_circuit(rng.random_range(1..=4), rng.random_range(0..12), &mut rng);
        let expected: usize = ir
            .gates
            .iter()
            .map(|g| match g.kind {
                GateKind::X | GateKind::Y | GateKind::Z => 0,
                GateKind::H | GateKind::CZ => 1,
                GateKind::S | GateKind::Sdg => 2,
                GateKind::CX => 3,
                GateKind::T | GateKind::Tdg => 6,
            })
            .sum();
        let net = compile(&ir, &SizePolicy::default()).unwrap();
        assert_eq!(net.block_count(), expected);
        let t_count = ir.gates.iter().filter(|g| matches!(g.kind, GateKind::T | GateKind::Tdg)).count();
        let selects = net.junctions.iter().filter(|j| j.kind == JunctionKind::ConditionalSelect).count();
        assert_eq!((net.magic_ports.len(), selects), (t_count, t_count));
    }
}

#[test]
fn located_errors() {
    let e = parse_circuit("qubits 2\nH 0\nCX 0 5\n").unwrap_err();
    assert_eq!(e.line, 3);
    let e = parse_circuit("H 0").unwrap_err();
    assert_eq!(e.line, 1);
}
