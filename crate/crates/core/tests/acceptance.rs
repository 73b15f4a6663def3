use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use telesistor::compiler::{random_circuit, verify_circuit, SizePolicy, VerifyOptions};
use telesistor::dense::{gates, proportional, Matrix, StateVector};
use telesistor::network::inject_t;
use telesistor::phase::{
    gauge_cancellation_check, infidelity_fit, phase_lab, string_order, FidelityMode, GroupElement, PerturbationFamily,
    PhaseModel, StringOrderSpec,
};
use telesistor::register::{Alloc, DenseRegister, Register};
use telesistor::transistor::{
    byproduct_from_outcomes, closed_form_frame, conjugation_frame, execute, honeycomb_t_w_matrix,
    logical_map_of_branch, row_reflection, t_w_matrix, TransistorKind, TransistorSpec,
};
use telesistor::{OutcomePolicy, Result};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bits(len: usize, code: usize) -> Vec<bool> {
    (0..len).map(|k| (code >> k) & 1 == 1).collect()
}

fn random_qubit<R: Rng>(rng: &mut R) -> [C64; 2] {
    let s = StateVector::random(1, rng).unwrap();
    [s.amplitudes()[0], s.amplitudes()[1]]
}

/// Branch map with its byproduct undone on the outputs.
fn corrected_map(spec: &TransistorSpec, outcomes: &[bool]) -> Result<Matrix> {
    let raw = logical_map_of_branch(spec, outcomes)?;
    let frame = byproduct_from_outcomes(spec, outcomes)?;
    Ok(gates::pauli(frame.pauli()).adjoint() * raw.matrix)
}

fn teleportation_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let psi = random_qubit(&mut rng);
        for s in [false, true] {
            let mut reg = DenseRegister::new();
            let q = reg.alloc(Alloc::Amplitudes(psi)).unwrap();
            let mut stream = OutcomePolicy::Forced(vec![s]).stream();
            let run = execute(&TransistorSpec::h_wire(1), &mut reg, &[q], &mut stream).unwrap();
            let got = reg.dense_state(&run.outputs).unwrap();
            let mut want = StateVector::product(&[psi]).unwrap();
            if s {
                want.apply_matrix(&gates::z(), &[0]).unwrap();
            }
            want.apply_matrix(&gates::h(), &[0]).unwrap();
            worst = worst.max(got.phase_distance(&want));
        }
    }
    check(worst <= 1e-12, format!("max deviation {worst:.2e} over 200 runs"))
}

fn h_wire_law() -> Outcome {
    let mut branches = 0;
    for l in 1..=7 {
        let (spec, nominal) = if l % 2 == 1 {
            (TransistorSpec::h_wire(l), gates::h())
        } else {
            (TransistorSpec::identity_wire(l), gates::identity(2))
        };
        for code in 0..1usize << l {
            let m = corrected_map(&spec, &bits(l, code)).map_err(|e| e.to_string())?;
            if !proportional(&m, &nominal, 1e-10).unwrap() {
                return Err(format!("L={l} branch {code:b} is not the nominal gate"));
            }
            branches += 1;
        }
    }
    check(true, format!("{branches} branches for L = 1..7"))
}

fn s_wire_law() -> Outcome {
    let q = gates::q();
    let q3 = &q * &q * &q;
    if !proportional(&q3, &gates::identity(2), 1e-12).unwrap() {
        return Err("Q^3 is not proportional to 1".into());
    }
    for l in [3, 6] {
        let spec = TransistorSpec::s_wire(l);
        for code in 0..1usize << l {
            let outcomes = bits(l, code);
            let frame = closed_form_frame(&spec, &outcomes).unwrap().expect("S-wire closed form");
            let raw = logical_map_of_branch(&spec, &outcomes).unwrap();
            let m = gates::pauli(frame.pauli()).adjoint() * raw.matrix;
            if !proportional(&m, &q, 1e-10).unwrap() {
                return Err(format!("L={l} branch {code:b} is not Q after the mod-3 byproduct"));
            }
        }
    }
    check(true, "all 72 branches of L = 3, 6 give Q; Q^3 ∝ 1".into())
}

fn qca_periods() -> Outcome {
    for w in 1..=4 {
        let t = t_w_matrix(w).unwrap();
        let reflect = gates::power(&t, w + 1);
        if !proportional(&reflect, &row_reflection(w), 1e-10).unwrap() {
            return Err(format!("T_{w}^{} is not the row reflection", w + 1));
        }
        if !proportional(&(&reflect * &reflect), &gates::identity(1 << w), 1e-10).unwrap() {
            return Err(format!("T_{w}^{} is not proportional to 1", 2 * (w + 1)));
        }
    }
    for w in [2, 4] {
        let t = honeycomb_t_w_matrix(w).unwrap();
        if !proportional(&gates::power(&t, w), &gates::identity(1 << w), 1e-10).unwrap() {
            return Err(format!("honeycomb T_{w}^{w} is not proportional to 1"));
        }
    }
    check(true, "square w = 1..4 reflect and return; honeycomb w = 2, 4 have period w".into())
}

fn cz_ladders() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cz = gates::cz();
    for spec in [TransistorSpec::square_cz(2, 7), TransistorSpec::minimal(TransistorKind::HoneycombCZ)] {
        let n = spec.outcome_count();
        let mut records = vec![vec![false; n]];
        records.extend((0..32).map(|_| (0..n).map(|_| rng.random()).collect::<Vec<bool>>()));
        for outcomes in &records {
            let m = corrected_map(&spec, outcomes).map_err(|e| e.to_string())?;
            if !proportional(&m, &cz, 1e-10).unwrap() {
                return Err(format!("{spec:?} branch {outcomes:?} is not CZ"));
            }
        }
    }
    let spec = TransistorSpec::minimal(TransistorKind::HoneycombCZ);
    let n = spec.outcome_count();
    let enumerated = n.min(10);
    for code in 0..1usize << enumerated {
        let outcomes = bits(n, code);
        let closed = closed_form_frame(&spec, &outcomes).unwrap().expect("two-row honeycomb closed form");
        if closed != conjugation_frame(&spec, &outcomes).unwrap() {
            return Err(format!("closed form disagrees with the conjugation engine on {outcomes:?}"));
        }
    }
    check(
        true,
        format!("33 branches per ladder give CZ; honeycomb closed form matches on {} branches", 1 << enumerated),
    )
}

fn magic_injection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ladder = SizePolicy::default().ladder();
    // H-wire, ladder and H-wire outcomes precede the readout.
    let before = 2 + ladder.outcome_count();
    let mut worst: f64 = 0.0;
    for dagger in [false, true] {
        let gate = if dagger { gates::tdg() } else { gates::t() };
        for _ in 0..50 {
            let psi = random_qubit(&mut rng);
            for readout in [false, true] {
                let mut forced: Vec<bool> = (0..64).map(|_| rng.random()).collect();
                forced[before] = readout;
                let mut reg = DenseRegister::new();
                let data = reg.alloc(Alloc::Amplitudes(psi)).unwrap();
                let magic = reg.alloc(Alloc::Magic).unwrap();
                let mut stream = OutcomePolicy::Forced(forced).stream();
                let run = inject_t(&mut reg, data, magic, dagger, &ladder, &mut stream).unwrap();
                if run.outcome != readout || run.conditional != (readout ^ dagger) {
                    return Err(format!("readout {readout} was not honoured"));
                }
                let got = reg.dense_state(&[run.output]).unwrap();
                let mut want = StateVector::product(&[psi]).unwrap();
                want.apply_matrix(&gate, &[0]).unwrap();
                worst = worst.max(got.phase_distance(&want));
            }
        }
    }
    check(worst <= 1e-10, format!("T and T† over 50 states and both readouts, max deviation {worst:.2e}"))
}

fn compiler_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for trial in 0..100 {
        let qubits = rng.random_range(1..=4);
        let depth = rng.random_range(1..=10);
        let ir = random_circuit(qubits, depth, &mut rng);
        let opts = VerifyOptions { trials: 1, tol: 1e-10, seed: rng.random(), forced_branches: 16 };
        let report = verify_circuit(&ir, &SizePolicy::default(), &opts).map_err(|e| e.to_string())?;
        worst = worst.max(report.max_deviation);
        runs += report.runs;
        if let Some(f) = report.failure {
            return Err(format!("circuit {trial} deviates by {:.2e} on outcomes {}", f.deviation, f.outcomes));
        }
    }
    check(true, format!("100 circuits, {runs} runs, max deviation {worst:.2e}"))
}

fn lambda_grid() -> Vec<f64> {
    (1..=10).map(|k| 0.002 * k as f64).collect()
}

fn phase_linearity() -> Outcome {
    let grid = lambda_grid();
    let generic = infidelity_fit(&PhaseModel::new(PerturbationFamily::Generic, 0.0, 2, 7), &grid, 10)
        .map_err(|e| e.to_string())?;
    let symmetric = infidelity_fit(&PhaseModel::new(PerturbationFamily::JunkOnly, 0.0, 2, 7), &grid, 10)
        .map_err(|e| e.to_string())?;
    let lmax = 0.02;
    let linear_ok = generic.linear > 0.0 && generic.max_residual <= 0.5 * generic.linear * lmax;
    let symmetric_ok = symmetric.linear.abs() <= 1e-8;
    check(
        linear_ok && symmetric_ok,
        format!(
            "generic c = {:.3e}, q = {:.3e}, max residual {:.3e} (bound {:.3e}), |qλ²|/|cλ| = {:.1}; symmetric c = {:.1e}",
            generic.linear,
            generic.quadratic,
            generic.max_residual,
            0.5 * generic.linear.abs() * lmax,
            generic.quadratic_share,
            symmetric.linear
        ),
    )
}

fn gauge_cancellation() -> Outcome {
    let g = gauge_cancellation_check(&PhaseModel::new(PerturbationFamily::GaugeOnly, 0.05, 2, 7), 10)
        .map_err(|e| e.to_string())?;
    check(
        g.fidelity < 1.0 && g.restored(1e-10),
        format!("F(10) = {:.12}, F(11) = {:.12}", g.fidelity, g.fidelity_extra_site),
    )
}

fn string_order_decay() -> Outcome {
    let n = 10;
    let base = PhaseModel::new(PerturbationFamily::Generic, 0.0, 2, 7);
    for element in [GroupElement::G1, GroupElement::G2] {
        let v = string_order(&base, &StringOrderSpec { element, start: 1, end: n }, n).map_err(|e| e.to_string())?;
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(format!("|⟨O⟩| = {} at the fixed point", v.norm()));
        }
    }
    let mut grid = vec![0.0];
    grid.extend(lambda_grid());
    let rows = phase_lab(&base, &grid, n, FidelityMode::Exhaustive).map_err(|e| e.to_string())?;
    let bounded = rows.iter().all(|r| r.string_order <= 1.0 + 1e-12);
    let decreasing = rows.windows(2).all(|w| w[1].string_order < w[0].string_order);
    check(
        bounded && decreasing,
        format!(
            "|⟨O⟩| from {:.12} to {:.12} over {} grid points",
            rows[0].string_order,
            rows[rows.len() - 1].string_order,
            rows.len()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("teleportation identity", teleportation_identity),
        ("H-wire branch law", h_wire_law),
        ("S-wire branch law", s_wire_law),
        ("QCA periods", qca_periods),
        ("CZ ladders", cz_ladders),
        ("magic injection", magic_injection),
        ("compiler round-trip", compiler_round_trip),
        ("phase linearity", phase_linearity),
        ("gauge cancellation", gauge_cancellation),
        ("string order", string_order_decay),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                println!("FAIL {:>2} {name}: {detail}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
