//! Stabilizer/destabilizer tableau simulation with outcome injection.
//!
//! Qubits are 0-based here. Generators are stored as [`PauliString`] rows;
//! row `i` of the destabilizers anticommutes with stabilizer `i` only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::{Measurement, OutcomeStream};
use crate::pauli::{check_targets, CliffordGate, Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Single-qubit product states a register can allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitState {
    Zero,
    One,
    Plus,
    Minus,
}

impl InitState {
    /// The signed single-qubit stabilizer of this state.
    fn stabilizer(self) -> (Pauli, bool) {
        match self {
            InitState::Zero => (Pauli::Z, false),
            InitState::One => (Pauli::Z, true),
            InitState::Plus => (Pauli::X, false),
            InitState::Minus => (Pauli::X, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    stabilizers: Vec<PauliString>,
    destabilizers: Vec<PauliString>,
}

impl StabilizerTableau {
    /// `|+⟩^{⊗n}`: stabilizers `X_i`, destabilizers `Z_i`.
    pub fn new_plus_state(n: usize) -> Result<Self> {
        Self::new_product(&vec![InitState::Plus; n])
    }

    pub fn new_zero_state(n: usize) -> Result<Self> {
        Self::new_product(&vec![InitState::Zero; n])
    }

    pub fn new_product(states: &[InitState]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidSize("a tableau needs at least one qubit".into()));
        }
        let mut t = StabilizerTableau::empty();
        for &s in states {
            t.append_qubit(s);
        }
        Ok(t)
    }

    /// Zero-qubit tableau, the starting point for registers that allocate
    /// qubits one at a time.
    pub(crate) fn empty() -> Self {
        StabilizerTableau { n: 0, stabilizers: Vec::new(), destabilizers: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destabilizers
    }

    /// Appends a fresh qubit in product with the current state and returns
    /// its index.
    pub fn append_qubit(&mut self, init: InitState) -> usize {
        for p in self.stabilizers.iter_mut().chain(self.destabilizers.iter_mut()) {
            p.push_qubit();
        }
        let q = self.n;
        self.n += 1;
        let (letter, negative) = init.stabilizer();
        let mut s = PauliString::single(self.n, q, letter);
        if negative {
            s.negate();
        }
        let other = if letter == Pauli::X { Pauli::Z } else { Pauli::X };
        self.stabilizers.push(s);
        self.destabilizers.push(PauliString::single(self.n, q, other));
        q
    }

    pub fn apply_clifford(&mut self, gate: CliffordGate, targets: &[usize]) -> Result<()> {
        check_targets(gate.arity(), targets, self.n)?;
        for p in self.stabilizers.iter_mut().chain(self.destabilizers.iter_mut()) {
            p.conjugate(gate, targets)?;
        }
        Ok(())
    }

    fn check_operator(&self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "operator on {} qubits, tableau on {}",
                p.num_qubits(),
                self.n
            )));
        }
        if p.is_identity() {
            return Err(Error::IdentityMeasurement);
        }
        if !p.is_hermitian() {
            return Err(Error::DimensionMismatch(format!("{p} is not Hermitian")));
        }
        Ok(())
    }

    /// Product of the stabilizers selected by the destabilizers that
    /// anticommute with `p`. Equals `±p` whenever `p` commutes with the
    /// whole stabilizer group.
    fn group_representative(&self, p: &PauliString) -> PauliString {
        let mut acc = PauliString::identity(self.n);
        for (d, s) in self.destabilizers.iter().zip(&self.stabilizers) {
            if !d.commutes_with(p) {
                acc.mul_assign_right(s);
            }
        }
        acc
    }

    /// `+1`/`-1` if `±p` is in the stabilizer group, `0` otherwise.
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "operator on {} qubits, tableau on {}",
                p.num_qubits(),
                self.n
            )));
        }
        if p.is_identity() {
            return Ok(if p.phase() == 2 { -1 } else { 1 });
        }
        if self.stabilizers.iter().any(|s| !s.commutes_with(p)) {
            return Ok(0);
        }
        let rep = self.group_representative(p);
        debug_assert!(rep.same_letters(p));
        Ok(if rep.phase() == p.phase() { 1 } else { -1 })
    }

    /// Measures the Hermitian Pauli `p`. Outcome `false` is the `+1`
    /// eigenvalue of `p` (sign included).
    pub fn measure_pauli(&mut self, p: &PauliString, outcomes: &mut OutcomeStream) -> Result<Measurement> {
        self.check_operator(p)?;
        let Some(k) = self.stabilizers.iter().position(|s| !s.commutes_with(p)) else {
            let rep = self.group_representative(p);
            let outcome = rep.phase() != p.phase();
            outcomes.record_deterministic(outcome);
            return Ok(Measurement { outcome, random: false });
        };
        let outcome = outcomes.draw(0.5)?;
        let pivot = self.stabilizers[k].clone();
        for j in 0..self.n {
            if j != k && !self.stabilizers[j].commutes_with(p) {
                self.stabilizers[j].mul_assign_right(&pivot);
            }
            if j != k && !self.destabilizers[j].commutes_with(p) {
                self.destabilizers[j].mul_assign_right(&pivot);
                self.destabilizers[j].set_phase(0);
            }
        }
        self.destabilizers[k] = pivot.with_phase(0);
        let mut new = p.clone();
        if outcome {
            new.negate();
        }
        self.stabilizers[k] = new;
        Ok(Measurement { outcome, random: true })
    }

    /// Removes qubit `q`, which must be unentangled: some `±X_q`, `±Y_q` or
    /// `±Z_q` has to lie in the stabilizer group.
    pub fn remove_qubit(&mut self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::OutOfRange { qubit: q, n: self.n });
        }
        let local = [Pauli::X, Pauli::Y, Pauli::Z]
            .into_iter()
            .map(|l| PauliString::single(self.n, q, l))
            .find(|p| self.stabilizers.iter().all(|s| s.commutes_with(p)))
            .ok_or_else(|| Error::Capability(format!("removing entangled qubit {q}")))?;

        // Make `±local` an explicit generator at row k.
        let members: Vec<usize> = (0..self.n).filter(|&j| !self.destabilizers[j].commutes_with(&local)).collect();
        let k = members[0];
        let rep = self.group_representative(&local);
        let dk = self.destabilizers[k].clone();
        for &j in &members[1..] {
            self.destabilizers[j].mul_assign_right(&dk);
            self.destabilizers[j].set_phase(0);
        }
        self.stabilizers[k] = rep;

        // Clear qubit q from every other row.
        let pivot = self.stabilizers[k].clone();
        for j in 0..self.n {
            if j == k {
                continue;
            }
            if self.stabilizers[j].get(q) != Pauli::I {
                self.stabilizers[j].mul_assign_right(&pivot);
            }
            if self.destabilizers[j].get(q) != Pauli::I {
                self.destabilizers[j].mul_assign_right(&pivot);
                self.destabilizers[j].set_phase(0);
            }
            debug_assert_eq!(self.stabilizers[j].get(q), Pauli::I);
            debug_assert_eq!(self.destabilizers[j].get(q), Pauli::I);
        }
        self.stabilizers.remove(k);
        self.destabilizers.remove(k);
        for p in self.stabilizers.iter_mut().chain(self.destabilizers.iter_mut()) {
            p.remove_qubit(q);
        }
        self.n -= 1;
        Ok(())
    }

    /// Checks commutation relations and Hermitian stabilizers. Full rank
    /// follows from the destabilizer pairing.
    pub fn is_consistent(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            if !self.stabilizers[i].is_hermitian() {
                return false;
            }
            for j in 0..n {
                if !self.stabilizers[i].commutes_with(&self.stabilizers[j]) {
                    return false;
                }
                if self.stabilizers[i].commutes_with(&self.destabilizers[j]) == (i == j) {
                    return false;
                }
                if !self.destabilizers[i].commutes_with(&self.destabilizers[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// True iff both tableaux describe the same state.
    pub fn same_state(&self, other: &StabilizerTableau) -> bool {
        self.n == other.n && other.stabilizers.iter().all(|s| matches!(self.expectation(s), Ok(1)))
    }
}

/// 1D cluster state `∏ CZ_{i,i+1} |+⟩^n`, with the closing `CZ_{n,1}` for
/// periodic boundaries.
pub fn prepare_cluster(n: usize, boundary: Boundary) -> Result<StabilizerTableau> {
    let min = match boundary {
        Boundary::Open => 2,
        Boundary::Periodic => 3,
    };
    if n < min {
        return Err(Error::InvalidSize(format!("cluster with {boundary:?} boundary needs n >= {min}, got {n}")));
    }
    let mut t = StabilizerTableau::new_plus_state(n)?;
    for i in 0..n - 1 {
        t.apply_clifford(CliffordGate::CZ, &[i, i + 1])?;
    }
    if boundary == Boundary::Periodic {
        t.apply_clifford(CliffordGate::CZ, &[n - 1, 0])?;
    }
    Ok(t)
}

/// The canonical cluster generators `Z_{i-1} X_i Z_{i+1}`, truncated at open
/// edges.
pub fn cluster_generators(n: usize, boundary: Boundary) -> Vec<PauliString> {
    (0..n)
        .map(|i| {
            let mut ops = vec![(i, Pauli::X)];
            if i > 0 {
                ops.push((i - 1, Pauli::Z));
            } else if boundary == Boundary::Periodic {
                ops.push((n - 1, Pauli::Z));
            }
            if i + 1 < n {
                ops.push((i + 1, Pauli::Z));
            } else if boundary == Boundary::Periodic {
                ops.push((0, Pauli::Z));
            }
            PauliString::from_sparse(n, &ops)
        })
        .collect()
}

/// The two `Z2 x Z2` generators of the cluster chain. Sites are
/// 1-based when describing parity: "even" means sites 2, 4, ...
pub fn symmetry_operators(n: usize, boundary: Boundary) -> Result<(PauliString, PauliString)> {
    let min = match boundary {
        Boundary::Open => 2,
        Boundary::Periodic => 3,
    };
    if n < min {
        return Err(Error::InvalidSize(format!("symmetry operators need n >= {min}, got {n}")));
    }
    let x_on = |odd: bool| {
        let ops: Vec<(usize, Pauli)> = (0..n).filter(|i| (i % 2 == 0) == odd).map(|i| (i, Pauli::X)).collect();
        PauliString::from_sparse(n, &ops)
    };
    let z1 = PauliString::single(n, 0, Pauli::Z);
    let zn = PauliString::single(n, n - 1, Pauli::Z);
    let (even, odd) = (x_on(false), x_on(true));
    let n_even = n.is_multiple_of(2);
    Ok(match (boundary, n_even) {
        (Boundary::Periodic, true) => (even, odd),
        (Boundary::Periodic, false) => (z1.mul(&even).mul(&zn), z1.mul(&odd).mul(&zn)),
        (Boundary::Open, true) => (z1.mul(&even), odd.mul(&zn)),
        (Boundary::Open, false) => (z1.mul(&even).mul(&zn), odd),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcome::OutcomePolicy;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn forced(bits: &[bool]) -> OutcomeStream {
        OutcomePolicy::Forced(bits.to_vec()).stream()
    }

    #[test]
    fn plus_state_generators() {
        let t = StabilizerTableau::new_plus_state(3).unwrap();
        let s: Vec<String> = t.stabilizers().iter().map(|s| s.to_string()).collect();
        assert_eq!(s, ["+XII", "+IXI", "+IIX"]);
        let d: Vec<String> = t.destabilizers().iter().map(|s| s.to_string()).collect();
        assert_eq!(d, ["+ZII", "+IZI", "+IIZ"]);
        assert!(matches!(StabilizerTableau::new_plus_state(0), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn forced_projection() {
        let mut t = StabilizerTableau::new_plus_state(3).unwrap();
        let m = t.measure_pauli(&p("ZII"), &mut forced(&[false])).unwrap();
        assert_eq!(m, Measurement { outcome: false, random: true });
        assert_eq!(t.expectation(&p("ZII")).unwrap(), 1);
        assert_eq!(t.expectation(&p("IXI")).unwrap(), 1);
        assert_eq!(t.expectation(&p("IIX")).unwrap(), 1);
        assert!(t.is_consistent());
    }

    #[test]
    fn single_qubit_gates() {
        let mut t = StabilizerTableau::new_plus_state(1).unwrap();
        t.apply_clifford(CliffordGate::H, &[0]).unwrap();
        assert_eq!(t.stabilizers()[0].to_string(), "+Z");
        let mut t = StabilizerTableau::new_plus_state(1).unwrap();
        t.apply_clifford(CliffordGate::S, &[0]).unwrap();
        assert_eq!(t.stabilizers()[0].to_string(), "+Y");
    }

    #[test]
    fn cz_on_plus_pair() {
        let mut t = StabilizerTableau::new_plus_state(2).unwrap();
        t.apply_clifford(CliffordGate::CZ, &[0, 1]).unwrap();
        assert_eq!(t.expectation(&p("XZ")).unwrap(), 1);
        assert_eq!(t.expectation(&p("ZX")).unwrap(), 1);
    }

    #[test]
    fn deterministic_and_forced_measurements() {
        let mut t = StabilizerTableau::new_zero_state(1).unwrap();
        let mut s = forced(&[]);
        let m = t.measure_pauli(&p("Z"), &mut s).unwrap();
        assert_eq!(m, Measurement { outcome: false, random: false });
        let m = t.measure_pauli(&p("X"), &mut forced(&[true])).unwrap();
        assert!(m.outcome && m.random);
        assert_eq!(t.expectation(&p("-X")).unwrap(), 1);
        assert!(matches!(t.measure_pauli(&p("Z"), &mut forced(&[])), Err(Error::OutcomesExhausted { .. })));
        assert!(matches!(t.measure_pauli(&p("I"), &mut forced(&[])), Err(Error::IdentityMeasurement)));
    }

    #[test]
    fn cluster_bulk_stabilizer_is_deterministic() {
        let mut t = prepare_cluster(5, Boundary::Open).unwrap();
        let m = t.measure_pauli(&p("IZXZI"), &mut forced(&[])).unwrap();
        assert_eq!(m, Measurement { outcome: false, random: false });
    }

    #[test]
    fn cluster_groups() {
        let t = prepare_cluster(3, Boundary::Open).unwrap();
        for s in ["XZI", "ZXZ", "IZX"] {
            assert_eq!(t.expectation(&p(s)).unwrap(), 1, "{s}");
        }
        let t = prepare_cluster(4, Boundary::Periodic).unwrap();
        for s in ["XZIZ", "ZXZI", "IZXZ", "ZIZX"] {
            assert_eq!(t.expectation(&p(s)).unwrap(), 1, "{s}");
        }
        let t = prepare_cluster(2, Boundary::Open).unwrap();
        assert_eq!(t.expectation(&p("XZ")).unwrap(), 1);
        assert_eq!(t.expectation(&p("ZX")).unwrap(), 1);
        assert!(prepare_cluster(1, Boundary::Open).is_err());
        assert!(prepare_cluster(2, Boundary::Periodic).is_err());
    }

    #[test]
    fn symmetry_operator_table() {
        let (a, b) = symmetry_operators(4, Boundary::Open).unwrap();
        assert_eq!((a.to_string(), b.to_string()), ("+ZXIX".into(), "+XIXZ".into()));
        let (a, b) = symmetry_operators(5, Boundary::Open).unwrap();
        assert_eq!((a.to_string(), b.to_string()), ("+ZXIXZ".into(), "+XIXIX".into()));
        let (a, b) = symmetry_operators(4, Boundary::Periodic).unwrap();
        assert_eq!((a.to_string(), b.to_string()), ("+IXIX".into(), "+XIXI".into()));
    }

    #[test]
    fn symmetry_commutes_with_cluster() {
        for n in 2..=12 {
            for b in [Boundary::Open, Boundary::Periodic] {
                if b == Boundary::Periodic && n < 3 {
                    continue;
                }
                let (g1, g2) = symmetry_operators(n, b).unwrap();
                for s in cluster_generators(n, b) {
                    assert!(s.commutes_with(&g1) && s.commutes_with(&g2), "n={n} {b:?}");
                }
                let t = prepare_cluster(n, b).unwrap();
                assert_ne!(t.expectation(&g1).unwrap(), 0);
                assert_ne!(t.expectation(&g2).unwrap(), 0);
            }
        }
    }

    #[test]
    fn all_cluster_stabilizers_read_zero() {
        for n in 2..=9 {
            let mut t = prepare_cluster(n, Boundary::Open).unwrap();
            let mut s = forced(&[]);
            for g in cluster_generators(n, Boundary::Open) {
                let m = t.measure_pauli(&g, &mut s).unwrap();
                assert_eq!(m, Measurement { outcome: false, random: false });
            }
        }
    }

    #[test]
    fn remove_measured_qubit() {
        let mut t = prepare_cluster(3, Boundary::Open).unwrap();
        t.measure_pauli(&p("ZII"), &mut forced(&[false])).unwrap();
        t.remove_qubit(0).unwrap();
        assert_eq!(t.num_qubits(), 2);
        assert!(t.is_consistent());
        // Z-measuring an end of the chain leaves a 2-qubit cluster.
        assert_eq!(t.expectation(&p("XZ")).unwrap(), 1);
        assert_eq!(t.expectation(&p("ZX")).unwrap(), 1);
        let mut t = prepare_cluster(3, Boundary::Open).unwrap();
        assert!(t.remove_qubit(1).is_err());
    }
}
