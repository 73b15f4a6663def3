//! Brute-force complex statevector simulation.
//!
//! Storage is little-endian: qubit `k` is bit `k` of the amplitude index.
//! Gate matrices are big-endian over their target list, so `targets[0]` is
//! the leftmost Kronecker factor.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::outcome::{Measurement, OutcomeStream, DETERMINISTIC_EPS};
use crate::pauli::{Basis, CliffordGate, PauliString};
use crate::tableau::{InitState, StabilizerTableau};

pub type Matrix = DMatrix<C64>;

pub const MAX_QUBITS: usize = 22;
pub const UNITARY_TOL: f64 = 1e-12;
const ZERO_PROBABILITY: f64 = 1e-14;

pub mod gates {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;

    fn m2(a: [C64; 4]) -> Matrix {
        Matrix::from_row_slice(2, 2, &a)
    }

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    pub fn identity(dim: usize) -> Matrix {
        Matrix::identity(dim, dim)
    }

    pub fn h() -> Matrix {
        let s = r(FRAC_1_SQRT_2);
        m2([s, s, s, -s])
    }

    pub fn x() -> Matrix {
        m2([r(0.0), r(1.0), r(1.0), r(0.0)])
    }

    pub fn y() -> Matrix {
        m2([r(0.0), -C64::i(), C64::i(), r(0.0)])
    }

    pub fn z() -> Matrix {
        m2([r(1.0), r(0.0), r(0.0), r(-1.0)])
    }

    pub fn s() -> Matrix {
        m2([r(1.0), r(0.0), r(0.0), C64::i()])
    }

    pub fn sdg() -> Matrix {
        m2([r(1.0), r(0.0), r(0.0), -C64::i()])
    }

    pub fn t() -> Matrix {
        m2([r(1.0), r(0.0), r(0.0), C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])
    }

    pub fn tdg() -> Matrix {
        t().adjoint()
    }

    /// `Q = HS`, the native gate of the S-wire.
    pub fn q() -> Matrix {
        h() * s()
    }

    pub fn cz() -> Matrix {
        Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![r(1.0), r(1.0), r(1.0), r(-1.0)]))
    }

    pub fn cx() -> Matrix {
        let mut m = Matrix::zeros(4, 4);
        m[(0, 0)] = r(1.0);
        m[(1, 1)] = r(1.0);
        m[(2, 3)] = r(1.0);
        m[(3, 2)] = r(1.0);
        m
    }

    pub fn swap() -> Matrix {
        let mut m = Matrix::zeros(4, 4);
        m[(0, 0)] = r(1.0);
        m[(1, 2)] = r(1.0);
        m[(2, 1)] = r(1.0);
        m[(3, 3)] = r(1.0);
        m
    }

    pub fn clifford(gate: CliffordGate) -> Matrix {
        match gate {
            CliffordGate::H => h(),
            CliffordGate::S => s(),
            CliffordGate::Sdg => sdg(),
            CliffordGate::X => x(),
            CliffordGate::Y => y(),
            CliffordGate::Z => z(),
            CliffordGate::CZ => cz(),
            CliffordGate::CX => cx(),
        }
    }

    pub fn pauli(p: &PauliString) -> Matrix {
        let mut m = Matrix::identity(1, 1);
        for q in 0..p.num_qubits() {
            let f = match p.get(q) {
                crate::pauli::Pauli::I => identity(2),
                crate::pauli::Pauli::X => x(),
                crate::pauli::Pauli::Y => y(),
                crate::pauli::Pauli::Z => z(),
            };
            m = m.kronecker(&f);
        }
        m * C64::i().powu(p.phase() as u32)
    }

    /// `⊗` of a list, leftmost factor first.
    pub fn kron_all(factors: &[Matrix]) -> Matrix {
        factors.iter().fold(Matrix::identity(1, 1), |acc, f| acc.kronecker(f))
    }

    pub fn power(m: &Matrix, k: usize) -> Matrix {
        let mut out = Matrix::identity(m.nrows(), m.ncols());
        for _ in 0..k {
            out = &out * m;
        }
        out
    }

    /// Embeds a gate acting on `targets` into an `n`-qubit operator
    /// (big-endian over all `n` qubits, qubit 0 leftmost).
    pub fn embed(m: &Matrix, targets: &[usize], n: usize) -> Result<Matrix> {
        let dim = 1usize << n;
        let mut out = Matrix::zeros(dim, dim);
        for col in 0..dim {
            let mut sv = StateVector::basis_big_endian(n, col)?;
            sv.apply_matrix_unchecked(m, targets)?;
            for row in 0..dim {
                out[(row, col)] = sv.amps[reverse_bits(row, n)];
            }
        }
        Ok(out)
    }

    fn reverse_bits(i: usize, n: usize) -> usize {
        (0..n).fold(0, |acc, k| acc | (((i >> k) & 1) << (n - 1 - k)))
    }
}

/// Single-qubit eigenvector of `basis` for outcome bit `outcome`
/// (`false` is the `+1` eigenvalue).
pub fn basis_vector(basis: Basis, outcome: bool) -> [C64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if outcome { -1.0 } else { 1.0 };
    match basis {
        Basis::Z if !outcome => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        Basis::Z => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        Basis::X => [C64::new(s, 0.0), C64::new(sign * s, 0.0)],
        Basis::Y => [C64::new(s, 0.0), C64::new(0.0, sign * s)],
    }
}

pub fn init_vector(init: InitState) -> [C64; 2] {
    match init {
        InitState::Zero => basis_vector(Basis::Z, false),
        InitState::One => basis_vector(Basis::Z, true),
        InitState::Plus => basis_vector(Basis::X, false),
        InitState::Minus => basis_vector(Basis::X, true),
    }
}

/// `T|+⟩`.
pub fn magic_vector() -> [C64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(s, 0.0), C64::from_polar(s, std::f64::consts::FRAC_PI_4)]
}

pub fn is_unitary(m: &Matrix, tol: f64) -> bool {
    m.is_square() && deviation_from_unitary(m) <= tol
}

fn deviation_from_unitary(m: &Matrix) -> f64 {
    let g = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// True iff `a = e^{iθ} b` entrywise within `tol` for the optimal `θ`.
pub fn equal_up_to_global_phase(a: &Matrix, b: &Matrix, tol: f64) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    let overlap: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    Ok(a.iter().zip(b.iter()).all(|(x, y)| (x - phase * y).norm() <= tol))
}

/// Like [`equal_up_to_global_phase`] after scaling both to unit Frobenius
/// norm, then back to the norm of `b`.
pub fn proportional(a: &Matrix, b: &Matrix, tol: f64) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(na == nb);
    }
    equal_up_to_global_phase(&(a * C64::new(nb / na, 0.0)), b, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    fn check_size(n: usize) -> Result<()> {
        if n > MAX_QUBITS {
            return Err(Error::InvalidSize(format!("dense oracle is capped at {MAX_QUBITS} qubits, got {n}")));
        }
        Ok(())
    }

    /// `|0...0⟩`. Zero qubits gives the scalar state `1`.
    pub fn new_zero(n: usize) -> Result<Self> {
        Self::check_size(n)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidSize(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let n = amps.len().trailing_zeros() as usize;
        Self::check_size(n)?;
        let mut s = StateVector { n, amps };
        s.normalize()?;
        Ok(s)
    }

    /// Computational basis state; `bits[k]` is the value of qubit `k`.
    pub fn basis(bits: &[bool]) -> Result<Self> {
        let mut s = Self::new_zero(bits.len())?;
        let idx = bits.iter().enumerate().fold(0, |acc, (k, &b)| acc | ((b as usize) << k));
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[idx] = C64::new(1.0, 0.0);
        Ok(s)
    }

    fn basis_big_endian(n: usize, index: usize) -> Result<Self> {
        let bits: Vec<bool> = (0..n).map(|k| (index >> (n - 1 - k)) & 1 == 1).collect();
        Self::basis(&bits)
    }

    pub fn product(factors: &[[C64; 2]]) -> Result<Self> {
        let mut s = Self::new_zero(0)?;
        for f in factors {
            s.push_qubit(*f)?;
        }
        s.normalize()?;
        Ok(s)
    }

    /// Haar-random state from complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::check_size(n)?;
        let amps = (0..1usize << n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        Self::from_amplitudes(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm < 1e-300 {
            return Err(Error::ZeroProbability);
        }
        for a in &mut self.amps {
            *a /= norm;
        }
        Ok(())
    }

    /// Appends a new most-significant qubit in the given single-qubit state.
    pub fn push_qubit(&mut self, v: [C64; 2]) -> Result<usize> {
        Self::check_size(self.n + 1)?;
        let old = std::mem::take(&mut self.amps);
        self.amps = old.iter().map(|a| a * v[0]).chain(old.iter().map(|a| a * v[1])).collect();
        self.n += 1;
        Ok(self.n - 1)
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n {
                return Err(Error::OutOfRange { qubit: t, n: self.n });
            }
            if targets[..i].contains(&t) {
                return Err(Error::DuplicateTargets(targets.to_vec()));
            }
        }
        Ok(())
    }

    pub fn apply_matrix(&mut self, m: &Matrix, targets: &[usize]) -> Result<()> {
        if !m.is_square() || m.nrows() != 1 << targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on {} target(s)",
                m.nrows(),
                m.ncols(),
                targets.len()
            )));
        }
        let dev = deviation_from_unitary(m);
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        self.apply_matrix_unchecked(m, targets)
    }

    /// Applies any square operator of matching size; no unitarity check and
    /// no renormalization.
    pub(crate) fn apply_matrix_unchecked(&mut self, m: &Matrix, targets: &[usize]) -> Result<()> {
        self.check_targets(targets)?;
        let k = targets.len();
        let dim = 1usize << k;
        let offsets: Vec<usize> =
            (0..dim).map(|j| (0..k).fold(0, |acc, t| acc | (((j >> (k - 1 - t)) & 1) << targets[t]))).collect();
        let mask = targets.iter().fold(0usize, |acc, &t| acc | (1 << t));
        let mut old = vec![C64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for j in 0..dim {
                old[j] = self.amps[base | offsets[j]];
            }
            for i in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..dim {
                    acc += m[(i, j)] * old[j];
                }
                self.amps[base | offsets[i]] = acc;
            }
        }
        Ok(())
    }

    pub fn apply_clifford(&mut self, gate: CliffordGate, targets: &[usize]) -> Result<()> {
        crate::pauli::check_targets(gate.arity(), targets, self.n)?;
        self.apply_matrix_unchecked(&gates::clifford(gate), targets)
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch(format!("{}-qubit Pauli on {}-qubit state", p.num_qubits(), self.n)));
        }
        let (mut xmask, mut zmask, mut ys) = (0usize, 0usize, 0u32);
        for q in 0..self.n {
            if p.x_bit(q) {
                xmask |= 1 << q;
            }
            if p.z_bit(q) {
                zmask |= 1 << q;
            }
            if p.x_bit(q) && p.z_bit(q) {
                ys += 1;
            }
        }
        // Y = iXZ, so P|b⟩ = i^{phase + #Y} (-1)^{b·z} |b ⊕ x⟩.
        let lead = C64::i().powu((p.phase() as u32 + ys) % 4);
        let old = self.amps.clone();
        for (b, a) in old.iter().enumerate() {
            let sign = if (b & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            self.amps[b ^ xmask] = lead * sign * a;
        }
        Ok(())
    }

    pub fn expectation(&self, p: &PauliString) -> Result<C64> {
        let mut other = self.clone();
        other.apply_pauli(p)?;
        Ok(self.inner(&other))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Largest amplitude difference after aligning the global phase;
    /// infinite for mismatched sizes.
    pub fn phase_distance(&self, other: &StateVector) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        let overlap = other.inner(self);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - phase * b).norm()).fold(0.0, f64::max)
    }

    pub fn equal_up_to_global_phase(&self, other: &StateVector, tol: f64) -> bool {
        self.phase_distance(other) <= tol
    }

    /// Probability of reading `outcome` when measuring `qubit` in `basis`.
    pub fn probability(&self, qubit: usize, basis: Basis, outcome: bool) -> Result<f64> {
        self.check_targets(&[qubit])?;
        let v = basis_vector(basis, outcome);
        let bit = 1usize << qubit;
        let mut p = 0.0;
        for base in 0..self.amps.len() {
            if base & bit == 0 {
                let amp = v[0].conj() * self.amps[base] + v[1].conj() * self.amps[base | bit];
                p += amp.norm_sqr();
            }
        }
        Ok(p)
    }

    /// Projects onto the `outcome` eigenspace and renormalizes, returning the
    /// branch probability.
    pub fn project(&mut self, qubit: usize, basis: Basis, outcome: bool) -> Result<f64> {
        self.check_targets(&[qubit])?;
        let v = basis_vector(basis, outcome);
        let mut proj = Matrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                proj[(i, j)] = v[i] * v[j].conj();
            }
        }
        let mut next = self.clone();
        next.apply_matrix_unchecked(&proj, &[qubit])?;
        let p = next.norm_sqr();
        if p < ZERO_PROBABILITY {
            return Err(Error::ZeroProbability);
        }
        next.normalize()?;
        *self = next;
        Ok(p)
    }

    /// Measures `qubit` in `basis`, drawing from `outcomes` only when both
    /// results are possible.
    pub fn measure(&mut self, qubit: usize, basis: Basis, outcomes: &mut OutcomeStream) -> Result<Measurement> {
        let p_one = self.probability(qubit, basis, true)?;
        let m = if p_one < DETERMINISTIC_EPS {
            outcomes.record_deterministic(false);
            Measurement { outcome: false, random: false }
        } else if p_one > 1.0 - DETERMINISTIC_EPS {
            outcomes.record_deterministic(true);
            Measurement { outcome: true, random: false }
        } else {
            Measurement { outcome: outcomes.draw(p_one)?, random: true }
        };
        self.project(qubit, basis, m.outcome)?;
        Ok(m)
    }

    /// Contracts `qubit` with `⟨v|` and drops it. The qubit must already be
    /// in state `v` (checked to `1e-9` in norm).
    pub fn discard(&mut self, qubit: usize, v: [C64; 2]) -> Result<()> {
        self.check_targets(&[qubit])?;
        let bit = 1usize << qubit;
        let low = bit - 1;
        let mut amps = Vec::with_capacity(self.amps.len() / 2);
        for j in 0..self.amps.len() / 2 {
            let base = (j & low) | ((j & !low) << 1);
            amps.push(v[0].conj() * self.amps[base] + v[1].conj() * self.amps[base | bit]);
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Capability(format!("discarding qubit {qubit} that is still entangled")));
        }
        self.amps = amps;
        self.n -= 1;
        Ok(())
    }

    /// Reorders qubits so that new qubit `k` is old qubit `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<StateVector> {
        if order.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} on {} qubits",
                order.len(),
                self.n
            )));
        }
        self.check_targets(order)?;
        let mut amps = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (old, a) in self.amps.iter().enumerate() {
            let new = order.iter().enumerate().fold(0, |acc, (k, &o)| acc | (((old >> o) & 1) << k));
            amps[new] = *a;
        }
        Ok(StateVector { n: self.n, amps })
    }

    /// Reads the state as a matrix `M[row, col]` with rows indexed
    /// big-endian over `rows` and columns over `cols`. Together the two
    /// lists must cover every qubit exactly once.
    pub fn as_matrix(&self, rows: &[usize], cols: &[usize]) -> Result<Matrix> {
        let all: Vec<usize> = rows.iter().chain(cols).copied().collect();
        if all.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} row+column qubits for a {}-qubit state",
                all.len(),
                self.n
            )));
        }
        self.check_targets(&all)?;
        let index = |list: &[usize], b: usize| list.iter().fold(0usize, |acc, &q| (acc << 1) | ((b >> q) & 1));
        let mut m = Matrix::zeros(1 << rows.len(), 1 << cols.len());
        for (b, a) in self.amps.iter().enumerate() {
            m[(index(rows, b), index(cols, b))] = *a;
        }
        Ok(m)
    }

    /// Dense form of a stabilizer state, up to global phase.
    pub fn from_tableau(t: &StabilizerTableau) -> Result<StateVector> {
        let n = t.num_qubits();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut s = Self::random(n, &mut rng)?;
        for g in t.stabilizers() {
            let mut gs = s.clone();
            gs.apply_pauli(g)?;
            for (a, b) in s.amps.iter_mut().zip(&gs.amps) {
                *a = (*a + b) * 0.5;
            }
        }
        s.normalize()?;
        Ok(s)
    }
}

/// Linear map induced on the edge ports by one measurement branch.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalMap {
    pub input_dim: usize,
    pub output_dim: usize,
    pub matrix: Matrix,
    /// Factor that makes `normalization * matrix` an isometry when the map is
    /// proportional to one.
    pub normalization: f64,
}

impl LogicalMap {
    pub fn new(matrix: Matrix) -> Self {
        let (output_dim, input_dim) = matrix.shape();
        let norm = matrix.norm();
        let normalization = if norm > 0.0 { (input_dim as f64).sqrt() / norm } else { 0.0 };
        LogicalMap { input_dim, output_dim, matrix, normalization }
    }

    pub fn normalized(&self) -> Matrix {
        &self.matrix * C64::new(self.normalization, 0.0)
    }

    /// Singular values all equal within `tol` (relative to the largest).
    pub fn is_proportional_to_isometry(&self, tol: f64) -> bool {
        let sv = self.matrix.clone().singular_values();
        let max = sv.max();
        max > 0.0 && sv.iter().all(|s| (max - s) / max <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn hadamard_makes_plus() {
        let mut s = StateVector::new_zero(1).unwrap();
        s.apply_matrix(&gates::h(), &[0]).unwrap();
        let plus = StateVector::product(&[basis_vector(Basis::X, false)]).unwrap();
        assert!(s.equal_up_to_global_phase(&plus, 1e-15));
    }

    #[test]
    fn cz_on_plus_pair_is_cluster() {
        let mut s = StateVector::product(&[init_vector(InitState::Plus); 2]).unwrap();
        s.apply_matrix(&gates::cz(), &[0, 1]).unwrap();
        for p in ["XZ", "ZX"] {
            let e = s.expectation(&p.parse().unwrap()).unwrap();
            assert!((e - c(1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn t_on_plus_is_magic() {
        let mut s = StateVector::product(&[init_vector(InitState::Plus)]).unwrap();
        s.apply_matrix(&gates::t(), &[0]).unwrap();
        let t = StateVector::product(&[magic_vector()]).unwrap();
        assert!(s.equal_up_to_global_phase(&t, 1e-15));
    }

    #[test]
    fn rejects_non_unitary_and_bad_targets() {
        let mut s = StateVector::new_zero(2).unwrap();
        let m = gates::h() * c(2.0);
        assert!(matches!(s.apply_matrix(&m, &[0]), Err(Error::NotUnitary(_))));
        assert!(matches!(s.apply_matrix(&gates::cz(), &[0, 0]), Err(Error::DuplicateTargets(_))));
        assert!(matches!(s.apply_matrix(&gates::h(), &[2]), Err(Error::OutOfRange { .. })));
        assert!(StateVector::new_zero(MAX_QUBITS + 1).is_err());
    }

    #[test]
    fn projections() {
        let mut s = StateVector::product(&[init_vector(InitState::Plus)]).unwrap();
        let p = s.project(0, Basis::X, false).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        let mut z = StateVector::new_zero(1).unwrap();
        assert!(matches!(z.project(0, Basis::Z, true), Err(Error::ZeroProbability)));
    }

    #[test]
    fn big_endian_targets() {
        // CX with control 1, target 0 on |q0=0, q1=1⟩ gives |1,1⟩.
        let mut s = StateVector::basis(&[false, true]).unwrap();
        s.apply_matrix(&gates::cx(), &[1, 0]).unwrap();
        assert!(s.equal_up_to_global_phase(&StateVector::basis(&[true, true]).unwrap(), 1e-15));
        let e = gates::embed(&gates::cx(), &[0, 1], 2).unwrap();
        assert!(equal_up_to_global_phase(&e, &gates::cx(), 1e-15).unwrap());
    }

    #[test]
    fn phase_equality() {
        let h = gates::h();
        assert!(equal_up_to_global_phase(&h, &(-&h), 1e-12).unwrap());
        assert!(!equal_up_to_global_phase(&h, &gates::s(), 1e-12).unwrap());
        let q3 = gates::power(&gates::q(), 3);
        assert!(equal_up_to_global_phase(&q3, &gates::identity(2), 1e-12).unwrap());
        assert!(equal_up_to_global_phase(&h, &gates::cz(), 1e-12).is_err());
    }

    #[test]
    fn pauli_application_matches_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let base = StateVector::random(3, &mut rng).unwrap();
        for p in ["XYZ", "-iYIX", "+iZZY"] {
            let p: PauliString = p.parse().unwrap();
            let mut a = base.clone();
            a.apply_pauli(&p).unwrap();
            let mut b = base.clone();
            b.apply_matrix_unchecked(&gates::pauli(&p), &[0, 1, 2]).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert!((x - y).norm() < 1e-14, "{p}");
            }
        }
    }

    #[test]
    fn discard_and_permute() {
        let mut s = StateVector::product(&[init_vector(InitState::Zero), init_vector(InitState::Plus)]).unwrap();
        s.discard(0, init_vector(InitState::Zero)).unwrap();
        assert!(s.equal_up_to_global_phase(&StateVector::product(&[init_vector(InitState::Plus)]).unwrap(), 1e-15));
        let s = StateVector::basis(&[true, false, false]).unwrap();
        let p = s.permuted(&[1, 2, 0]).unwrap();
        assert!(p.equal_up_to_global_phase(&StateVector::basis(&[false, false, true]).unwrap(), 1e-15));
    }

    #[test]
    fn tableau_conversion() {
        let mut t = StabilizerTableau::new_plus_state(3).unwrap();
        t.apply_clifford(CliffordGate::CZ, &[0, 1]).unwrap();
        t.apply_clifford(CliffordGate::S, &[2]).unwrap();
        let s = StateVector::from_tableau(&t).unwrap();
        for g in t.stabilizers() {
            assert!((s.expectation(g).unwrap() - c(1.0)).norm() < 1e-12);
        }
    }
}
