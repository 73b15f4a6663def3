//! Signed n-qubit Pauli operators.
//!
//! A [`PauliString`] stores one bit per qubit for the X part and one for the
//! Z part, packed into 64-bit words, plus a phase `i^phase`. The pair
//! `(x, z) = (1, 1)` denotes the Hermitian letter `Y`, so `+Y` has phase 0.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    /// Exponent of `i`, always in `0..4`.
    phase: u8,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(p, q)| (p & q).count_ones()).sum()
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: vec![0; words(n)], z: vec![0; words(n)], phase: 0 }
    }

    /// Single-letter operator `p` on `qubit` (0-based).
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(qubit, p);
        s
    }

    /// Builds an operator from `(qubit, letter)` pairs; later pairs overwrite
    /// earlier ones on the same qubit.
    pub fn from_sparse(n: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n);
        for &(q, p) in ops {
            s.set(q, p);
        }
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn set_phase(&mut self, phase: u8) {
        self.phase = phase % 4;
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.set_phase(phase);
        self
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) % 4;
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// `Some(true)` for a `-` sign, `Some(false)` for `+`, `None` for `±i`.
    pub fn sign_bit(&self) -> Option<bool> {
        match self.phase {
            0 => Some(false),
            2 => Some(true),
            _ => None,
        }
    }

    pub fn get(&self, q: usize) -> Pauli {
        let (w, b) = (q / 64, q % 64);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    fn put(bits: &mut [u64], q: usize, v: bool) {
        let (w, b) = (q / 64, q % 64);
        if v {
            bits[w] |= 1 << b;
        } else {
            bits[w] &= !(1 << b);
        }
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (xb, zb) = p.bits();
        Self::put(&mut self.x, q, xb);
        Self::put(&mut self.z, q, zb);
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n, other.n);
        (popcount_and(&self.x, &other.z) + popcount_and(&self.z, &other.x)).is_multiple_of(2)
    }

    /// Operator product `self · other`, phase included.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut out = self.clone();
        out.mul_assign_right(other);
        out
    }

    /// `self ← self · other`.
    pub fn mul_assign_right(&mut self, other: &PauliString) {
        debug_assert_eq!(self.n, other.n);
        // Letters relate to the X^x Z^z form by Y = i XZ, so track the
        // conversion in and out of that form around the (-1)^{z1·x2} swap.
        let ys = popcount_and(&self.x, &self.z) + popcount_and(&other.x, &other.z);
        let swap = 2 * popcount_and(&self.z, &other.x);
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
        let ys_out = popcount_and(&self.x, &self.z);
        let total = self.phase as i64 + other.phase as i64 + ys as i64 + swap as i64 - ys_out as i64;
        self.phase = total.rem_euclid(4) as u8;
    }

    /// Equality ignoring the phase.
    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Restriction to the listed qubits, in the listed order. Phase is kept.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut out = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set(i, self.get(q));
        }
        out.phase = self.phase;
        out
    }

    /// Embeds `self` into a larger register: qubit `i` goes to `map[i]`.
    pub fn embed(&self, n: usize, map: &[usize]) -> PauliString {
        assert_eq!(map.len(), self.n);
        let mut out = PauliString::identity(n);
        for (i, &q) in map.iter().enumerate() {
            out.set(q, self.get(i));
        }
        out.phase = self.phase;
        out
    }

    /// Tensor product `self ⊗ other` (other's qubits appended after self's).
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut out = PauliString::identity(self.n + other.n);
        for q in 0..self.n {
            out.set(q, self.get(q));
        }
        for q in 0..other.n {
            out.set(self.n + q, other.get(q));
        }
        out.phase = (self.phase + other.phase) % 4;
        out
    }

    pub(crate) fn push_qubit(&mut self) {
        self.n += 1;
        if self.x.len() < words(self.n) {
            self.x.push(0);
            self.z.push(0);
        }
    }

    /// Removes qubit `q`, shifting higher qubits down. The letter on `q` is
    /// discarded.
    pub(crate) fn remove_qubit(&mut self, q: usize) {
        let letters: Vec<Pauli> = (0..self.n).filter(|&i| i != q).map(|i| self.get(i)).collect();
        let phase = self.phase;
        *self = PauliString::identity(self.n - 1);
        for (i, p) in letters.into_iter().enumerate() {
            self.set(i, p);
        }
        self.phase = phase;
    }

    // Conjugation rules P -> U P U^dagger, per gate.

    pub(crate) fn conj_h(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        if x && z {
            self.negate();
        }
        Self::put(&mut self.x, q, z);
        Self::put(&mut self.z, q, x);
    }

    pub(crate) fn conj_s(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        if x && z {
            self.negate();
        }
        Self::put(&mut self.z, q, z ^ x);
    }

    pub(crate) fn conj_sdg(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        if x && !z {
            self.negate();
        }
        Self::put(&mut self.z, q, z ^ x);
    }

    pub(crate) fn conj_x(&mut self, q: usize) {
        if self.z_bit(q) {
            self.negate();
        }
    }

    pub(crate) fn conj_y(&mut self, q: usize) {
        if self.x_bit(q) ^ self.z_bit(q) {
            self.negate();
        }
    }

    pub(crate) fn conj_z(&mut self, q: usize) {
        if self.x_bit(q) {
            self.negate();
        }
    }

    pub(crate) fn conj_cx(&mut self, c: usize, t: usize) {
        let (xc, zc, xt, zt) = (self.x_bit(c), self.z_bit(c), self.x_bit(t), self.z_bit(t));
        if xc && zt && !(xt ^ zc) {
            self.negate();
        }
        Self::put(&mut self.x, t, xt ^ xc);
        Self::put(&mut self.z, c, zc ^ zt);
    }

    pub(crate) fn conj_cz(&mut self, a: usize, b: usize) {
        self.conj_h(b);
        self.conj_cx(a, b);
        self.conj_h(b);
    }

    /// Conjugates by a Clifford gate: `P -> G P G^dagger`.
    pub fn conjugate(&mut self, gate: CliffordGate, targets: &[usize]) -> Result<()> {
        check_targets(gate.arity(), targets, self.n)?;
        match gate {
            CliffordGate::H => self.conj_h(targets[0]),
            CliffordGate::S => self.conj_s(targets[0]),
            CliffordGate::Sdg => self.conj_sdg(targets[0]),
            CliffordGate::X => self.conj_x(targets[0]),
            CliffordGate::Y => self.conj_y(targets[0]),
            CliffordGate::Z => self.conj_z(targets[0]),
            CliffordGate::CZ => self.conj_cz(targets[0], targets[1]),
            CliffordGate::CX => self.conj_cx(targets[0], targets[1]),
        }
        Ok(())
    }
}

/// Gates the stabilizer simulator understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    CZ,
    CX,
}

impl CliffordGate {
    pub fn arity(self) -> usize {
        match self {
            CliffordGate::CZ | CliffordGate::CX => 2,
            _ => 1,
        }
    }
}

pub(crate) fn check_targets(arity: usize, targets: &[usize], n: usize) -> Result<()> {
    if targets.len() != arity {
        return Err(Error::DimensionMismatch(format!("gate expects {arity} target(s), got {}", targets.len())));
    }
    for &t in targets {
        if t >= n {
            return Err(Error::OutOfRange { qubit: t, n });
        }
    }
    if arity == 2 && targets[0] == targets[1] {
        return Err(Error::DuplicateTargets(targets.to_vec()));
    }
    Ok(())
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{sign}")?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[+|-][i]LETTERS`, e.g. `-XIZ` or `+iY`.
    fn from_str(s: &str) -> Result<Self> {
        let mut rest = s.trim();
        let mut phase = 0u8;
        if let Some(r) = rest.strip_prefix('-') {
            phase = 2;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            phase += 1;
            rest = r;
        }
        let mut out = PauliString::identity(rest.len());
        for (q, c) in rest.chars().enumerate() {
            let p = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::DimensionMismatch(format!("invalid Pauli letter '{other}' in \"{s}\""))),
            };
            out.set(q, p);
        }
        out.phase = phase % 4;
        Ok(out)
    }
}
