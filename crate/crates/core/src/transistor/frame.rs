//! Byproduct frames: closed-form parity laws and the Clifford conjugation
//! engine they are checked against.
//!
//! A frame `F` for outcome record `i` means the branch applies `F · U`, with
//! `U` the block's nominal gate, so applying `F` to the outputs corrects it.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::outcome::OutcomePolicy;
use crate::pauli::{CliffordGate, Pauli, PauliString};
use crate::register::{QubitId, Register, TableauRegister};
use crate::tableau::InitState;

use super::block::execute_unframed;
use super::{TransistorKind, TransistorSpec};

/// Pauli correction on a block's output ports, tracked up to phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ByproductFrame(PauliString);

impl ByproductFrame {
    pub fn identity(ports: usize) -> Self {
        ByproductFrame(PauliString::identity(ports))
    }

    pub fn from_pauli(p: PauliString) -> Self {
        ByproductFrame(p.with_phase(0))
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let ops: Vec<(usize, Pauli)> = letters.iter().copied().enumerate().collect();
        ByproductFrame(PauliString::from_sparse(letters.len(), &ops))
    }

    pub fn pauli(&self) -> &PauliString {
        &self.0
    }

    pub fn ports(&self) -> usize {
        self.0.num_qubits()
    }

    pub fn port(&self, k: usize) -> Pauli {
        self.0.get(k)
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    /// Frame of applying `self` and then `other`.
    pub fn compose(&self, other: &ByproductFrame) -> ByproductFrame {
        ByproductFrame::from_pauli(other.0.mul(&self.0))
    }
}

impl fmt::Display for ByproductFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.ports() {
            write!(f, "{}", self.port(k).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ByproductFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ByproductFrame({self})")
    }
}

fn check_length(spec: &TransistorSpec, outcomes: &[bool]) -> Result<()> {
    if outcomes.len() != spec.outcome_count() {
        return Err(Error::OutcomeLength { expected: spec.outcome_count(), got: outcomes.len() });
    }
    Ok(())
}

fn single(p: Pauli) -> PauliString {
    PauliString::from_sparse(1, &[(0, p)])
}

/// Parity laws for the wires and the two-row honeycomb ladder; `None` for
/// kinds without a closed form.
pub fn closed_form_frame(spec: &TransistorSpec, outcomes: &[bool]) -> Result<Option<ByproductFrame>> {
    check_length(spec, outcomes)?;
    let l = spec.measured_length;
    let mut acc = PauliString::identity(spec.ports());
    let fired = outcomes.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k + 1);
    match spec.kind {
        TransistorKind::HWire => {
            // Z^{i_k} passes L-k+1 Hadamards.
            for k in fired {
                acc.mul_assign_right(&single(if (l - k).is_multiple_of(2) { Pauli::X } else { Pauli::Z }));
            }
        }
        TransistorKind::SWire => {
            // Z^{i_k} passes L-k+2 copies of Q, which cycles Z -> X -> Y -> Z.
            for k in fired {
                let p = match (l + 2 - k) % 3 {
                    1 => Pauli::X,
                    2 => Pauli::Y,
                    _ => Pauli::Z,
                };
                acc.mul_assign_right(&single(p));
            }
        }
        TransistorKind::HoneycombCZ if spec.width == 2 => return Ok(Some(honeycomb_closed_form(outcomes))),
        _ => return Ok(None),
    }
    Ok(Some(ByproductFrame::from_pauli(acc)))
}

/// Two-row honeycomb frame from an outcome record laid out column by
/// column as `[a_1, b_1, a_2, b_2, ...]`, `a` on row 1 and `b` on row 2.
///
/// Leg `a` picks up `Z^{Σ_{c odd} a_c + Σ_{c ≡ 2 mod 4} b_c} X^{Σ_{c even} a_c}`
/// and leg `b` the mirror image.
pub fn honeycomb_closed_form(outcomes: &[bool]) -> ByproductFrame {
    let mut z = [false; 2];
    let mut x = [false; 2];
    for (k, &bit) in outcomes.iter().enumerate() {
        let (c, leg) = (k / 2 + 1, k % 2);
        if c % 2 == 1 {
            z[leg] ^= bit;
        } else {
            x[leg] ^= bit;
            if c % 4 == 2 {
                z[1 - leg] ^= bit;
            }
        }
    }
    let letters: Vec<Pauli> = (0..2).map(|leg| Pauli::from_bits(x[leg], z[leg])).collect();
    ByproductFrame::from_letters(&letters)
}

fn image_search(
    reg: &TableauRegister,
    reference: QubitId,
    letter: Pauli,
    outputs: &[QubitId],
) -> Result<(PauliString, bool)> {
    let k = outputs.len();
    for code in 1..(1usize << (2 * k)) {
        let letters: Vec<Pauli> =
            (0..k).map(|j| Pauli::from_bits((code >> (2 * j)) & 1 == 1, (code >> (2 * j + 1)) & 1 == 1)).collect();
        let mut ops = vec![(reference, letter)];
        ops.extend(outputs.iter().copied().zip(letters.iter().copied()));
        match reg.expectation(&ops)? {
            0 => continue,
            e => return Ok((ByproductFrame::from_letters(&letters).0, e < 0)),
        }
    }
    Err(Error::Capability("block output is not a Clifford image of its input".into()))
}

/// Images `U X_j U†`, `U Z_j U†` of every input generator (with signs) for
/// one outcome branch, computed on the tableau from the block's Choi state.
fn branch_images(spec: &TransistorSpec, outcomes: &[bool]) -> Result<Vec<(PauliString, bool)>> {
    let mut reg = TableauRegister::new();
    let mut refs = Vec::new();
    let mut inputs = Vec::new();
    for _ in 0..spec.ports() {
        let r = reg.alloc(InitState::Plus.into())?;
        let i = reg.alloc(InitState::Zero.into())?;
        reg.clifford(CliffordGate::CX, &[r, i])?;
        refs.push(r);
        inputs.push(i);
    }
    let mut stream = OutcomePolicy::Forced(outcomes.to_vec()).stream();
    let outputs = execute_unframed(spec, &mut reg, &inputs, &mut stream)?;
    stream.finish()?;
    let mut images = Vec::with_capacity(2 * refs.len());
    for &r in &refs {
        for letter in [Pauli::X, Pauli::Z] {
            images.push(image_search(&reg, r, letter, &outputs)?);
        }
    }
    Ok(images)
}

/// Frame of one branch relative to the all-zero branch, derived by tracking
/// how the branch conjugates every input Pauli.
pub fn conjugation_frame(spec: &TransistorSpec, outcomes: &[bool]) -> Result<ByproductFrame> {
    check_length(spec, outcomes)?;
    let zero = branch_images(spec, &vec![false; outcomes.len()])?;
    let this = branch_images(spec, outcomes)?;
    frame_from_images(spec, &zero, &this)
}

fn frame_from_images(
    spec: &TransistorSpec,
    zero: &[(PauliString, bool)],
    this: &[(PauliString, bool)],
) -> Result<ByproductFrame> {
    let mut acc = PauliString::identity(spec.ports());
    for j in 0..spec.ports() {
        let (x_img, x_sign) = &zero[2 * j];
        let (z_img, z_sign) = &zero[2 * j + 1];
        let (x_now, x_sign_now) = &this[2 * j];
        let (z_now, z_sign_now) = &this[2 * j + 1];
        if x_img != x_now || z_img != z_now {
            return Err(Error::Capability(format!("{} branches differ by more than a Pauli frame", spec.kind.name())));
        }
        // The frame anticommutes with U X_j U† exactly when that image
        // flips sign, which makes its Z_j-preimage component nontrivial.
        if x_sign != x_sign_now {
            acc.mul_assign_right(z_img);
        }
        if z_sign != z_sign_now {
            acc.mul_assign_right(x_img);
        }
    }
    Ok(ByproductFrame::from_pauli(acc))
}

/// Frames of the unit outcome records, combined linearly over GF(2).
#[derive(Debug, Clone)]
pub struct FrameTable {
    spec: TransistorSpec,
    unit: Vec<ByproductFrame>,
}

impl FrameTable {
    /// Builds the table with the conjugation engine.
    pub fn new(spec: &TransistorSpec) -> Result<Self> {
        spec.validate_size()?;
        let m = spec.outcome_count();
        let zero = branch_images(spec, &vec![false; m])?;
        let unit = (0..m)
            .map(|k| {
                let mut bits = vec![false; m];
                bits[k] = true;
                frame_from_images(spec, &zero, &branch_images(spec, &bits)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FrameTable { spec: *spec, unit })
    }

    /// Process-wide table per spec; tables are pure functions of the spec.
    pub fn cached(spec: &TransistorSpec) -> Result<Arc<FrameTable>> {
        static CACHE: OnceLock<Mutex<HashMap<TransistorSpec, Arc<FrameTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.lock().expect("frame cache poisoned").get(spec) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(FrameTable::new(spec)?);
        cache.lock().expect("frame cache poisoned").insert(*spec, Arc::clone(&table));
        Ok(table)
    }

    pub fn unit_frames(&self) -> &[ByproductFrame] {
        &self.unit
    }

    pub fn frame(&self, outcomes: &[bool]) -> Result<ByproductFrame> {
        check_length(&self.spec, outcomes)?;
        let mut acc = ByproductFrame::identity(self.spec.ports());
        for (f, &b) in self.unit.iter().zip(outcomes) {
            if b {
                acc = acc.compose(f);
            }
        }
        Ok(acc)
    }
}

/// Byproduct of an outcome record: the closed-form law where one exists,
/// otherwise the conjugation engine.
pub fn byproduct_from_outcomes(spec: &TransistorSpec, outcomes: &[bool]) -> Result<ByproductFrame> {
    spec.validate_size()?;
    match closed_form_frame(spec, outcomes)? {
        Some(f) => Ok(f),
        None => FrameTable::cached(spec)?.frame(outcomes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn letters(f: &ByproductFrame) -> String {
        (0..f.ports()).map(|k| f.port(k).letter()).collect()
    }

    #[test]
    fn wire_examples() {
        let h = closed_form_frame(&TransistorSpec::h_wire(3), &[true, false, false]).unwrap().unwrap();
        assert_eq!(letters(&h), "X");
        let s = closed_form_frame(&TransistorSpec::s_wire(3), &[false, false, true]).unwrap().unwrap();
        assert_eq!(letters(&s), "Y");
    }

    #[test]
    fn honeycomb_example() {
        let mut bits = vec![false; TransistorSpec::honeycomb_cz(2, 3).outcome_count()];
        bits[..4].copy_from_slice(&[true, false, false, true]);
        assert_eq!(letters(&honeycomb_closed_form(&bits)), "IX");
    }

    #[test]
    fn closed_forms_match_engine() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for spec in [
            TransistorSpec::h_wire(5),
            TransistorSpec::identity_wire(4),
            TransistorSpec::s_wire(6),
            TransistorSpec::honeycomb_cz(2, 3),
        ] {
            for _ in 0..24 {
                let bits: Vec<bool> = (0..spec.outcome_count()).map(|_| rng.random()).collect();
                let closed = closed_form_frame(&spec, &bits).unwrap().unwrap();
                assert_eq!(closed, conjugation_frame(&spec, &bits).unwrap(), "{spec:?} {bits:?}");
            }
        }
    }

    #[test]
    fn table_is_linear() {
        let spec = TransistorSpec::square_cz(2, 7);
        let table = FrameTable::new(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..8 {
            let a: Vec<bool> = (0..spec.outcome_count()).map(|_| rng.random()).collect();
            let b: Vec<bool> = (0..spec.outcome_count()).map(|_| rng.random()).collect();
            let sum: Vec<bool> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let composed = table.frame(&a).unwrap().compose(&table.frame(&b).unwrap());
            assert_eq!(table.frame(&sum).unwrap(), composed);
            assert_eq!(conjugation_frame(&spec, &sum).unwrap(), composed);
        }
    }

    #[test]
    fn wrong_length_is_rejected() {
        let spec = TransistorSpec::h_wire(3);
        assert!(matches!(closed_form_frame(&spec, &[true]), Err(Error::OutcomeLength { expected: 3, got: 1 })));
    }
}
