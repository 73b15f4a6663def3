//! Measurement-driven gate blocks: specs, size rules, execution and
//! byproduct laws.

mod block;
mod frame;
mod qca;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dense::{gates, Matrix};
use crate::error::Error;

pub use block::{execute, logical_map_of_branch, prepare, BlockRun, PreparedBlock};
pub use frame::{
    byproduct_from_outcomes, closed_form_frame, conjugation_frame, honeycomb_closed_form, ByproductFrame, FrameTable,
};
pub use qca::{honeycomb_t_w_matrix, raussendorf_reflection_check, row_reflection, t_w_matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransistorKind {
    HWire,
    SWire,
    SquareCZ,
    HoneycombCZ,
}

impl TransistorKind {
    pub fn name(self) -> &'static str {
        match self {
            TransistorKind::HWire => "HWire",
            TransistorKind::SWire => "SWire",
            TransistorKind::SquareCZ => "SquareCZ",
            TransistorKind::HoneycombCZ => "HoneycombCZ",
        }
    }
}

/// One gate block.
///
/// `measured_length` counts measured sites for wires (the input site
/// included), total columns `ℓ` for the square ladder, and QCA steps for
/// the honeycomb ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransistorSpec {
    pub kind: TransistorKind,
    pub width: usize,
    pub measured_length: usize,
    /// Marks an even-length H-wire that is used as a plain identity wire.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub identity_wire: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeViolation {
    pub spec: TransistorSpec,
    pub message: String,
}

impl fmt::Display for SizeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (w={}, length={}): {}",
            self.spec.kind.name(),
            self.spec.width,
            self.spec.measured_length,
            self.message
        )
    }
}

impl From<SizeViolation> for Error {
    fn from(v: SizeViolation) -> Self {
        Error::SizeViolation(v.to_string())
    }
}

impl TransistorSpec {
    pub fn h_wire(measured: usize) -> Self {
        TransistorSpec { kind: TransistorKind::HWire, width: 1, measured_length: measured, identity_wire: false }
    }

    pub fn identity_wire(measured: usize) -> Self {
        TransistorSpec { identity_wire: true, ..Self::h_wire(measured) }
    }

    pub fn s_wire(measured: usize) -> Self {
        TransistorSpec { kind: TransistorKind::SWire, width: 1, measured_length: measured, identity_wire: false }
    }

    pub fn square_cz(width: usize, length: usize) -> Self {
        TransistorSpec { kind: TransistorKind::SquareCZ, width, measured_length: length, identity_wire: false }
    }

    pub fn honeycomb_cz(width: usize, steps: usize) -> Self {
        TransistorSpec { kind: TransistorKind::HoneycombCZ, width, measured_length: steps, identity_wire: false }
    }

    /// Smallest valid block of each kind.
    pub fn minimal(kind: TransistorKind) -> Self {
        match kind {
            TransistorKind::HWire => Self::h_wire(1),
            TransistorKind::SWire => Self::s_wire(3),
            TransistorKind::SquareCZ => Self::square_cz(2, 7),
            TransistorKind::HoneycombCZ => Self::honeycomb_cz(2, 3),
        }
    }

    fn violation(&self, message: impl Into<String>) -> SizeViolation {
        SizeViolation { spec: *self, message: message.into() }
    }

    /// First violated size rule, if any.
    pub fn validate_size(&self) -> Result<(), SizeViolation> {
        let (w, l) = (self.width, self.measured_length);
        if self.identity_wire && self.kind != TransistorKind::HWire {
            return Err(self.violation("only H-wires can be tagged as identity wires"));
        }
        match self.kind {
            TransistorKind::HWire | TransistorKind::SWire if w != 1 => Err(self.violation("wires have width 1")),
            TransistorKind::HWire if l == 0 => Err(self.violation("at least one site must be measured")),
            TransistorKind::HWire if l % 2 == 0 && !self.identity_wire => {
                Err(self
                    .violation("even measured length yields identity; the number of measured sites must be odd for H"))
            }
            TransistorKind::HWire if l % 2 == 1 && self.identity_wire => {
                Err(self.violation("an identity wire needs an even number of measured sites"))
            }
            TransistorKind::SWire if l == 0 || l % 3 != 0 => {
                Err(self.violation("measured length must be a multiple of three for Q"))
            }
            TransistorKind::SquareCZ if w < 2 || w % 2 != 0 => {
                Err(self.violation("width must be even, w = 2n with n >= 1"))
            }
            TransistorKind::SquareCZ if l < 2 || (l - 1) % (2 * (w + 1)) != 0 => Err(self.violation(format!(
                "length must satisfy l = 2(w+1)m + 1 with m >= 1 (for w={w}: l = {}, {}, ...)",
                2 * (w + 1) + 1,
                4 * (w + 1) + 1
            ))),
            TransistorKind::HoneycombCZ if w < 2 || !w.is_power_of_two() => {
                Err(self.violation("width must be a power of two, w = 2^k with k >= 1"))
            }
            TransistorKind::HoneycombCZ if l < 2 || (l - 1) % w != 0 => Err(self.violation(format!(
                "length must satisfy l = m*w + 1 with m >= 1 (for w={w}: l = {}, {}, ...)",
                w + 1,
                2 * w + 1
            ))),
            _ => Ok(()),
        }
    }

    /// Number of logical ports on each side.
    pub fn ports(&self) -> usize {
        match self.kind {
            TransistorKind::HWire | TransistorKind::SWire => 1,
            TransistorKind::SquareCZ | TransistorKind::HoneycombCZ => 2,
        }
    }

    /// Number of single-site measurements the block performs, in execution
    /// order. Every one of them has a uniformly random outcome.
    pub fn outcome_count(&self) -> usize {
        let (w, l) = (self.width, self.measured_length);
        match self.kind {
            TransistorKind::HWire | TransistorKind::SWire => l,
            TransistorKind::SquareCZ => w * (l - 1) + (w - 2),
            TransistorKind::HoneycombCZ => 2 * l * w + (w - 2),
        }
    }

    /// Gate the block applies on its all-zero outcome branch.
    pub fn nominal_gate(&self) -> Matrix {
        match self.kind {
            TransistorKind::HWire if self.measured_length.is_multiple_of(2) => gates::identity(2),
            TransistorKind::HWire => gates::h(),
            TransistorKind::SWire => gates::q(),
            TransistorKind::SquareCZ | TransistorKind::HoneycombCZ => gates::cz(),
        }
    }

    /// The nominal gate as a Clifford, for symbolic frame propagation.
    pub fn nominal_clifford(&self) -> NominalGate {
        match self.kind {
            TransistorKind::HWire if self.measured_length.is_multiple_of(2) => NominalGate::Identity,
            TransistorKind::HWire => NominalGate::H,
            TransistorKind::SWire => NominalGate::Q,
            TransistorKind::SquareCZ | TransistorKind::HoneycombCZ => NominalGate::CZ,
        }
    }
}

/// Clifford gate a block implements on its all-zero branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NominalGate {
    Identity,
    H,
    /// `HS`.
    Q,
    CZ,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_rules() {
        assert!(TransistorSpec::square_cz(2, 7).validate_size().is_ok());
        assert!(TransistorSpec::square_cz(2, 13).validate_size().is_ok());
        let v = TransistorSpec::h_wire(4).validate_size().unwrap_err();
        assert!(v.message.starts_with("even measured length yields identity"));
        assert!(TransistorSpec::identity_wire(4).validate_size().is_ok());
        let v = TransistorSpec::honeycomb_cz(3, 4).validate_size().unwrap_err();
        assert!(v.message.starts_with("width must be a power of two"));
        let v = TransistorSpec::square_cz(2, 6).validate_size().unwrap_err();
        assert!(v.message.contains("l = 2(w+1)m + 1"));
        assert!(TransistorSpec::square_cz(3, 9).validate_size().is_err());
        assert!(TransistorSpec::s_wire(4).validate_size().is_err());
        assert!(TransistorSpec::honeycomb_cz(2, 3).validate_size().is_ok());
        assert!(TransistorSpec::honeycomb_cz(4, 5).validate_size().is_ok());
        assert!(TransistorSpec::honeycomb_cz(4, 4).validate_size().is_err());
        for kind in
            [TransistorKind::HWire, TransistorKind::SWire, TransistorKind::SquareCZ, TransistorKind::HoneycombCZ]
        {
            assert!(TransistorSpec::minimal(kind).validate_size().is_ok());
        }
    }

    #[test]
    fn outcome_counts() {
        assert_eq!(TransistorSpec::square_cz(2, 7).outcome_count(), 12);
        assert_eq!(TransistorSpec::honeycomb_cz(2, 3).outcome_count(), 12);
        assert_eq!(TransistorSpec::square_cz(4, 11).outcome_count(), 42);
    }
}
