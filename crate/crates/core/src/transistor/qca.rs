//! Column QCAs generated by ladder measurement.

use num_complex::Complex64 as C64;

use crate::dense::{equal_up_to_global_phase, gates, Matrix};
use crate::error::{Error, Result};

const QCA_TOL: f64 = 1e-10;

fn bit(b: usize, row: usize, w: usize) -> usize {
    (b >> (w - 1 - row)) & 1
}

/// Diagonal CZ layer on the given 0-based row pairs.
fn cz_layer(w: usize, pairs: &[(usize, usize)]) -> Matrix {
    let dim = 1usize << w;
    let mut m = Matrix::zeros(dim, dim);
    for b in 0..dim {
        let parity: usize = pairs.iter().map(|&(r, s)| bit(b, r, w) & bit(b, s, w)).sum();
        m[(b, b)] = C64::new(if parity.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0);
    }
    m
}

fn hadamard_layer(w: usize) -> Matrix {
    gates::kron_all(&vec![gates::h(); w])
}

/// `T_w = (⊗ CZ on neighbouring rows)(⊗ H)`, rows big-endian.
pub fn t_w_matrix(w: usize) -> Result<Matrix> {
    if !(1..=10).contains(&w) {
        return Err(Error::InvalidSize(format!("T_w needs 1 <= w <= 10, got {w}")));
    }
    let pairs: Vec<_> = (0..w - 1).map(|r| (r, r + 1)).collect();
    Ok(cz_layer(w, &pairs) * hadamard_layer(w))
}

/// Two-step brickwork QCA of the honeycomb ladder:
/// `CZ_odd · H^{⊗w} · CZ_even · H^{⊗w}`, where the odd layer couples rows
/// (1,2), (3,4), ... and the even layer rows (2,3), (4,5), ... (1-based).
pub fn honeycomb_t_w_matrix(w: usize) -> Result<Matrix> {
    if !(2..=8).contains(&w) || !w.is_power_of_two() {
        return Err(Error::InvalidSize(format!("honeycomb width must be 2, 4 or 8, got {w}")));
    }
    let odd: Vec<_> = (0..w - 1).step_by(2).map(|r| (r, r + 1)).collect();
    let even: Vec<_> = (1..w - 1).step_by(2).map(|r| (r, r + 1)).collect();
    let h = hadamard_layer(w);
    Ok(cz_layer(w, &odd) * &h * cz_layer(w, &even) * &h)
}

/// Permutation reversing the row order.
pub fn row_reflection(w: usize) -> Matrix {
    let dim = 1usize << w;
    let mut m = Matrix::zeros(dim, dim);
    for b in 0..dim {
        let r = (0..w).fold(0, |acc, k| acc | (((b >> k) & 1) << (w - 1 - k)));
        m[(r, b)] = C64::new(1.0, 0.0);
    }
    m
}

/// `T_w^{w+1}` reverses the rows and `T_w^{2(w+1)} ∝ 1`.
pub fn raussendorf_reflection_check(w: usize) -> Result<bool> {
    let t = t_w_matrix(w)?;
    let half = gates::power(&t, w + 1);
    let full = &half * &half;
    Ok(equal_up_to_global_phase(&half, &row_reflection(w), QCA_TOL)?
        && equal_up_to_global_phase(&full, &gates::identity(1 << w), QCA_TOL)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phase_eq(a: &Matrix, b: &Matrix) -> bool {
        equal_up_to_global_phase(a, b, 1e-10).unwrap()
    }

    #[test]
    fn small_widths() {
        assert!(phase_eq(&t_w_matrix(1).unwrap(), &gates::h()));
        let cz_hh = gates::cz() * gates::kron_all(&[gates::h(), gates::h()]);
        let t2 = t_w_matrix(2).unwrap();
        assert!(phase_eq(&t2, &cz_hh));
        assert!(phase_eq(&gates::power(&t2, 3), &gates::swap()));
        assert!(t_w_matrix(0).is_err() && t_w_matrix(11).is_err());
    }

    #[test]
    fn reflection_through_w4() {
        for w in 1..=4 {
            assert!(raussendorf_reflection_check(w).unwrap(), "w={w}");
        }
    }

    #[test]
    fn honeycomb_period_equals_width() {
        assert!(phase_eq(&honeycomb_t_w_matrix(2).unwrap(), &gates::cz()));
        for w in [2, 4, 8] {
            let t = honeycomb_t_w_matrix(w).unwrap();
            let id = gates::identity(1 << w);
            assert!(phase_eq(&gates::power(&t, w), &id), "w={w}");
            for k in 1..w {
                assert!(!phase_eq(&gates::power(&t, k), &id), "w={w} k={k}");
            }
        }
        assert!(honeycomb_t_w_matrix(3).is_err());
    }
}
