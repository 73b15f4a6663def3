//! Matrix-product numerics for gate wires in the cluster phase.
//!
//! The bond space is `logical ⊗ junk` (dimension `2·d_J`). At the cluster
//! point the wire-basis site tensors are `σ_s ⊗ 1` with `σ_s = HZ^s/√2`;
//! perturbations either dress the junk factor (`σ_s ⊗ J_s`), insert gauge
//! operators on the bonds (`G_r (σ_s ⊗ 1) G_{r-1}†`), or apply a gauge that
//! never cancels (`G (σ_s ⊗ J_s)`).

mod observables;

use nalgebra::SVD;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dense::{gates, Matrix};
use crate::error::{Error, Result};

pub use observables::{
    ebit_fidelity, gauge_cancellation_check, infidelity_fit, phase_lab, string_order, FidelityEstimate, FidelityMode,
    GaugeCheck, GroupElement, InfidelityFit, PhaseLabRow, StringOrderSpec, EXHAUSTIVE_MAX_SITES,
};

/// Largest junk dimension; keeps the bond dimension at most 8.
pub const MAX_JUNK_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationFamily {
    /// `G (σ_s ⊗ J_s)` on every site: breaks the symmetric form.
    Generic,
    /// `G_r (σ_s ⊗ 1) G_{r-1}†` with `G_r = G` on even bonds `r ≥ 2` and the
    /// identity elsewhere, so the gauge cancels across each pair of sites.
    GaugeOnly,
    /// `σ_s ⊗ J_s`: symmetric.
    JunkOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseModel {
    pub family: PerturbationFamily,
    pub lambda: f64,
    pub junk_dim: usize,
    pub seed: u64,
    /// Keep the edge couplers at the cluster form; when false both couplers
    /// are dressed with the bulk gauge `G`.
    pub pin_edges: bool,
}

impl PhaseModel {
    pub fn new(family: PerturbationFamily, lambda: f64, junk_dim: usize, seed: u64) -> Self {
        PhaseModel { family, lambda, junk_dim, seed, pin_edges: true }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        PhaseModel { lambda, ..*self }
    }

    pub fn bond_dim(&self) -> usize {
        2 * self.junk_dim
    }

    fn validate(&self) -> Result<()> {
        if self.junk_dim == 0 || self.junk_dim > MAX_JUNK_DIM {
            return Err(Error::Model(format!("junk dimension must be in 1..={MAX_JUNK_DIM}, got {}", self.junk_dim)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Model(format!("lambda must be finite and non-negative, got {}", self.lambda)));
        }
        Ok(())
    }

    /// Seeded generators: `g` on the bond space and one `Ã_s` per wire-basis
    /// index on the junk space, each anti-Hermitian with unit spectral norm.
    pub fn generators(&self) -> Perturbation {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let g = random_anti_hermitian(self.bond_dim(), &mut rng);
        let junk = [random_anti_hermitian(self.junk_dim, &mut rng), random_anti_hermitian(self.junk_dim, &mut rng)];
        Perturbation { g, junk }
    }
}

#[derive(Debug, Clone)]
pub struct Perturbation {
    pub g: Matrix,
    pub junk: [Matrix; 2],
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn random_anti_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let m = Matrix::from_fn(dim, dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let k = (&m - m.adjoint()) * c(0.5);
    let norm = spectral_norm(&k);
    if norm == 0.0 {
        k
    } else {
        k * c(1.0 / norm)
    }
}

fn spectral_norm(m: &Matrix) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `exp(λK)` for anti-Hermitian `K`, via the eigenbasis of `iK`.
pub fn exp_anti_hermitian(k: &Matrix, lambda: f64) -> Matrix {
    let h = k * C64::i();
    let eig = h.symmetric_eigen();
    let phases = Matrix::from_diagonal(&eig.eigenvalues.map(|e| C64::from_polar(1.0, -lambda * e)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Unitary polar factor of `m`.
pub fn polar_unitary(m: &Matrix) -> Matrix {
    let svd = SVD::new(m.clone(), true, true);
    svd.u.expect("requested u") * svd.v_t.expect("requested v_t")
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Wire-basis cluster operator `σ_s = HZ^s/√2`.
pub fn sigma(s: usize) -> Matrix {
    let z = if s == 1 { gates::z() } else { gates::identity(2) };
    gates::h() * z * c(std::f64::consts::FRAC_1_SQRT_2)
}

/// Site tensors of one chain together with its edge couplers.
#[derive(Debug, Clone)]
pub struct PhaseChain {
    /// `sites[r-1][s] = A^{[r]}_s`.
    pub sites: Vec<[Matrix; 2]>,
    /// Acts on the bond after the left edge is encoded.
    pub left_coupler: Matrix,
    /// Acts on the bond before the right edge is decoded.
    pub right_coupler: Matrix,
    pub junk_dim: usize,
}

/// Builds `n` site tensors for `model`.
pub fn build_phase_tensors(model: &PhaseModel, n: usize) -> Result<PhaseChain> {
    model.validate()?;
    if n < 2 {
        return Err(Error::Model(format!("chain needs at least 2 sites, got {n}")));
    }
    let d = model.junk_dim;
    let lambda = model.lambda;
    let p = model.generators();
    let identity_j = gates::identity(d);
    let gauge = exp_anti_hermitian(&p.g, lambda);
    let junk: Vec<Matrix> = (0..2).map(|s| polar_unitary(&(&identity_j + &p.junk[s] * c(lambda)))).collect();
    let bond_id = gates::identity(2 * d);
    let bond_gauge = |r: usize| if r >= 2 && r.is_multiple_of(2) { gauge.clone() } else { bond_id.clone() };
    let sites = (1..=n)
        .map(|r| {
            let site = |s: usize| match model.family {
                PerturbationFamily::JunkOnly => kron(&sigma(s), &junk[s]),
                PerturbationFamily::Generic => &gauge * kron(&sigma(s), &junk[s]),
                PerturbationFamily::GaugeOnly => {
                    bond_gauge(r) * kron(&sigma(s), &identity_j) * bond_gauge(r - 1).adjoint()
                }
            };
            [site(0), site(1)]
        })
        .collect();
    let (left_coupler, right_coupler) =
        if model.pin_edges { (bond_id.clone(), bond_id) } else { (gauge.clone(), gauge) };
    Ok(PhaseChain { sites, left_coupler, right_coupler, junk_dim: d })
}

/// Two neighbouring site tensors blocked: `b[s1][s2] = A^{[r+1]}_{s2} A^{[r]}_{s1}`.
#[derive(Debug, Clone)]
pub struct BlockedTensor {
    pub b: [[Matrix; 2]; 2],
    pub junk_dim: usize,
}

impl PhaseChain {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn bond_dim(&self) -> usize {
        2 * self.junk_dim
    }

    /// Sites `r` and `r+1`, 1-based.
    pub fn blocked(&self, r: usize) -> Result<BlockedTensor> {
        if r == 0 || r >= self.len() {
            return Err(Error::Model(format!("cannot block sites {r},{} of a {}-site chain", r + 1, self.len())));
        }
        let (a, b) = (&self.sites[r - 1], &self.sites[r]);
        Ok(BlockedTensor {
            b: [[&b[0] * &a[0], &b[1] * &a[0]], [&b[0] * &a[1], &b[1] * &a[1]]],
            junk_dim: self.junk_dim,
        })
    }

    /// Largest [`symmetry_residual`] over all neighbouring pairs.
    pub fn max_symmetry_residual(&self) -> f64 {
        (1..self.len()).map(|r| symmetry_residual(&self.blocked(r).expect("in range"))).fold(0.0, f64::max)
    }

    /// Eigenvalues of largest modulus of the transfer matrix
    /// `Σ_s A_s ⊗ conj(A_s)` of site `r`, from its complex Schur form.
    pub fn transfer_leading_eigenvalue(&self, r: usize) -> Result<C64> {
        let site = self.sites.get(r.wrapping_sub(1)).ok_or_else(|| Error::Model(format!("site {r} out of range")))?;
        let t = transfer_matrix(site);
        let eig = t.schur().eigenvalues().ok_or_else(|| Error::Model("Schur form did not converge".into()))?;
        Ok(eig.iter().copied().fold(C64::new(0.0, 0.0), |best, e| if e.norm() > best.norm() { e } else { best }))
    }
}

pub(crate) fn transfer_matrix(site: &[Matrix; 2]) -> Matrix {
    site.iter()
        .map(|a| a.kronecker(&a.conjugate()))
        .fold(Matrix::zeros(site[0].nrows().pow(2), site[0].ncols().pow(2)), |acc, m| acc + m)
}

/// Violation of the cluster symmetry conditions on a blocked tensor:
/// `(-1)^{s1} B̂ = X B̂ X` and `(-1)^{s2} B̂ = Z B̂ Z`, with the Paulis on the
/// logical factor. Returns the larger Frobenius residual.
pub fn symmetry_residual(t: &BlockedTensor) -> f64 {
    let id = gates::identity(t.junk_dim);
    let x = kron(&gates::x(), &id);
    let z = kron(&gates::z(), &id);
    let residual = |w: &Matrix, sign_of: &dyn Fn(usize, usize) -> f64| -> f64 {
        let mut sum = 0.0;
        for s1 in 0..2 {
            for s2 in 0..2 {
                let b = &t.b[s1][s2];
                sum += (b * c(sign_of(s1, s2)) - w * b * w).norm_squared();
            }
        }
        sum.sqrt()
    };
    let parity = |s: usize| if s == 1 { -1.0 } else { 1.0 };
    residual(&x, &|s1, _| parity(s1)).max(residual(&z, &|_, s2| parity(s2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cluster_point_is_exact() {
        for family in [PerturbationFamily::Generic, PerturbationFamily::GaugeOnly, PerturbationFamily::JunkOnly] {
            let chain = build_phase_tensors(&PhaseModel::new(family, 0.0, 3, 7), 6).unwrap();
            assert!(chain.max_symmetry_residual() < 1e-14);
            assert!((&chain.sites[0][1] - kron(&sigma(1), &gates::identity(3))).norm() < 1e-14);
        }
    }

    #[test]
    fn generators_are_anti_hermitian() {
        let p = PhaseModel::new(PerturbationFamily::Generic, 0.05, 2, 7).generators();
        for m in [&p.g, &p.junk[0], &p.junk[1]] {
            assert!((m + m.adjoint()).norm() == 0.0);
            assert!((spectral_norm(m) - 1.0).abs() < 1e-12);
        }
        let u = exp_anti_hermitian(&p.g, 0.3);
        assert!((u.adjoint() * &u - gates::identity(4)).norm() < 1e-12);
    }

    #[test]
    fn residual_tracks_family() {
        let junk = build_phase_tensors(&PhaseModel::new(PerturbationFamily::JunkOnly, 0.05, 2, 7), 6).unwrap();
        assert!(junk.max_symmetry_residual() < 1e-12);
        let generic = build_phase_tensors(&PhaseModel::new(PerturbationFamily::Generic, 0.05, 2, 7), 6).unwrap();
        let r = generic.max_symmetry_residual();
        assert!(r > 0.0 && r < 4.0 * 0.05, "{r}");
    }

    #[test]
    fn invalid_models() {
        let m = PhaseModel::new(PerturbationFamily::Generic, 0.05, 0, 7);
        assert!(build_phase_tensors(&m, 4).is_err());
        let m = PhaseModel::new(PerturbationFamily::Generic, -0.1, 2, 7);
        assert!(build_phase_tensors(&m, 4).is_err());
        let m = PhaseModel::new(PerturbationFamily::Generic, 0.1, 2, 7);
        assert!(build_phase_tensors(&m, 1).is_err());
    }
}
