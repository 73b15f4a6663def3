use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{gates, Matrix, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::tableau::{symmetry_operators, Boundary};
use crate::transistor::{closed_form_frame, TransistorSpec};

use super::{build_phase_tensors, PhaseChain, PhaseModel};

/// Longest chain contracted branch by branch.
pub const EXHAUSTIVE_MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FidelityMode {
    /// Every outcome string; chains up to [`EXHAUSTIVE_MAX_SITES`].
    Exhaustive,
    /// Outcome strings drawn with their Born weights.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub fidelity: f64,
    /// Standard error of a sampled estimate.
    pub std_error: Option<f64>,
    pub branches: usize,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Bond columns `|l⟩ ⊗ |0_J⟩` for the two values of the left edge qubit,
/// after the left coupler.
fn encoded_edge(chain: &PhaseChain) -> Matrix {
    let d = chain.bond_dim();
    let mut m = Matrix::zeros(d, 2);
    m[(0, 0)] = c(1.0);
    m[(chain.junk_dim, 1)] = c(1.0);
    &chain.left_coupler * m
}

/// Projects the bond onto `⟨r| ⊗ ⟨0_J|` after the right coupler.
fn decoder(chain: &PhaseChain) -> Matrix {
    let d = chain.bond_dim();
    let mut p = Matrix::zeros(2, d);
    p[(0, 0)] = c(1.0);
    p[(1, chain.junk_dim)] = c(1.0);
    p * &chain.right_coupler
}

struct EbitTarget {
    /// `(1 ⊗ H^n)|ω⟩` as a matrix indexed `[r, l]`.
    omega: Matrix,
    spec: TransistorSpec,
}

impl EbitTarget {
    fn new(n: usize) -> Self {
        let omega = gates::power(&gates::h(), n) * c(std::f64::consts::FRAC_1_SQRT_2);
        let spec = if n.is_multiple_of(2) { TransistorSpec::identity_wire(n) } else { TransistorSpec::h_wire(n) };
        EbitTarget { omega, spec }
    }

    /// `(weight, overlap²)` of one branch, after undoing its byproduct.
    fn score(&self, edge_pair: &Matrix, outcomes: &[bool]) -> Result<(f64, f64)> {
        let frame = closed_form_frame(&self.spec, outcomes)?.expect("wires have a closed form");
        let correction = gates::pauli(&PauliString::single(1, 0, frame.pauli().get(0)));
        let corrected = correction * edge_pair;
        Ok((edge_pair.norm_squared(), self.omega.dotc(&corrected).norm_sqr()))
    }
}

/// Average fidelity of the edge pair with the ideal Bell pair after the `n`
/// bulk sites are measured in the wire basis and byproducts are undone.
/// Even `n` is compared with `|ω⟩`, odd `n` with `(1 ⊗ H)|ω⟩`.
pub fn ebit_fidelity(model: &PhaseModel, n: usize, mode: FidelityMode) -> Result<FidelityEstimate> {
    let chain = build_phase_tensors(model, n)?;
    let target = EbitTarget::new(n);
    let start = encoded_edge(&chain);
    let dec = decoder(&chain);
    match mode {
        FidelityMode::Exhaustive => {
            if n > EXHAUSTIVE_MAX_SITES {
                return Err(Error::Model(format!(
                    "{n} sites exceed the exhaustive limit of {EXHAUSTIVE_MAX_SITES}; use sampling"
                )));
            }
            let mut acc = (0.0, 0.0);
            let mut outcomes = Vec::with_capacity(n);
            descend(&chain, &target, &dec, &start, &mut outcomes, &mut acc)?;
            if acc.0 == 0.0 {
                return Err(Error::ZeroProbability);
            }
            Ok(FidelityEstimate { fidelity: acc.1 / acc.0, std_error: None, branches: 1 << n })
        }
        FidelityMode::Sampled { samples, seed } => sample(&chain, &target, &dec, &start, samples, seed),
    }
}

fn descend(
    chain: &PhaseChain,
    target: &EbitTarget,
    dec: &Matrix,
    state: &Matrix,
    outcomes: &mut Vec<bool>,
    acc: &mut (f64, f64),
) -> Result<()> {
    let r = outcomes.len();
    if r == chain.len() {
        let (w, f) = target.score(&(dec * state), outcomes)?;
        acc.0 += w;
        acc.1 += f;
        return Ok(());
    }
    for s in 0..2 {
        outcomes.push(s == 1);
        descend(chain, target, dec, &(&chain.sites[r][s] * state), outcomes, acc)?;
        outcomes.pop();
    }
    Ok(())
}

fn sample(
    chain: &PhaseChain,
    target: &EbitTarget,
    dec: &Matrix,
    start: &Matrix,
    samples: usize,
    seed: u64,
) -> Result<FidelityEstimate> {
    if samples < 2 {
        return Err(Error::Model("sampling needs at least 2 samples".into()));
    }
    let n = chain.len();
    // envs[k]: weight operator of the sites after k.
    let mut envs = vec![dec.adjoint() * dec; n + 1];
    for k in (0..n).rev() {
        envs[k] = chain.sites[k]
            .iter()
            .map(|a| a.adjoint() * &envs[k + 1] * a)
            .fold(Matrix::zeros(chain.bond_dim(), chain.bond_dim()), |acc, m| acc + m);
    }
    let weight = |m: &Matrix, env: &Matrix| (m.adjoint() * env * m).trace().re.max(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut state = start.clone();
        let mut outcomes = Vec::with_capacity(n);
        for k in 0..n {
            let next: Vec<Matrix> = chain.sites[k].iter().map(|a| a * &state).collect();
            let w0 = weight(&next[0], &envs[k + 1]);
            let w1 = weight(&next[1], &envs[k + 1]);
            if w0 + w1 == 0.0 {
                return Err(Error::ZeroProbability);
            }
            let s = usize::from(rng.random::<f64>() * (w0 + w1) >= w0);
            outcomes.push(s == 1);
            state = next[s].clone();
        }
        let (w, f) = target.score(&(dec * &state), &outcomes)?;
        values.push(f / w);
    }
    let mean = values.iter().sum::<f64>() / samples as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    Ok(FidelityEstimate { fidelity: mean, std_error: Some((var / samples as f64).sqrt()), branches: samples })
}

/// Least-squares fit `1 - F(λ) = cλ + qλ²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfidelityFit {
    pub linear: f64,
    pub quadratic: f64,
    pub max_residual: f64,
    /// `|q λ_max²| / |c λ_max|` at the largest grid point.
    pub quadratic_share: f64,
    pub points: Vec<(f64, f64)>,
}

/// Fits the infidelity of `base` (with its `lambda` replaced by each grid
/// point) over an `n`-site chain.
pub fn infidelity_fit(base: &PhaseModel, grid: &[f64], n: usize) -> Result<InfidelityFit> {
    if grid.len() < 5 {
        return Err(Error::DegenerateGrid(format!("need at least 5 points, got {}", grid.len())));
    }
    if let Some(bad) = grid.iter().find(|l| !(**l > 0.0 && **l <= 0.1)) {
        return Err(Error::DegenerateGrid(format!("grid point {bad} outside (0, 0.1]")));
    }
    let points = grid
        .iter()
        .map(|&l| Ok((l, 1.0 - ebit_fidelity(&base.with_lambda(l), n, FidelityMode::Exhaustive)?.fidelity)))
        .collect::<Result<Vec<_>>>()?;
    let (mut s2, mut s3, mut s4, mut sy1, mut sy2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(l, y) in &points {
        s2 += l * l;
        s3 += l * l * l;
        s4 += l * l * l * l;
        sy1 += y * l;
        sy2 += y * l * l;
    }
    let det = s2 * s4 - s3 * s3;
    if det.abs() <= 1e-12 * s2 * s4 {
        return Err(Error::DegenerateGrid("grid points are not distinct enough to separate λ and λ²".into()));
    }
    let linear = (sy1 * s4 - sy2 * s3) / det;
    let quadratic = (s2 * sy2 - s3 * sy1) / det;
    let max_residual = points.iter().map(|&(l, y)| (y - linear * l - quadratic * l * l).abs()).fold(0.0, f64::max);
    let lmax = grid.iter().copied().fold(0.0, f64::max);
    let quadratic_share = (quadratic * lmax * lmax).abs() / (linear * lmax).abs();
    Ok(InfidelityFit { linear, quadratic, max_residual, quadratic_share, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeCheck {
    pub fidelity: f64,
    pub fidelity_extra_site: f64,
}

impl GaugeCheck {
    /// The extra site restores a perfect gate.
    pub fn restored(&self, tol: f64) -> bool {
        (1.0 - self.fidelity_extra_site).abs() <= tol
    }
}

/// Fidelity at `n` sites and at `n + 1` sites for the same model.
pub fn gauge_cancellation_check(model: &PhaseModel, n: usize) -> Result<GaugeCheck> {
    let fidelity = ebit_fidelity(model, n, FidelityMode::Exhaustive)?.fidelity;
    let fidelity_extra_site = ebit_fidelity(model, n + 1, FidelityMode::Exhaustive)?.fidelity;
    Ok(GaugeCheck { fidelity, fidelity_extra_site })
}

/// Element `g1^a g2^b` of the chain symmetry group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: bool,
    pub b: bool,
}

impl GroupElement {
    pub const G1: GroupElement = GroupElement { a: true, b: false };
    pub const G2: GroupElement = GroupElement { a: false, b: true };
}

/// String operator `O_r(g)`: the open-chain symmetry of the sites
/// `start..=end` (1-based). Where the string has an X component on an edge
/// site, the end operator adds Z on the neighbouring site outside it, so
/// `O_r(g)` is a stabilizer of the fixed point and `O_1(g) = U(g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringOrderSpec {
    pub element: GroupElement,
    pub start: usize,
    pub end: usize,
}

impl StringOrderSpec {
    pub fn operator(&self, n: usize) -> Result<PauliString> {
        if self.start == 0 || self.start >= self.end || self.end > n {
            return Err(Error::Model(format!("string {}..={} does not fit a {n}-site chain", self.start, self.end)));
        }
        let len = self.end - self.start + 1;
        let (u1, u2) = symmetry_operators(len, Boundary::Open)?;
        let mut u = PauliString::identity(len);
        if self.element.a {
            u = u.mul(&u1);
        }
        if self.element.b {
            u = u.mul(&u2);
        }
        let map: Vec<usize> = (self.start - 1..self.end).collect();
        let mut o = u.embed(n, &map);
        if self.start > 1 && u.x_bit(0) {
            o.set(self.start - 2, Pauli::Z);
        }
        if self.end < n && u.x_bit(len - 1) {
            o.set(self.end, Pauli::Z);
        }
        Ok(o)
    }
}

/// Single-site Pauli in the wire basis, where `|s⟩` is the `X = (-1)^s`
/// eigenstate.
fn wire_basis(p: Pauli) -> Matrix {
    let m = |a: C64, b: C64, cc: C64, d: C64| Matrix::from_row_slice(2, 2, &[a, b, cc, d]);
    let (o, l, i) = (c(0.0), c(1.0), C64::i());
    match p {
        Pauli::I => m(l, o, o, l),
        Pauli::X => m(l, o, o, -l),
        Pauli::Z => m(o, l, l, o),
        Pauli::Y => m(o, i, -i, o),
    }
}

impl PhaseChain {
    /// Chain-state boundary vectors: `|+⟩ ⊗ |0_J⟩` on the left and
    /// `⟨0| ⊗ ⟨0_J|` on the right reproduce the open cluster chain at the
    /// fixed point.
    fn chain_boundaries(&self) -> (Matrix, Matrix) {
        let d = self.bond_dim();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut left = Matrix::zeros(d, 1);
        left[(0, 0)] = c(h);
        left[(self.junk_dim, 0)] = c(h);
        let mut right = Matrix::zeros(1, d);
        right[(0, 0)] = c(1.0);
        (&self.left_coupler * left, right * &self.right_coupler)
    }

    /// The chain state as a dense vector in the computational basis.
    pub fn chain_state(&self) -> Result<StateVector> {
        let n = self.len();
        if n > EXHAUSTIVE_MAX_SITES {
            return Err(Error::Model(format!("{n} sites exceed the dense limit of {EXHAUSTIVE_MAX_SITES}")));
        }
        let (left, right) = self.chain_boundaries();
        let amps = (0..1usize << n)
            .map(|b| {
                let v = self.sites.iter().enumerate().fold(left.clone(), |v, (k, site)| &site[(b >> k) & 1] * v);
                (&right * v)[(0, 0)]
            })
            .collect();
        let mut state = StateVector::from_amplitudes(amps)?;
        for q in 0..n {
            state.apply_matrix(&gates::h(), &[q])?;
        }
        Ok(state)
    }

    /// Normalized expectation of a Pauli string on the chain state.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<C64> {
        if p.num_qubits() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit Pauli on a {}-site chain",
                p.num_qubits(),
                self.len()
            )));
        }
        let (left, right) = self.chain_boundaries();
        let contract = |op: &dyn Fn(usize) -> Matrix| -> C64 {
            let mut rho = &left * left.adjoint();
            for (r, site) in self.sites.iter().enumerate() {
                let o = op(r);
                let mut next = Matrix::zeros(rho.nrows(), rho.ncols());
                for s in 0..2 {
                    for t in 0..2 {
                        if o[(s, t)] != c(0.0) {
                            next += &site[t] * &rho * site[s].adjoint() * o[(s, t)];
                        }
                    }
                }
                rho = next;
            }
            (&right * rho * right.adjoint())[(0, 0)]
        };
        let norm = contract(&|_| gates::identity(2));
        let value = contract(&|r| wire_basis(p.get(r)));
        Ok(value * C64::i().powu(p.phase() as u32) / norm)
    }
}

/// `⟨O⟩` of a string operator on the `n`-site chain state of `model`.
pub fn string_order(model: &PhaseModel, spec: &StringOrderSpec, n: usize) -> Result<C64> {
    let chain = build_phase_tensors(model, n)?;
    chain.pauli_expectation(&spec.operator(n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseLabRow {
    pub lambda: f64,
    pub fidelity: f64,
    /// Smaller modulus of the two generator string orders over the chain.
    pub string_order: f64,
}

/// Fidelity and string order of `base` at each grid point.
pub fn phase_lab(base: &PhaseModel, grid: &[f64], n: usize, mode: FidelityMode) -> Result<Vec<PhaseLabRow>> {
    grid.iter()
        .map(|&lambda| {
            let model = base.with_lambda(lambda);
            let fidelity = ebit_fidelity(&model, n, mode)?.fidelity;
            let string_order = [GroupElement::G1, GroupElement::G2]
                .iter()
                .map(|&element| {
                    string_order(&model, &StringOrderSpec { element, start: 1, end: n }, n).map(|v| v.norm())
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            Ok(PhaseLabRow { lambda, fidelity, string_order })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::PerturbationFamily;

    fn model(family: PerturbationFamily, lambda: f64) -> PhaseModel {
        PhaseModel::new(family, lambda, 2, 5)
    }

    #[test]
    fn cluster_point_gives_ebit() {
        for n in 2..=7 {
            let f = ebit_fidelity(&model(PerturbationFamily::Generic, 0.0), n, FidelityMode::Exhaustive).unwrap();
            assert!((f.fidelity - 1.0).abs() < 1e-12, "n={n}: {f:?}");
        }
    }

    #[test]
    fn junk_only_is_exact() {
        let f = ebit_fidelity(&model(PerturbationFamily::JunkOnly, 0.08), 8, FidelityMode::Exhaustive).unwrap();
        assert!((f.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unpinned_edges_lose_fidelity() {
        let mut m = model(PerturbationFamily::JunkOnly, 0.08);
        m.pin_edges = false;
        let f = ebit_fidelity(&m, 6, FidelityMode::Exhaustive).unwrap();
        assert!(f.fidelity < 1.0 - 1e-6);
    }

    #[test]
    fn sampling_agrees_with_enumeration() {
        let m = model(PerturbationFamily::Generic, 0.1);
        let exact = ebit_fidelity(&m, 6, FidelityMode::Exhaustive).unwrap().fidelity;
        let est = ebit_fidelity(&m, 6, FidelityMode::Sampled { samples: 4000, seed: 3 }).unwrap();
        let se = est.std_error.unwrap();
        assert!((est.fidelity - exact).abs() <= 5.0 * se + 1e-12, "{exact} vs {est:?}");
    }

    #[test]
    fn exhaustive_limit() {
        let m = model(PerturbationFamily::Generic, 0.1);
        assert!(ebit_fidelity(&m, EXHAUSTIVE_MAX_SITES + 1, FidelityMode::Exhaustive).is_err());
    }

    #[test]
    fn gauge_cancels_with_extra_site() {
        let check = gauge_cancellation_check(&model(PerturbationFamily::GaugeOnly, 0.05), 8).unwrap();
        assert!(check.fidelity < 1.0 - 1e-8, "{check:?}");
        assert!(check.restored(1e-10), "{check:?}");
        let generic = gauge_cancellation_check(&model(PerturbationFamily::Generic, 0.05), 8).unwrap();
        assert!(!generic.restored(1e-10));
    }

    #[test]
    fn fit_rejects_bad_grids() {
        let m = model(PerturbationFamily::Generic, 0.0);
        assert!(matches!(infidelity_fit(&m, &[0.01, 0.02], 4), Err(Error::DegenerateGrid(_))));
        assert!(matches!(infidelity_fit(&m, &[0.01; 6], 4), Err(Error::DegenerateGrid(_))));
        assert!(matches!(infidelity_fit(&m, &[0.0, 0.01, 0.02, 0.03, 0.5], 4), Err(Error::DegenerateGrid(_))));
    }

    #[test]
    fn string_operator_shapes() {
        let spec = StringOrderSpec { element: GroupElement::G1, start: 1, end: 6 };
        let (u1, _) = symmetry_operators(6, Boundary::Open).unwrap();
        assert_eq!(spec.operator(6).unwrap(), u1);
        let id = StringOrderSpec { element: GroupElement { a: false, b: false }, start: 2, end: 5 };
        assert!(id.operator(6).unwrap().is_identity());
        assert!(StringOrderSpec { start: 5, end: 5, ..spec }.operator(6).is_err());
    }
}
