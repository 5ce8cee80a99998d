//! Data model for quantum states in a fixed reference basis: validated
//! density matrices, dephased (diagonal) states, pure states and ensembles,
//! bipartite purifications, and entropy.
//!
//! Basis indexing is 0-based throughout (`|0⟩ … |n-1⟩`). All values are
//! immutable after construction.

use crate::qmat::{
    eig_hermitian, frobenius_distance, ComplexMatrix, QmatError, SpectralDecomposition,
};
use crate::{DEFAULT_TOL, WEIGHT_DROP_TOL};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error(
        "diagonal entry {index} is zero but its row/column carries weight {off_diagonal_mass:e}"
    )]
    ZeroDiagonalInconsistency {
        index: usize,
        off_diagonal_mass: f64,
    },

    #[error("state vector norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("ensemble weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("ensemble weight {weight} outside [0, 1]")]
    WeightOutOfRange { weight: f64 },

    #[error("ensemble is empty or members have mismatched dimensions")]
    MalformedEnsemble,

    #[error("measurement basis is not orthonormal (max Gram deviation {deviation:e})")]
    BasisNotOrthonormal { deviation: f64 },

    #[error("matrix is not an isometry (max Gram deviation {deviation:e})")]
    NotIsometry { deviation: f64 },

    #[error(transparent)]
    Kernel(#[from] QmatError),
}

/// Validated Hermitian, positive-semidefinite, unit-trace matrix.
///
/// The spectral decomposition computed during validation is retained, so
/// entropy, purification, and ensemble parameterization reuse it.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    data: ComplexMatrix,
    spectral: SpectralDecomposition,
    tol: f64,
}

impl DensityMatrix {
    /// Validates `raw` and constructs the state, or reports the violated
    /// invariant. Checks run in order: shape, finiteness, Hermiticity,
    /// trace, zero-diagonal consistency, positivity.
    pub fn new(raw: ComplexMatrix, tol: f64) -> Result<Self, StateError> {
        if !raw.is_square() {
            return Err(StateError::NotSquare {
                rows: raw.rows(),
                cols: raw.cols(),
            });
        }
        raw.check_finite().map_err(StateError::Kernel)?;
        let deviation = raw.hermitian_deviation();
        if deviation > tol {
            return Err(StateError::NotHermitian { deviation });
        }
        let trace = raw.trace();
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(StateError::TraceNotOne { trace: trace.re });
        }
        let n = raw.rows();
        // Positivity forces row/column i to vanish whenever ρ_ii does.
        for i in 0..n {
            if raw[(i, i)].re <= tol {
                let mut mass = 0.0f64;
                for j in 0..n {
                    if j != i {
                        mass = mass.max(raw[(i, j)].norm()).max(raw[(j, i)].norm());
                    }
                }
                if mass > tol {
                    return Err(StateError::ZeroDiagonalInconsistency {
                        index: i,
                        off_diagonal_mass: mass,
                    });
                }
            }
        }
        let spectral = eig_hermitian(&raw, tol).map_err(StateError::Kernel)?;
        let min_eigenvalue = spectral.eigenvalues().last().copied().unwrap_or(0.0);
        if min_eigenvalue < -tol {
            return Err(StateError::NotPositive { min_eigenvalue });
        }
        Ok(Self {
            data: raw,
            spectral,
            tol,
        })
    }

    /// Validation with [`DEFAULT_TOL`].
    pub fn new_default(raw: ComplexMatrix) -> Result<Self, StateError> {
        Self::new(raw, DEFAULT_TOL)
    }

    pub fn dim(&self) -> usize {
        self.data.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    /// Eigenvalues in descending order.
    pub fn spectrum(&self) -> &[f64] {
        self.spectral.eigenvalues()
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    /// Number of eigenvalues above the rank cutoff.
    pub fn rank(&self) -> usize {
        let cutoff = WEIGHT_DROP_TOL;
        self.spectrum().iter().filter(|&&l| l > cutoff).count().max(1)
    }

    /// Δ(ρ): the state given by the diagonal entries.
    pub fn dephase(&self) -> DiagonalState {
        let probs = (0..self.dim())
            .map(|i| self.data[(i, i)].re.clamp(0.0, 1.0))
            .collect();
        DiagonalState { probs }
    }

    /// Canonical purification Σ_i √λ_i |i⟩_A |e_i⟩_B; tracing out A
    /// reproduces the state.
    pub fn purify(&self) -> BipartitePureState {
        let n = self.dim();
        let mut amps = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, &lambda) in self.spectrum().iter().enumerate() {
            if lambda <= 0.0 {
                continue;
            }
            let coeff = lambda.sqrt();
            let v = self.spectral.eigenvector(i);
            for (b, vb) in v.iter().enumerate() {
                amps[i * n + b] = coeff * vb;
            }
        }
        BipartitePureState::new_normalized(n, n, amps)
    }
}

/// Probability vector from the diagonal of a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    probs: Vec<f64>,
}

impl DiagonalState {
    /// Accepts entries within `tol` of a probability vector, clamping them
    /// into [0, 1].
    pub fn new(raw: &[f64], tol: f64) -> Result<Self, StateError> {
        if let Some(&bad) = raw.iter().find(|&&p| p < -tol) {
            return Err(StateError::NotPositive {
                min_eigenvalue: bad,
            });
        }
        let sum: f64 = raw.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(StateError::TraceNotOne { trace: sum });
        }
        Ok(Self {
            probs: raw.iter().map(|&p| p.clamp(0.0, 1.0)).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }
}

/// Shannon entropy −Σ p log p in the given base, with 0·log 0 := 0.
///
/// Used both for diagonal states and for spectra of density matrices.
pub fn entropy(probs: &[f64], log_base: f64) -> f64 {
    assert!(log_base > 1.0, "log base must exceed 1");
    let nats: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    nats / log_base.ln()
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(amps: Vec<Complex64>, tol: f64) -> Result<Self, StateError> {
        let norm = l2_norm(&amps);
        if (norm - 1.0).abs() > tol {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(Self::normalized(amps))
    }

    /// Rescales to unit norm; panics on the zero vector.
    pub fn normalized(mut amps: Vec<Complex64>) -> Self {
        let norm = l2_norm(&amps);
        assert!(norm > 0.0, "cannot normalize the zero vector");
        for a in &mut amps {
            *a /= norm;
        }
        Self { amps }
    }

    /// Computational basis vector |k⟩.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        m
    }

    /// Diagonal of the projector: |amp_i|².
    pub fn diagonal(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Relative entropy coherence of a pure state: S(Δ(ψ)) since S(ψ) = 0.
    pub fn coherence(&self, log_base: f64) -> f64 {
        entropy(&self.diagonal(), log_base)
    }

    /// Phase-insensitive equality: compares rank-one projectors.
    pub fn same_ray(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && frobenius_distance(&self.projector(), &other.projector())
                .map(|d| d <= tol)
                .unwrap_or(false)
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn l2_norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Pure-state decomposition {p_k, |ψ_k⟩}.
#[derive(Debug, Clone)]
pub struct PureEnsemble {
    members: Vec<(f64, PureState)>,
}

impl PureEnsemble {
    pub fn new(members: Vec<(f64, PureState)>, tol: f64) -> Result<Self, StateError> {
        if members.is_empty() {
            return Err(StateError::MalformedEnsemble);
        }
        let dim = members[0].1.dim();
        if members.iter().any(|(_, s)| s.dim() != dim) {
            return Err(StateError::MalformedEnsemble);
        }
        for &(w, _) in &members {
            if !(-tol..=1.0 + tol).contains(&w) {
                return Err(StateError::WeightOutOfRange { weight: w });
            }
        }
        let sum: f64 = members.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > tol {
            return Err(StateError::WeightsNotNormalized { sum });
        }
        Ok(Self { members })
    }

    /// Builds from possibly unnormalized weights: drops members at or below
    /// [`WEIGHT_DROP_TOL`] and renormalizes the rest.
    pub fn from_weighted(members: Vec<(f64, PureState)>) -> Result<Self, StateError> {
        let kept: Vec<(f64, PureState)> = members
            .into_iter()
            .filter(|(w, _)| *w > WEIGHT_DROP_TOL)
            .collect();
        if kept.is_empty() {
            return Err(StateError::MalformedEnsemble);
        }
        let total: f64 = kept.iter().map(|(w, _)| w).sum();
        let members = kept.into_iter().map(|(w, s)| (w / total, s)).collect();
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }

    /// Σ p_k |ψ_k⟩⟨ψ_k| as a validated density matrix.
    pub fn mix(&self) -> Result<DensityMatrix, StateError> {
        self.mix_with_tol(DEFAULT_TOL)
    }

    pub fn mix_with_tol(&self, tol: f64) -> Result<DensityMatrix, StateError> {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (w, s) in &self.members {
            for i in 0..n {
                let wi = w * s.amps()[i];
                for j in 0..n {
                    m[(i, j)] += wi * s.amps()[j].conj();
                }
            }
        }
        DensityMatrix::new(m, tol)
    }
}

/// Pure state on a bipartite system; amplitude index is a-major:
/// `amps[a * dim_b + b]`.
#[derive(Debug, Clone)]
pub struct BipartitePureState {
    dim_a: usize,
    dim_b: usize,
    amps: Vec<Complex64>,
}

impl BipartitePureState {
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        amps: Vec<Complex64>,
        tol: f64,
    ) -> Result<Self, StateError> {
        assert_eq!(amps.len(), dim_a * dim_b, "amplitude length mismatch");
        let norm = l2_norm(&amps);
        if (norm - 1.0).abs() > tol {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(Self::new_normalized(dim_a, dim_b, amps))
    }

    pub(crate) fn new_normalized(dim_a: usize, dim_b: usize, mut amps: Vec<Complex64>) -> Self {
        let norm = l2_norm(&amps);
        assert!(norm > 0.0, "cannot normalize the zero vector");
        for a in &mut amps {
            *a /= norm;
        }
        Self { dim_a, dim_b, amps }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Bob's reduced state Tr_A |ψ⟩⟨ψ| (unvalidated raw matrix).
    pub fn bob_marginal(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim_b, self.dim_b);
        for a in 0..self.dim_a {
            let block = &self.amps[a * self.dim_b..(a + 1) * self.dim_b];
            for i in 0..self.dim_b {
                for j in 0..self.dim_b {
                    m[(i, j)] += block[i] * block[j].conj();
                }
            }
        }
        m
    }

    /// The ensemble steered on B when A is measured in `alice_basis`
    /// (a complete orthonormal basis of the A side). Members with weight
    /// at or below [`WEIGHT_DROP_TOL`] are dropped and the rest
    /// renormalized.
    pub fn ensemble_for_basis(
        &self,
        alice_basis: &[PureState],
        tol: f64,
    ) -> Result<PureEnsemble, StateError> {
        if alice_basis.len() != self.dim_a || alice_basis.iter().any(|v| v.dim() != self.dim_a) {
            return Err(StateError::MalformedEnsemble);
        }
        let mut gram_dev = 0.0f64;
        for (i, u) in alice_basis.iter().enumerate() {
            for (j, v) in alice_basis.iter().enumerate() {
                let g = u.inner(v);
                let target = if i == j { 1.0 } else { 0.0 };
                gram_dev = gram_dev.max((g - Complex64::new(target, 0.0)).norm());
            }
        }
        if gram_dev > tol {
            return Err(StateError::BasisNotOrthonormal { deviation: gram_dev });
        }

        let mut members = Vec::with_capacity(self.dim_a);
        for basis_vec in alice_basis {
            // (⟨a_j| ⊗ 1)|ψ⟩
            let mut collapsed = vec![Complex64::new(0.0, 0.0); self.dim_b];
            for a in 0..self.dim_a {
                let coeff = basis_vec.amps()[a].conj();
                if coeff == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let block = &self.amps[a * self.dim_b..(a + 1) * self.dim_b];
                for (slot, amp) in collapsed.iter_mut().zip(block) {
                    *slot += coeff * amp;
                }
            }
            let weight: f64 = collapsed.iter().map(|z| z.norm_sqr()).sum();
            if weight > WEIGHT_DROP_TOL {
                members.push((weight, PureState::normalized(collapsed)));
            }
        }
        PureEnsemble::from_weighted(members)
    }
}

/// All size-T decompositions of ρ arise by applying a T×r isometry to the
/// eigen-ensemble: √p_j |φ_j⟩ = Σ_i U_ji √λ_i |e_i⟩, with r = rank(ρ).
pub fn hjw_rotate(rho: &DensityMatrix, isometry: &ComplexMatrix) -> Result<PureEnsemble, StateError> {
    let r = rho.rank();
    let t = isometry.rows();
    if isometry.cols() != r || t < r {
        return Err(StateError::MalformedEnsemble);
    }
    let gram = isometry.adjoint().matmul(isometry).map_err(StateError::Kernel)?;
    let deviation = frobenius_distance(&gram, &ComplexMatrix::identity(r)).map_err(StateError::Kernel)?;
    if deviation > rho.tol().max(DEFAULT_TOL) {
        return Err(StateError::NotIsometry { deviation });
    }

    let n = rho.dim();
    let mut members = Vec::with_capacity(t);
    for j in 0..t {
        let mut unnormalized = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..r {
            let coeff = isometry[(j, i)] * rho.spectrum()[i].max(0.0).sqrt();
            if coeff == Complex64::new(0.0, 0.0) {
                continue;
            }
            let e = rho.spectral().eigenvector(i);
            for (slot, ei) in unnormalized.iter_mut().zip(e.iter()) {
                *slot += coeff * ei;
            }
        }
        let weight: f64 = unnormalized.iter().map(|z| z.norm_sqr()).sum();
        if weight > WEIGHT_DROP_TOL {
            members.push((weight, PureState::normalized(unnormalized)));
        }
    }
    PureEnsemble::from_weighted(members)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn maximally_mixed(n: usize) -> DensityMatrix {
        DensityMatrix::new_default(ComplexMatrix::identity(n).scaled(c(1.0 / n as f64, 0.0)))
            .unwrap()
    }

    fn plus_state() -> PureState {
        PureState::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)])
    }

    fn minus_state() -> PureState {
        PureState::normalized(vec![c(1.0, 0.0), c(-1.0, 0.0)])
    }

    #[test]
    fn accepts_maximally_mixed_qubit() {
        let rho = maximally_mixed(2);
        assert_eq!(rho.dim(), 2);
        assert!((rho.spectrum()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_matrix() {
        // Eigenvalues 0.5 ± 0.6, one negative.
        let raw = ComplexMatrix::from_real_rows(&[vec![0.5, 0.6], vec![0.6, 0.5]]);
        match DensityMatrix::new_default(raw) {
            Err(StateError::NotPositive { min_eigenvalue }) => {
                assert!((min_eigenvalue + 0.1).abs() < 1e-9)
            }
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn rejects_zero_diagonal_with_coherence() {
        let raw = ComplexMatrix::from_real_rows(&[vec![0.0, 0.1], vec![0.1, 1.0]]);
        assert!(matches!(
            DensityMatrix::new_default(raw),
            Err(StateError::ZeroDiagonalInconsistency { index: 0, .. })
        ));
    }

    #[test]
    fn rejects_wrong_trace_and_non_hermitian() {
        let raw = ComplexMatrix::from_real_rows(&[vec![0.5, 0.0], vec![0.0, 0.4]]);
        assert!(matches!(
            DensityMatrix::new_default(raw),
            Err(StateError::TraceNotOne { .. })
        ));
        let raw = ComplexMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.1, 0.1)], vec![c(0.1, 0.1), c(0.5, 0.0)]]);
        assert!(matches!(
            DensityMatrix::new_default(raw),
            Err(StateError::NotHermitian { .. })
        ));
    }

    #[test]
    fn dephase_reads_the_diagonal() {
        assert_eq!(maximally_mixed(2).dephase().probs(), &[0.5, 0.5]);
        let plus = PureEnsemble::new(vec![(1.0, plus_state())], 1e-9)
            .unwrap()
            .mix()
            .unwrap();
        let d = plus.dephase();
        assert!((d.probs()[0] - 0.5).abs() < 1e-12);
        assert!((d.probs()[1] - 0.5).abs() < 1e-12);
        let raw = ComplexMatrix::from_real_rows(&[
            vec![0.2, 0.0, 0.0],
            vec![0.0, 0.3, 0.0],
            vec![0.0, 0.0, 0.5],
        ]);
        let rho = DensityMatrix::new_default(raw).unwrap();
        assert_eq!(rho.dephase().probs(), &[0.2, 0.3, 0.5]);
    }

    #[test]
    fn entropy_closed_forms() {
        assert!((entropy(&[0.5, 0.5], 2.0) - 1.0).abs() < 1e-15);
        assert_eq!(entropy(&[1.0, 0.0], 2.0), 0.0);
        let third = 1.0 / 3.0;
        assert!((entropy(&[third, third, third], 2.0) - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn mix_of_plus_minus_is_maximally_mixed() {
        let ens = PureEnsemble::new(vec![(0.5, plus_state()), (0.5, minus_state())], 1e-9).unwrap();
        let rho = ens.mix().unwrap();
        let d = frobenius_distance(rho.matrix(), maximally_mixed(2).matrix()).unwrap();
        assert!(d < 1e-12);
    }

    #[test]
    fn mix_of_single_member_is_projector() {
        let ens = PureEnsemble::new(vec![(1.0, PureState::basis_state(2, 0))], 1e-9).unwrap();
        let rho = ens.mix().unwrap();
        assert!((rho.entry(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(rho.entry(1, 1).norm() < 1e-12);
    }

    #[test]
    fn purify_pure_state_is_product() {
        let raw = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let rho = DensityMatrix::new_default(raw).unwrap();
        let psi = rho.purify();
        // single Schmidt coefficient 1
        let weights: Vec<f64> = (0..2)
            .map(|a| {
                psi.amps()[a * 2..(a + 1) * 2]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum()
            })
            .collect();
        assert!((weights[0] - 1.0).abs() < 1e-12);
        assert!(weights[1].abs() < 1e-12);
    }

    #[test]
    fn purify_spectrum_fixes_schmidt_coefficients() {
        let raw = ComplexMatrix::from_real_rows(&[vec![0.9, 0.0], vec![0.0, 0.1]]);
        let rho = DensityMatrix::new_default(raw).unwrap();
        let psi = rho.purify();
        let marginal = psi.bob_marginal();
        assert!(frobenius_distance(&marginal, rho.matrix()).unwrap() < 1e-12);
        let mixed = maximally_mixed(2);
        let psi = mixed.purify();
        let w0: f64 = psi.amps()[0..2].iter().map(|z| z.norm_sqr()).sum();
        assert!((w0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn steering_product_state_gives_single_member() {
        // |0⟩_A |+⟩_B
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = vec![c(s, 0.0), c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let psi = BipartitePureState::new(2, 2, amps, 1e-9).unwrap();
        let basis = vec![PureState::basis_state(2, 0), PureState::basis_state(2, 1)];
        let ens = psi.ensemble_for_basis(&basis, 1e-9).unwrap();
        assert_eq!(ens.size(), 1);
        assert!((ens.members()[0].0 - 1.0).abs() < 1e-12);
        assert!(ens.members()[0].1.same_ray(&plus_state(), 1e-9));
    }

    #[test]
    fn steering_bell_state_computational_and_hadamard() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let psi = BipartitePureState::new(2, 2, amps, 1e-9).unwrap();

        let computational = vec![PureState::basis_state(2, 0), PureState::basis_state(2, 1)];
        let ens = psi.ensemble_for_basis(&computational, 1e-9).unwrap();
        assert_eq!(ens.size(), 2);
        assert!(ens.members()[0].1.same_ray(&PureState::basis_state(2, 0), 1e-9));
        assert!((ens.members()[0].0 - 0.5).abs() < 1e-12);

        // Hadamard basis on A steers |±⟩ on B: ⟨±|⊗1 applied to the Bell
        // state leaves (|0⟩ ± |1⟩)/√2 with weight 1/2 each.
        let hadamard = vec![plus_state(), minus_state()];
        let ens = psi.ensemble_for_basis(&hadamard, 1e-9).unwrap();
        assert_eq!(ens.size(), 2);
        assert!((ens.members()[0].0 - 0.5).abs() < 1e-12);
        assert!(ens.members()[0].1.same_ray(&plus_state(), 1e-9));
        assert!(ens.members()[1].1.same_ray(&minus_state(), 1e-9));
    }

    #[test]
    fn steering_rejects_skewed_basis() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let psi = BipartitePureState::new(2, 2, amps, 1e-9).unwrap();
        let skewed = vec![plus_state(), PureState::basis_state(2, 0)];
        assert!(matches!(
            psi.ensemble_for_basis(&skewed, 1e-9),
            Err(StateError::BasisNotOrthonormal { .. })
        ));
    }

    #[test]
    fn hjw_identity_isometry_recovers_eigen_ensemble() {
        let raw = ComplexMatrix::from_real_rows(&[vec![0.75, 0.0], vec![0.0, 0.25]]);
        let rho = DensityMatrix::new_default(raw).unwrap();
        let ens = hjw_rotate(&rho, &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(ens.size(), 2);
        assert!((ens.members()[0].0 - 0.75).abs() < 1e-12);
        assert!(ens.members()[0].1.same_ray(&PureState::basis_state(2, 0), 1e-9));
    }

    #[test]
    fn hjw_hadamard_on_maximally_mixed() {
        let rho = maximally_mixed(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = ComplexMatrix::from_real_rows(&[vec![s, s], vec![s, -s]]);
        let ens = hjw_rotate(&rho, &hadamard).unwrap();
        assert_eq!(ens.size(), 2);
        assert!((ens.members()[0].0 - 0.5).abs() < 1e-12);
        let m = ens.mix().unwrap();
        assert!(frobenius_distance(m.matrix(), rho.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn hjw_rejects_non_isometry() {
        let rho = maximally_mixed(2);
        let skew = ComplexMatrix::from_real_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]);
        assert!(matches!(
            hjw_rotate(&rho, &skew),
            Err(StateError::NotIsometry { .. })
        ));
    }
}
