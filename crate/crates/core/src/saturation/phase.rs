//! The phase-constrained feasibility system A·P = B.
//!
//! A witness decomposition with all member diagonals equal to Δ(ρ) exists
//! iff the unit-modulus matrix A (one column per member, one row per index
//! pair plus a final all-ones row) admits a probability vector P solving
//! A·P = B, where the column phases satisfy the telescoping chain
//! constraints that make each member rank one. Each column therefore has
//! n−1 free angles, one per adjacent index pair; every other angle is the
//! telescoped sum.

use super::{
    certify, compress_zero_diagonal, pair_order, CoherenceVector, Feasibility, Method,
    SaturationCertificate, SaturationError, Verdict,
};
use crate::qmat::{nnls_solve, ComplexMatrix};
use crate::random::rng_for_stream;
use crate::states::{DensityMatrix, PureEnsemble, PureState};
use crate::WEIGHT_DROP_TOL;
use num_complex::Complex64;
use rand::Rng;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// The argument table θ^(k)_{ij} for k = 0…T−1 and pairs i < j, stored in
/// the canonical pair order of [`pair_order`].
#[derive(Debug, Clone)]
pub struct PhaseAssignment {
    n: usize,
    /// theta[k][pair_index], angles in [0, 2π).
    theta: Vec<Vec<f64>>,
}

impl PhaseAssignment {
    /// Builds a chain-consistent assignment from the free angles: per
    /// column, one angle per adjacent pair (i, i+1); the remaining angles
    /// telescope as θ_ij = Σ_{l=i}^{j−1} θ_{l,l+1}.
    pub fn from_free_angles(n: usize, free: &[Vec<f64>]) -> Self {
        assert!(n >= 2, "phase assignment needs dimension at least 2");
        assert!(!free.is_empty(), "at least one column required");
        let pairs = pair_order(n);
        let theta = free
            .iter()
            .map(|adjacent| {
                assert_eq!(adjacent.len(), n - 1, "need n-1 free angles per column");
                pairs
                    .iter()
                    .map(|&(i, j)| adjacent[i..j].iter().sum::<f64>().rem_euclid(TWO_PI))
                    .collect()
            })
            .collect();
        Self { n, theta }
    }

    /// Accepts a full table in canonical pair order; the chain constraints
    /// are checked by [`build_phase_matrix`].
    pub fn from_table(n: usize, theta: Vec<Vec<f64>>) -> Self {
        let pairs = pair_order(n).len();
        assert!(theta.iter().all(|col| col.len() == pairs));
        let theta = theta
            .into_iter()
            .map(|col| col.into_iter().map(|a| a.rem_euclid(TWO_PI)).collect())
            .collect();
        Self { n, theta }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> usize {
        self.theta.len()
    }

    pub fn angle(&self, column: usize, pair_index: usize) -> f64 {
        self.theta[column][pair_index]
    }

    /// Checks θ_{is} − θ_{i+1,s} ≡ θ_{i,i+1} (mod 2π) for every column.
    pub fn validate(&self, tol: f64) -> Result<(), SaturationError> {
        let n = self.n;
        let index = |i: usize, j: usize| pair_index(n, i, j);
        for (k, col) in self.theta.iter().enumerate() {
            for i in 0..n.saturating_sub(2) {
                for s in i + 2..n {
                    let lhs = col[index(i, s)] - col[index(i + 1, s)];
                    let rhs = col[index(i, i + 1)];
                    let deviation = angular_deviation(lhs, rhs);
                    if deviation > tol {
                        return Err(SaturationError::ConstraintViolation {
                            column: k,
                            i,
                            iplus: i + 1,
                            s,
                            deviation,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Per-column amplitude phases α_i with α_i − α_j = θ_ij (α_{n−1} = 0),
    /// recovered by telescoping the adjacent angles.
    pub fn column_phases(&self, column: usize) -> Vec<f64> {
        let n = self.n;
        let mut alpha = vec![0.0; n];
        for i in (0..n - 1).rev() {
            alpha[i] = alpha[i + 1] + self.theta[column][pair_index(n, i, i + 1)];
        }
        alpha
    }
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    // Pairs (i, i+1..n) start after all pairs with smaller first index.
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn angular_deviation(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    d.min(TWO_PI - d)
}

/// The matrix A: rows e^{iθ^(k)_{ij}} in canonical pair order plus a final
/// all-ones row; one column per ensemble member. Fails with
/// `ConstraintViolation` if the assignment breaks a chain identity.
pub fn build_phase_matrix(pa: &PhaseAssignment) -> Result<ComplexMatrix, SaturationError> {
    pa.validate(crate::DEFAULT_TOL)?;
    let pairs = pair_order(pa.n()).len();
    let t = pa.columns();
    let mut a = ComplexMatrix::zeros(pairs + 1, t);
    for k in 0..t {
        for p in 0..pairs {
            let angle = pa.angle(k, p);
            a[(p, k)] = Complex64::new(angle.cos(), angle.sin());
        }
        a[(pairs, k)] = Complex64::new(1.0, 0.0);
    }
    Ok(a)
}

/// Solves A·P = B for probabilities P ≥ 0 after splitting the complex
/// system into real and imaginary rows. Feasible iff the least-squares
/// residual is within `tol`; the final all-ones row pins Σ p_k = 1.
pub fn solve_probabilities(
    pa: &PhaseAssignment,
    b: &CoherenceVector,
    tol: f64,
) -> Result<Feasibility<Vec<f64>>, SaturationError> {
    if pa.n() != b.n() {
        return Err(SaturationError::VectorMismatch {
            left: pa.n(),
            right: b.n(),
        });
    }
    let a = build_phase_matrix(pa)?;
    let stacked = a.real_stacked();
    let rhs: Vec<f64> = b
        .entries()
        .iter()
        .map(|z| z.re)
        .chain(b.entries().iter().map(|z| z.im))
        .collect();
    let sol = nnls_solve(&stacked, &rhs, tol)?;
    if sol.residual <= tol && sol.x.iter().all(|&p| p <= 1.0 + tol) {
        Ok(Feasibility::Feasible(sol.x))
    } else {
        Ok(Feasibility::Infeasible {
            residual: sol.residual,
        })
    }
}

/// Randomized search for a feasible phase assignment with `t` columns.
///
/// Deterministic sign-pattern candidates (adjacent angles aligned to the
/// phases of B, flipped by π per binary pattern) are tried first; they
/// cover every qubit, the qutrit tetrahedron, the n-dim sign-pattern
/// class, and pure states. Random candidates with coordinate refinement
/// of the residual follow, `budget` of them. A NotFound verdict is a
/// search failure, not a proof of infeasibility.
pub fn search_phase_feasibility(
    rho: &DensityMatrix,
    t: usize,
    budget: usize,
    seed: u64,
    tol: f64,
) -> Result<SaturationCertificate, SaturationError> {
    assert!(t > 0, "ensemble size must be positive");
    let (compressed, compression) = compress_zero_diagonal(rho)?;
    let m = compressed.dim();

    if m == 1 {
        // Incoherent pure state: the trivial one-member decomposition.
        let witness = compression.embed_ensemble(&PureEnsemble::new(
            vec![(1.0, PureState::basis_state(1, 0))],
            tol,
        )?)?;
        return certify(&witness, rho, tol, Method::PhaseSearch);
    }

    let b = CoherenceVector::of(&compressed);
    let aligned: Vec<f64> = (0..m - 1)
        .map(|l| b.entries()[pair_index(m, l, l + 1)].arg())
        .collect();

    let mut best_attempt: Option<(f64, f64)> = None;

    // Sign-pattern candidates: column k flips the aligned adjacent angles
    // by π according to the bits of k. Only 2^(m-1) distinct patterns
    // exist, so larger requested sizes are truncated.
    let t_patterns = t.min(1usize << (m - 1));
    let free: Vec<Vec<f64>> = (0..t_patterns)
        .map(|k| {
            aligned
                .iter()
                .enumerate()
                .map(|(l, &base)| base + if (k >> l) & 1 == 1 { std::f64::consts::PI } else { 0.0 })
                .collect()
        })
        .collect();
    let pa = PhaseAssignment::from_free_angles(m, &free);
    if let Some(cert) = try_assignment(&pa, &b, rho, &compressed, &compression, tol, &mut best_attempt)? {
        return Ok(cert);
    }

    // Random candidates with coordinate refinement of the residual.
    // Starts far from feasibility (large residual) are not worth refining;
    // the budget is better spent on fresh draws.
    const REFINE_CUTOFF: f64 = 0.5;
    for candidate in 0..budget {
        let mut rng = rng_for_stream(seed, candidate as u64);
        let mut free: Vec<Vec<f64>> = (0..t)
            .map(|_| (0..m - 1).map(|_| rng.random::<f64>() * TWO_PI).collect())
            .collect();

        if residual_of(&free, m, &b, tol) < REFINE_CUTOFF {
            for col in 0..t {
                for angle_idx in 0..m - 1 {
                    let current = free[col][angle_idx];
                    let cur_res = residual_of(&free, m, &b, tol);
                    let (refined, new_res) = golden_min(
                        |x| {
                            free[col][angle_idx] = x;
                            residual_of(&free, m, &b, tol)
                        },
                        current - std::f64::consts::FRAC_PI_2,
                        current + std::f64::consts::FRAC_PI_2,
                    );
                    free[col][angle_idx] = if new_res <= cur_res { refined } else { current };
                }
            }
        }

        let pa = PhaseAssignment::from_free_angles(m, &free);
        if let Some(cert) =
            try_assignment(&pa, &b, rho, &compressed, &compression, tol, &mut best_attempt)?
        {
            return Ok(cert);
        }
    }

    let (residual_mix, residual_diag) = best_attempt.unwrap_or((f64::INFINITY, f64::INFINITY));
    Ok(SaturationCertificate::not_found(
        residual_mix,
        residual_diag,
        Method::PhaseSearch,
    ))
}

fn residual_of(free: &[Vec<f64>], n: usize, b: &CoherenceVector, tol: f64) -> f64 {
    let pa = PhaseAssignment::from_free_angles(n, free);
    match solve_probabilities(&pa, b, tol) {
        Ok(Feasibility::Feasible(_)) => 0.0,
        Ok(Feasibility::Infeasible { residual }) => residual,
        Err(_) => f64::INFINITY,
    }
}

/// Solves for P, assembles the witness on success, verifies it against the
/// original state, and tracks the best residuals otherwise. A solver
/// failure on one candidate (iteration budget, degenerate columns) is not
/// fatal to the search: the candidate is simply skipped.
fn try_assignment(
    pa: &PhaseAssignment,
    b: &CoherenceVector,
    rho: &DensityMatrix,
    compressed: &DensityMatrix,
    compression: &super::Compression,
    tol: f64,
    best_attempt: &mut Option<(f64, f64)>,
) -> Result<Option<SaturationCertificate>, SaturationError> {
    let p = match solve_probabilities(pa, b, tol) {
        Ok(Feasibility::Feasible(p)) => p,
        Ok(Feasibility::Infeasible { .. }) => return Ok(None),
        Err(SaturationError::Kernel(_)) => return Ok(None),
        Err(other) => return Err(other),
    };
    let witness = assemble_witness(pa, &p, compressed)?;
    let witness = compression.embed_ensemble(&witness)?;
    let cert = certify(&witness, rho, tol, Method::PhaseSearch)?;
    if cert.verdict == Verdict::Saturated {
        return Ok(Some(cert));
    }
    if best_attempt.is_none_or(|(bm, _)| cert.residual_mix < bm) {
        *best_attempt = Some((cert.residual_mix, cert.residual_diag));
    }
    Ok(None)
}

/// Member k has amplitudes √ρ_ii e^{iα_i} with the column phases of the
/// assignment; the chain constraints make each member rank one with the
/// required diagonal.
fn assemble_witness(
    pa: &PhaseAssignment,
    probabilities: &[f64],
    compressed: &DensityMatrix,
) -> Result<PureEnsemble, SaturationError> {
    let n = compressed.dim();
    let mut members = Vec::new();
    for (k, &p) in probabilities.iter().enumerate() {
        if p <= WEIGHT_DROP_TOL {
            continue;
        }
        let alpha = pa.column_phases(k);
        let amps: Vec<Complex64> = (0..n)
            .map(|i| {
                let mag = compressed.entry(i, i).re.max(0.0).sqrt();
                mag * Complex64::new(alpha[i].cos(), alpha[i].sin())
            })
            .collect();
        members.push((p, PureState::normalized(amps)));
    }
    PureEnsemble::from_weighted(members).map_err(SaturationError::State)
}

fn golden_min(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..12 {
        if f1 > f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
