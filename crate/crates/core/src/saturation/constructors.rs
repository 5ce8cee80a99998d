//! Closed-form optimal decompositions.
//!
//! All members share the amplitude magnitudes √ρ_ii; only relative signs
//! (or phases, undone by the gauge) differ, so every member diagonal equals
//! Δ(ρ) by construction and the weights are fixed by the off-diagonal
//! entries. Zero-diagonal indices are compressed away first and re-embedded
//! into the returned states.

use super::{compress_zero_diagonal, gauge_real, Feasibility, SaturationError};
use crate::qmat::{nnls_solve, RealMatrix};
use crate::states::{DensityMatrix, PureEnsemble, PureState};
use crate::WEIGHT_DROP_TOL;
use num_complex::Complex64;

/// Normalized off-diagonal coordinates of a real-entry qutrit:
/// r1 = ρ01/√(ρ00ρ11), r2 = ρ12/√(ρ11ρ22), r3 = ρ02/√(ρ00ρ22).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolytopeCoords {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl PolytopeCoords {
    /// The four tetrahedron inequalities; all must be ≥ 0 (within
    /// tolerance) for the closed-form weights to be probabilities.
    pub fn inequality_values(&self) -> [f64; 4] {
        let Self { r1, r2, r3 } = *self;
        [
            r1 + r2 + r3 + 1.0,
            r2 - r1 - r3 + 1.0,
            r3 - r1 - r2 + 1.0,
            r1 - r2 - r3 + 1.0,
        ]
    }

    pub fn inside(&self, tol: f64) -> bool {
        self.inequality_values().iter().all(|&v| v >= -tol)
    }
}

/// Two-member optimal decomposition of a qubit: amplitudes (√ρ00, ±√ρ11)
/// with the phase of ρ01 absorbed into the second component, weights
/// ½(1 ± |ρ01|/√(ρ00ρ11)). Degenerate diagonal-zero inputs yield the
/// one-member ensemble.
pub fn qubit_decomposition(rho: &DensityMatrix) -> Result<PureEnsemble, SaturationError> {
    if rho.dim() != 2 {
        return Err(SaturationError::WrongDimension {
            expected: 2,
            actual: rho.dim(),
        });
    }
    let (compressed, compression) = compress_zero_diagonal(rho)?;
    if compressed.dim() == 1 {
        let member = PureEnsemble::new(vec![(1.0, PureState::basis_state(1, 0))], rho.tol())?;
        return Ok(compression.embed_ensemble(&member)?);
    }
    let ensemble = qubit_on_compressed(&compressed)?;
    Ok(compression.embed_ensemble(&ensemble)?)
}

/// The qubit construction on a 2x2 state with strictly positive diagonal.
fn qubit_on_compressed(rho: &DensityMatrix) -> Result<PureEnsemble, SaturationError> {
    let d0 = rho.entry(0, 0).re;
    let d1 = rho.entry(1, 1).re;
    let off = rho.entry(0, 1);
    let magnitude = off.norm() / (d0 * d1).sqrt();
    let phase = off.arg();

    let a0 = Complex64::new(d0.sqrt(), 0.0);
    let a1 = Complex64::new(d1.sqrt(), 0.0) * Complex64::new(0.0, -phase).exp();
    let plus = PureState::normalized(vec![a0, a1]);
    let minus = PureState::normalized(vec![a0, -a1]);
    let w_plus = 0.5 * (1.0 + magnitude);
    let w_minus = 0.5 * (1.0 - magnitude);
    Ok(PureEnsemble::from_weighted(vec![
        (w_plus, plus),
        (w_minus, minus),
    ])?)
}

/// Tetrahedron coordinates and membership for a qutrit. Complex
/// off-diagonals are accepted when a diagonal-unitary gauge makes them
/// real (the coordinates are computed on the gauged state).
pub fn qutrit_polytope(
    rho: &DensityMatrix,
) -> Result<(PolytopeCoords, bool), SaturationError> {
    if rho.dim() != 3 {
        return Err(SaturationError::WrongDimension {
            expected: 3,
            actual: rho.dim(),
        });
    }
    let (gauged, _) = gauge_real(rho).ok_or_else(|| SaturationError::NotApplicable {
        reason: "off-diagonal phases are not cycle-consistent".into(),
    })?;
    let tol = rho.tol();
    let normalized = |i: usize, j: usize| {
        let di = gauged.entry(i, i).re;
        let dj = gauged.entry(j, j).re;
        if di > tol && dj > tol {
            gauged.entry(i, j).re / (di * dj).sqrt()
        } else {
            0.0
        }
    };
    let coords = PolytopeCoords {
        r1: normalized(0, 1),
        r2: normalized(1, 2),
        r3: normalized(0, 2),
    };
    let inside = coords.inside(tol);
    Ok((coords, inside))
}

/// Four-member optimal decomposition of a tetrahedron-interior qutrit:
/// weights ¼(r1+r2+r3+1), ¼(r2−r1−r3+1), ¼(r3−r1−r2+1), ¼(r1−r2−r3+1)
/// with sign patterns (+,+,+), (−,+,+), (+,−,+), (+,+,−) on (√ρ00, √ρ11,
/// √ρ22). Zero-weight members are dropped; degenerate diagonals reduce
/// to the qubit or trivial construction.
pub fn qutrit_decomposition(rho: &DensityMatrix) -> Result<PureEnsemble, SaturationError> {
    if rho.dim() != 3 {
        return Err(SaturationError::WrongDimension {
            expected: 3,
            actual: rho.dim(),
        });
    }
    let (coords, inside) = qutrit_polytope(rho)?;
    if !inside {
        let min_weight = coords
            .inequality_values()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
            * 0.25;
        return Err(SaturationError::OutsidePolytope { min_weight });
    }

    let (compressed, compression) = compress_zero_diagonal(rho)?;
    let (gauged, gauge) = gauge_real(&compressed).ok_or_else(|| SaturationError::NotApplicable {
        reason: "off-diagonal phases are not cycle-consistent".into(),
    })?;

    let ensemble = match gauged.dim() {
        1 => PureEnsemble::new(vec![(1.0, PureState::basis_state(1, 0))], rho.tol())?,
        2 => qubit_on_compressed(&gauged)?,
        _ => {
            let weights = coords.inequality_values().map(|v| 0.25 * v.max(0.0));
            let signs: [[f64; 3]; 4] = [
                [1.0, 1.0, 1.0],
                [-1.0, 1.0, 1.0],
                [1.0, -1.0, 1.0],
                [1.0, 1.0, -1.0],
            ];
            let sqrt_diag: Vec<f64> = (0..3).map(|i| gauged.entry(i, i).re.max(0.0).sqrt()).collect();
            let members = weights
                .iter()
                .zip(&signs)
                .filter(|(&w, _)| w > WEIGHT_DROP_TOL)
                .map(|(&w, pattern)| {
                    let amps = sqrt_diag
                        .iter()
                        .zip(pattern)
                        .map(|(&m, &s)| Complex64::new(s * m, 0.0))
                        .collect();
                    (w, PureState::normalized(amps))
                })
                .collect();
            PureEnsemble::from_weighted(members)?
        }
    };
    let ensemble = gauge.ungauge_ensemble(&ensemble)?;
    Ok(compression.embed_ensemble(&ensemble)?)
}

/// Sign-pattern decomposition for n-dimensional states: member k carries a
/// minus sign on the first k components, so the pair (i, j) equation reads
/// Σ_k p_k f(i,j,k) + p_0 = ρ_ij/√(ρ_ii ρ_jj) with f = −1 exactly when
/// i < k ≤ j. The overdetermined system (all pairs plus Σp = 1) is solved
/// by nonnegative least squares; feasible iff the residual vanishes within
/// the state tolerance.
pub fn ndim_decomposition(
    rho: &DensityMatrix,
) -> Result<Feasibility<PureEnsemble>, SaturationError> {
    let (compressed, compression) = compress_zero_diagonal(rho)?;
    let (gauged, gauge) = gauge_real(&compressed).ok_or_else(|| SaturationError::NotApplicable {
        reason: "off-diagonal phases are not cycle-consistent".into(),
    })?;
    let tol = rho.tol();
    let m = gauged.dim();

    // Rows: one per pair (i, j) with i < j, plus the normalization row.
    let pairs = super::pair_order(m);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(pairs.len() + 1);
    let mut rhs: Vec<f64> = Vec::with_capacity(pairs.len() + 1);
    for &(i, j) in &pairs {
        let row = (0..m)
            .map(|k| if i < k && k <= j { -1.0 } else { 1.0 })
            .collect();
        rows.push(row);
        let denom = (gauged.entry(i, i).re * gauged.entry(j, j).re).sqrt();
        rhs.push(gauged.entry(i, j).re / denom);
    }
    rows.push(vec![1.0; m]);
    rhs.push(1.0);

    let system = RealMatrix::from_rows(&rows);
    let sol = nnls_solve(&system, &rhs, tol)?;
    if sol.residual > tol || sol.x.iter().any(|&p| p > 1.0 + tol) {
        return Ok(Feasibility::Infeasible {
            residual: sol.residual,
        });
    }

    let sqrt_diag: Vec<f64> = (0..m).map(|i| gauged.entry(i, i).re.max(0.0).sqrt()).collect();
    let members = sol
        .x
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > WEIGHT_DROP_TOL)
        .map(|(k, &p)| {
            let amps = sqrt_diag
                .iter()
                .enumerate()
                .map(|(i, &mag)| Complex64::new(if i < k { -mag } else { mag }, 0.0))
                .collect();
            (p, PureState::normalized(amps))
        })
        .collect();
    let ensemble = PureEnsemble::from_weighted(members)?;
    let ensemble = gauge.ungauge_ensemble(&ensemble)?;
    let ensemble = compression.embed_ensemble(&ensemble)?;
    Ok(Feasibility::Feasible(ensemble))
}
