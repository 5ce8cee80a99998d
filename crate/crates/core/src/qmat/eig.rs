//! Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Each rotation annihilates one off-diagonal pair (p, q) with a complex
//! plane rotation: the phase of the pivot entry is absorbed into the
//! rotation, reducing the 2x2 subproblem to the real symmetric case.
//! Unconditionally stable and adequate for the dimensions this crate
//! targets (a few dozen).

use super::{ComplexMatrix, QmatError};
use num_complex::Complex64;

/// Default sweep budget; a sweep visits every off-diagonal pair once.
/// Jacobi converges quadratically, so this is generous for dim <= 64.
pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius mass below `CONVERGENCE_FACTOR * scale` counts as
/// converged, where `scale` is the Frobenius norm of the input.
const CONVERGENCE_FACTOR: f64 = 1e-15;

/// Eigenvalues (descending) with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// n x n unitary; column i is the eigenvector for `eigenvalues[i]`.
    eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        self.eigenvectors.column(i)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Σ λ_i v_i v_i†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            for i in 0..n {
                let vi = self.eigenvectors[(i, k)];
                for j in 0..n {
                    out[(i, j)] += lambda * vi * self.eigenvectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `tol` bounds the accepted deviation from Hermiticity (max-norm of
/// `m - m†`); the matrix is symmetrized before iterating. Output is
/// deterministic: fixed sweep order, eigenvalues sorted descending, each
/// eigenvector's phase fixed so its largest-magnitude component is real
/// and nonnegative, exact ties broken lexicographically.
pub fn eig_hermitian(m: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition, QmatError> {
    eig_hermitian_with_budget(m, tol, DEFAULT_MAX_SWEEPS)
}

pub fn eig_hermitian_with_budget(
    m: &ComplexMatrix,
    tol: f64,
    max_sweeps: usize,
) -> Result<SpectralDecomposition, QmatError> {
    if !m.is_square() {
        return Err(QmatError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    m.check_finite()?;
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(QmatError::NotHermitian { deviation, tol });
    }

    let n = m.rows();
    // Work on the exactly Hermitian part (m + m†)/2; diagonal becomes real.
    let mut h = m.add(&m.adjoint()).expect("same shape").scaled(Complex64::new(0.5, 0.0));
    let mut v = ComplexMatrix::identity(n);

    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let threshold = CONVERGENCE_FACTOR * scale;

    let mut converged = n <= 1 || off_diagonal_norm(&h) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps >= max_sweeps {
            return Err(QmatError::NoConvergence { iterations: sweeps });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut h, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&h) <= threshold;
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| (h[(k, k)].re, canonical_phase(v.column(k))))
        .collect();
    pairs.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("finite eigenvalues")
            .then_with(|| compare_vectors(&a.1, &b.1))
    });

    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (k, (_, vec)) in pairs.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, k)] = vec[i];
        }
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(h: &ComplexMatrix) -> f64 {
    let n = h.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += h[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation zeroing h[(p, q)], accumulated into `v`.
fn rotate(h: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let pivot = h[(p, q)];
    let r = pivot.norm();
    if r == 0.0 {
        return;
    }
    let phase = pivot / r; // e^{i phi}
    let alpha = h[(p, p)].re;
    let gamma = h[(q, q)].re;

    // Real symmetric 2x2 after absorbing the phase: [[alpha, r], [r, gamma]].
    let tau = (gamma - alpha) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Unitary U restricted to (p, q):
    //   U_pp = c          U_pq = s
    //   U_qp = -s e^{-i phi}   U_qq = c e^{-i phi}
    let phase_conj = phase.conj();
    let n = h.rows();

    // Columns: K = H U.
    for i in 0..n {
        let hip = h[(i, p)];
        let hiq = h[(i, q)];
        h[(i, p)] = c * hip - s * phase_conj * hiq;
        h[(i, q)] = s * hip + c * phase_conj * hiq;
    }
    // Rows: H' = U† K.
    for j in 0..n {
        let hpj = h[(p, j)];
        let hqj = h[(q, j)];
        h[(p, j)] = c * hpj - s * phase * hqj;
        h[(q, j)] = s * hpj + c * phase * hqj;
    }
    // Kill rounding residue on the annihilated pair and keep the diagonal real.
    h[(p, q)] = Complex64::new(0.0, 0.0);
    h[(q, p)] = Complex64::new(0.0, 0.0);
    h[(p, p)] = Complex64::new(h[(p, p)].re, 0.0);
    h[(q, q)] = Complex64::new(h[(q, q)].re, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = c * vip - s * phase_conj * viq;
        v[(i, q)] = s * vip + c * phase_conj * viq;
    }
}

/// Rotates the vector's global phase so the first component of largest
/// magnitude becomes real and nonnegative.
fn canonical_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag > 0.0 {
        let rot = v[best].conj() / best_mag;
        for z in &mut v {
            *z *= rot;
        }
        v[best] = Complex64::new(v[best].re.abs(), 0.0);
    }
    v
}

fn compare_vectors(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x
            .re
            .partial_cmp(&y.re)
            .expect("finite entries")
            .then(x.im.partial_cmp(&y.im).expect("finite entries"))
        {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::frobenius_distance;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let d = eig_hermitian(&ComplexMatrix::identity(2), 1e-9).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0, 1.0]);
        let gram = d.eigenvectors().adjoint().matmul(d.eigenvectors()).unwrap();
        assert!(frobenius_distance(&gram, &ComplexMatrix::identity(2)).unwrap() < 1e-12);
    }

    #[test]
    fn diagonal_input_sorted_descending() {
        let m = ComplexMatrix::from_real_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]);
        let d = eig_hermitian(&m, 1e-9).unwrap();
        assert_eq!(d.eigenvalues(), &[3.0, 1.0]);
        assert!((d.eigenvectors()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((d.eigenvectors()[(1, 1)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pauli_y_like_eigenvalues() {
        // [[0, -i], [i, 0]] has characteristic polynomial λ² - 1.
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]);
        let d = eig_hermitian(&m, 1e-9).unwrap();
        assert!((d.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues()[1] + 1.0).abs() < 1e-14);
        assert!(frobenius_distance(&d.reconstruct(), &m).unwrap() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(
            eig_hermitian(&m, 1e-9),
            Err(QmatError::NotHermitian { .. })
        ));
    }

    #[test]
    fn rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eig_hermitian(&m, 1e-9), Err(QmatError::NotSquare { .. })));
    }

    #[test]
    fn zero_budget_reports_no_convergence() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 0.5], vec![0.5, 0.0]]);
        assert!(matches!(
            eig_hermitian_with_budget(&m, 1e-9, 0),
            Err(QmatError::NoConvergence { .. })
        ));
    }

    #[test]
    fn deterministic_for_degenerate_spectrum() {
        let m = ComplexMatrix::from_real_rows(&[
            vec![0.5, 0.0, 0.0],
            vec![0.0, 0.25, 0.25],
            vec![0.0, 0.25, 0.25],
        ]);
        let d1 = eig_hermitian(&m, 1e-9).unwrap();
        let d2 = eig_hermitian(&m, 1e-9).unwrap();
        assert_eq!(d1.eigenvalues(), d2.eigenvalues());
        assert_eq!(d1.eigenvectors(), d2.eigenvectors());
        // spectrum is (0.5, 0.5, 0) up to rounding
        assert!((d1.eigenvalues()[0] - 0.5).abs() < 1e-12);
        assert!((d1.eigenvalues()[1] - 0.5).abs() < 1e-12);
        assert!(d1.eigenvalues()[2].abs() < 1e-12);
    }
}
