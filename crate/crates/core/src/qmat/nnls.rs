//! Nonnegative least squares by the Lawson-Hanson active-set method.
//!
//! Minimizes ‖A x − b‖₂ subject to x ≥ 0. The passive-set subproblems are
//! solved with Householder QR assembled fresh each iteration; problem sizes
//! here are tens of rows and columns, so simplicity wins over the classic
//! in-place update scheme.

use super::{QmatError, RealMatrix};

/// Guard against admitting a column that is (numerically) linearly dependent
/// on the current passive set.
const RANK_GUARD: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    /// ‖A x − b‖₂ at the solution.
    pub residual: f64,
    /// Largest Karush-Kuhn-Tucker violation: positive dual on a zero
    /// coordinate or nonzero gradient on a positive coordinate.
    pub kkt_residual: f64,
}

/// Solves min ‖A x − b‖₂ s.t. x ≥ 0.
///
/// `tol` is the dual-feasibility threshold (scaled by the problem's
/// magnitude). Underdetermined and overdetermined systems are both accepted.
pub fn nnls_solve(a: &RealMatrix, b: &[f64], tol: f64) -> Result<NnlsSolution, QmatError> {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m, "right-hand side length must match row count");
    assert!(b.iter().all(|v| v.is_finite()), "rhs must be finite");

    let scale = column_norm_max(a).max(norm2(b)).max(1.0);
    let dual_tol = tol * scale;

    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let mut blocked = vec![false; n]; // columns rejected as linearly dependent
    let max_outer = 10 * (n + 2);
    let mut outer = 0;

    loop {
        outer += 1;
        if outer > max_outer {
            return Err(QmatError::NoConvergence { iterations: outer });
        }

        // Dual vector w = Aᵀ(b − A x).
        let r = residual_vec(a, &x, b);
        let w = a.apply_transpose(&r);

        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if !passive[j]
                && !blocked[j]
                && w[j] > dual_tol
                && best.is_none_or(|(_, bw)| w[j] > bw)
            {
                best = Some((j, w[j]));
            }
        }
        let Some((enter, _)) = best else {
            break;
        };

        passive[enter] = true;
        if !subproblem_full_rank(a, &passive) {
            // Near-dependent column; exclude it from further consideration.
            passive[enter] = false;
            blocked[enter] = true;
            continue;
        }

        // Inner loop: restore primal feasibility on the passive set.
        let max_inner = 3 * (n + 1);
        let mut inner = 0;
        loop {
            inner += 1;
            if inner > max_inner {
                return Err(QmatError::NoConvergence {
                    iterations: outer + inner,
                });
            }
            let z = solve_passive(a, &passive, b);
            let passive_idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();

            if passive_idx.iter().zip(&z).all(|(_, &zj)| zj > 0.0) {
                for (&j, &zj) in passive_idx.iter().zip(&z) {
                    x[j] = zj;
                }
                break;
            }

            // Step toward z as far as feasibility allows.
            let mut alpha = f64::INFINITY;
            for (&j, &zj) in passive_idx.iter().zip(&z) {
                if zj <= 0.0 {
                    let denom = x[j] - zj;
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            let alpha = alpha.min(1.0);
            for (&j, &zj) in passive_idx.iter().zip(&z) {
                x[j] += alpha * (zj - x[j]);
            }
            for &j in &passive_idx {
                if x[j] <= RANK_GUARD * scale {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }

    let r = residual_vec(a, &x, b);
    let w = a.apply_transpose(&r);
    let mut kkt = 0.0f64;
    for j in 0..n {
        if x[j] > 0.0 {
            kkt = kkt.max(w[j].abs());
        } else {
            kkt = kkt.max(w[j].max(0.0));
        }
    }
    Ok(NnlsSolution {
        x,
        residual: norm2(&r),
        kkt_residual: kkt,
    })
}

fn residual_vec(a: &RealMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.apply(x);
    b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn column_norm_max(a: &RealMatrix) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.cols() {
        let mut s = 0.0;
        for i in 0..a.rows() {
            s += a[(i, j)] * a[(i, j)];
        }
        best = best.max(s.sqrt());
    }
    best
}

/// Unconstrained least squares restricted to the passive columns, by
/// Householder QR. Returns coefficients in passive-column order.
fn solve_passive(a: &RealMatrix, passive: &[bool], b: &[f64]) -> Vec<f64> {
    let cols: Vec<usize> = (0..a.cols()).filter(|&j| passive[j]).collect();
    let (q_applied_b, r_mat) = householder_qr(a, &cols, b);
    back_substitute(&r_mat, &q_applied_b, cols.len())
}

fn subproblem_full_rank(a: &RealMatrix, passive: &[bool]) -> bool {
    let cols: Vec<usize> = (0..a.cols()).filter(|&j| passive[j]).collect();
    if cols.is_empty() {
        return true;
    }
    if cols.len() > a.rows() {
        return false;
    }
    let zero_b = vec![0.0; a.rows()];
    let (_, r_mat) = householder_qr(a, &cols, &zero_b);
    let scale = column_norm_max(a).max(1.0);
    (0..cols.len()).all(|k| r_mat[k * cols.len() + k].abs() > RANK_GUARD * scale)
}

/// QR on the selected columns; returns (Qᵀb, R) with R stored dense
/// k x k row major.
fn householder_qr(a: &RealMatrix, cols: &[usize], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = a.rows();
    let k = cols.len();
    // Working copy of the submatrix, column major for easy reflector access.
    let mut w: Vec<f64> = Vec::with_capacity(m * k);
    for &j in cols {
        for i in 0..m {
            w.push(a[(i, j)]);
        }
    }
    let mut qb = b.to_vec();

    for step in 0..k.min(m) {
        // Build reflector for column `step` below row `step`.
        let col = &w[step * m..(step + 1) * m];
        let norm_tail: f64 = col[step..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm_tail == 0.0 {
            continue;
        }
        let alpha = if col[step] >= 0.0 { -norm_tail } else { norm_tail };
        let mut v: Vec<f64> = vec![0.0; m];
        v[step] = col[step] - alpha;
        v[(step + 1)..m].copy_from_slice(&col[(step + 1)..m]);
        let vtv: f64 = v[step..].iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }

        // Apply I - 2 v vᵀ / vᵀv to remaining columns and to b.
        for j in step..k {
            let cj = &mut w[j * m..(j + 1) * m];
            let dot: f64 = v[step..].iter().zip(&cj[step..]).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vtv;
            for i in step..m {
                cj[i] -= f * v[i];
            }
        }
        let dot: f64 = v[step..].iter().zip(&qb[step..]).map(|(x, y)| x * y).sum();
        let f = 2.0 * dot / vtv;
        for i in step..m {
            qb[i] -= f * v[i];
        }
    }

    // Extract upper-triangular R (k x k).
    let mut r = vec![0.0; k * k];
    for j in 0..k {
        for i in 0..=j.min(m.saturating_sub(1)) {
            if i < k {
                r[i * k + j] = w[j * m + i];
            }
        }
    }
    (qb, r)
}

fn back_substitute(r: &[f64], qb: &[f64], k: usize) -> Vec<f64> {
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qb[i];
        for j in i + 1..k {
            s -= r[i * k + j] * x[j];
        }
        let d = r[i * k + i];
        x[i] = if d.abs() > 0.0 { s / d } else { 0.0 };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system_reproduces_rhs() {
        let a = RealMatrix::identity(2);
        let sol = nnls_solve(&a, &[0.3, 0.7], 1e-9).unwrap();
        assert!((sol.x[0] - 0.3).abs() < 1e-12);
        assert!((sol.x[1] - 0.7).abs() < 1e-12);
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn negative_component_is_clamped() {
        // One-variable clamp: min (x+1)² + (y-1)² over x,y >= 0 is x=0, y=1.
        let a = RealMatrix::identity(2);
        let sol = nnls_solve(&a, &[-1.0, 1.0], 1e-9).unwrap();
        assert!(sol.x[0].abs() < 1e-12);
        assert!((sol.x[1] - 1.0).abs() < 1e-12);
        assert!((sol.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stacked_column_exact_fit() {
        let a = RealMatrix::from_rows(&[vec![1.0], vec![1.0]]);
        let sol = nnls_solve(&a, &[1.0, 1.0], 1e-9).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn kkt_residual_reported_small() {
        let a = RealMatrix::from_rows(&[
            vec![1.0, -1.0, 0.5],
            vec![0.5, 1.0, -0.25],
            vec![0.0, 0.75, 1.0],
            vec![1.0, 1.0, 1.0],
        ]);
        let sol = nnls_solve(&a, &[0.2, 0.4, 0.9, 1.0], 1e-9).unwrap();
        assert!(sol.kkt_residual <= 1e-9 * 2.0);
        assert!(sol.x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn duplicate_columns_do_not_cycle() {
        let a = RealMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let sol = nnls_solve(&a, &[2.0, 2.0], 1e-9).unwrap();
        assert!(sol.residual < 1e-12);
        assert!(sol.x.iter().all(|&v| v >= 0.0));
        assert!((sol.x.iter().sum::<f64>() - 2.0).abs() < 1e-10);
    }
}
