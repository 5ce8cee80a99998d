//! Seeded random generators for states and isometries.
//!
//! Everything routes through `ChaCha8Rng` so that results are reproducible
//! across platforms for a fixed seed.

use crate::qmat::ComplexMatrix;
use crate::states::{DensityMatrix, PureState};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent deterministic stream `index` of the seed.
pub fn rng_for_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian (unit variance per real component).
pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller; avoids a rand_distr dependency.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let mag = (-2.0 * u1.ln()).sqrt();
    let ang = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(mag * ang.cos(), mag * ang.sin())
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-like random pure state: normalized complex Gaussian vector.
pub fn random_pure(dim: usize, rng: &mut ChaCha8Rng) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if amps.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-12 {
            return PureState::normalized(amps);
        }
    }
}

/// Full-rank random density matrix G G† / tr(G G†) with Ginibre G.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let mut m = g.matmul(&g.adjoint()).expect("square");
    let trace = m.trace().re;
    m = m.scaled(Complex64::new(1.0 / trace, 0.0));
    // Symmetrize away rounding before validation.
    let herm = m
        .add(&m.adjoint())
        .expect("same shape")
        .scaled(Complex64::new(0.5, 0.0));
    DensityMatrix::new_default(herm).expect("Ginibre construction is a valid state")
}

/// Random T×r isometry: orthonormalized columns of a Gaussian matrix.
///
/// Retries the (measure-zero) degenerate draws, so it always returns.
pub fn random_isometry(t: usize, r: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    assert!(t >= r, "isometry needs at least as many rows as columns");
    loop {
        let g = gaussian_matrix(t, r, rng);
        if let Some(iso) = orthonormalize_columns(&g) {
            return iso;
        }
    }
}

/// Modified Gram-Schmidt; `None` if a column collapses numerically.
fn orthonormalize_columns(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let t = m.rows();
    let r = m.cols();
    let mut cols: Vec<Vec<Complex64>> = (0..r).map(|j| m.column(j)).collect();
    for j in 0..r {
        for k in 0..j {
            let proj: Complex64 = cols[k]
                .iter()
                .zip(cols[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let corrections: Vec<Complex64> = cols[k].iter().map(|z| proj * z).collect();
            for (slot, c) in cols[j].iter_mut().zip(corrections) {
                *slot -= c;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-10 {
            return None;
        }
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    let mut out = ComplexMatrix::zeros(t, r);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            out[(i, j)] = *z;
        }
    }
    Some(out)
}
