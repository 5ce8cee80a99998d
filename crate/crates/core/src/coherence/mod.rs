//! Coherence measures in a fixed reference basis: relative-entropy
//! coherence, l1 coherence, the closed-form regularized coherence of
//! assistance S(Δ(ρ)), ensemble average coherence, and a stochastic
//! maximizer that lower-bounds the coherence of assistance.

mod optimizer;

pub use optimizer::{maximize_assistance, OptimizerConfig};

use crate::states::{entropy, DensityMatrix, PureEnsemble};
use thiserror::Error;

/// Coherence below this magnitude is treated as rounding and clamped to
/// zero; anything more negative indicates an internal inconsistency.
const NEGATIVE_CLAMP: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CoherenceError {
    #[error("optimizer config invalid: {reason}")]
    ConfigInvalid { reason: String },

    #[error("internal inconsistency: {what} = {value:e} is negative beyond rounding")]
    NegativeMeasure { what: &'static str, value: f64 },
}

/// Bundle of the directly computable measures of a state.
#[derive(Debug, Clone)]
pub struct CoherenceReport {
    pub c_r: f64,
    pub c_l1: f64,
    pub c_a_infinity: f64,
    /// Best certified lower bound on the coherence of assistance, when the
    /// optimizer ran.
    pub c_a_lower_bound: Option<f64>,
    pub witness: Option<PureEnsemble>,
    pub log_base: f64,
}

impl CoherenceReport {
    /// C_r, l1, and S(Δ(ρ)) without running the optimizer.
    pub fn measures_only(rho: &DensityMatrix, log_base: f64) -> Result<Self, CoherenceError> {
        Ok(Self {
            c_r: relative_entropy_coherence(rho, log_base)?,
            c_l1: l1_coherence(rho),
            c_a_infinity: regularized_assistance(rho, log_base),
            c_a_lower_bound: None,
            witness: None,
            log_base,
        })
    }

    /// Full report including the optimizer's certified lower bound on the
    /// coherence of assistance and its witness decomposition.
    pub fn with_optimizer(
        rho: &DensityMatrix,
        cfg: &OptimizerConfig,
        log_base: f64,
    ) -> Result<Self, CoherenceError> {
        let mut report = Self::measures_only(rho, log_base)?;
        let (value, witness) = maximize_assistance(rho, cfg, log_base)?;
        report.c_a_lower_bound = Some(value);
        report.witness = Some(witness);
        Ok(report)
    }
}

/// C_r(ρ) = S(Δ(ρ)) − S(ρ).
pub fn relative_entropy_coherence(
    rho: &DensityMatrix,
    log_base: f64,
) -> Result<f64, CoherenceError> {
    let diag_entropy = entropy(rho.dephase().probs(), log_base);
    let spectrum: Vec<f64> = rho.spectrum().iter().map(|&l| l.max(0.0)).collect();
    let state_entropy = entropy(&spectrum, log_base);
    clamp_coherence(diag_entropy - state_entropy, "relative entropy coherence")
}

/// Σ_{i≠j} |ρ_ij|.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += rho.entry(i, j).norm();
            }
        }
    }
    sum
}

/// Closed form for the regularized coherence of assistance: S(Δ(ρ)).
pub fn regularized_assistance(rho: &DensityMatrix, log_base: f64) -> f64 {
    entropy(rho.dephase().probs(), log_base)
}

/// Σ_k p_k S(Δ(ψ_k)); member entropies vanish since the members are pure.
pub fn ensemble_average_coherence(ens: &PureEnsemble, log_base: f64) -> f64 {
    ens.members()
        .iter()
        .map(|(w, s)| w * s.coherence(log_base))
        .sum()
}

fn clamp_coherence(value: f64, what: &'static str) -> Result<f64, CoherenceError> {
    if value < -NEGATIVE_CLAMP {
        return Err(CoherenceError::NegativeMeasure { what, value });
    }
    Ok(value.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::ComplexMatrix;
    use crate::states::{DensityMatrix, PureEnsemble, PureState};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn maximally_mixed(n: usize) -> DensityMatrix {
        DensityMatrix::new_default(ComplexMatrix::identity(n).scaled(c(1.0 / n as f64, 0.0)))
            .unwrap()
    }

    fn plus_projector() -> DensityMatrix {
        DensityMatrix::new_default(ComplexMatrix::from_real_rows(&[
            vec![0.5, 0.5],
            vec![0.5, 0.5],
        ]))
        .unwrap()
    }

    #[test]
    fn relative_entropy_coherence_cases() {
        assert_eq!(
            relative_entropy_coherence(&maximally_mixed(2), 2.0).unwrap(),
            0.0
        );
        let cr = relative_entropy_coherence(&plus_projector(), 2.0).unwrap();
        assert!((cr - 1.0).abs() < 1e-9);
        let diag = DensityMatrix::new_default(ComplexMatrix::from_real_rows(&[
            vec![0.2, 0.0],
            vec![0.0, 0.8],
        ]))
        .unwrap();
        assert_eq!(relative_entropy_coherence(&diag, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn l1_coherence_cases() {
        assert_eq!(l1_coherence(&maximally_mixed(3)), 0.0);
        assert!((l1_coherence(&plus_projector()) - 1.0).abs() < 1e-12);
        let rho = DensityMatrix::new_default(ComplexMatrix::from_real_rows(&[
            vec![0.5, 0.25],
            vec![0.25, 0.5],
        ]))
        .unwrap();
        assert!((l1_coherence(&rho) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn regularized_assistance_cases() {
        assert!((regularized_assistance(&maximally_mixed(2), 2.0) - 1.0).abs() < 1e-12);
        let third = 1.0 / 3.0;
        let uniform3 = DensityMatrix::new_default(ComplexMatrix::from_real_rows(&[
            vec![third, 0.0, 0.0],
            vec![0.0, third, 0.0],
            vec![0.0, 0.0, third],
        ]))
        .unwrap();
        assert!((regularized_assistance(&uniform3, 2.0) - 3f64.log2()).abs() < 1e-12);
        let pure0 = DensityMatrix::new_default(ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 0.0],
        ]))
        .unwrap();
        assert_eq!(regularized_assistance(&pure0, 2.0), 0.0);
    }

    #[test]
    fn full_report_obeys_the_measure_chain() {
        let rho = crate::random::random_density(2, &mut crate::random::rng_from_seed(3));
        let cfg = OptimizerConfig::default_for(&rho).with_seed(6);
        let report = CoherenceReport::with_optimizer(&rho, &cfg, 2.0).unwrap();
        let bound = report.c_a_lower_bound.unwrap();
        assert!(report.c_r <= bound + 1e-9);
        assert!(bound <= report.c_a_infinity + 1e-9);
        assert!(report.witness.is_some());
    }

    #[test]
    fn average_coherence_cases() {
        let trivial =
            PureEnsemble::new(vec![(1.0, PureState::basis_state(2, 0))], 1e-9).unwrap();
        assert_eq!(ensemble_average_coherence(&trivial, 2.0), 0.0);

        let plus = PureState::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let minus = PureState::normalized(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let ens = PureEnsemble::new(vec![(0.5, plus), (0.5, minus)], 1e-9).unwrap();
        assert!((ensemble_average_coherence(&ens, 2.0) - 1.0).abs() < 1e-12);
    }
}
