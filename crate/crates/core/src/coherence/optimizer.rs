//! Stochastic maximizer for the average coherence over pure-state
//! decompositions of a fixed state.
//!
//! Decompositions of size T are parameterized by T×r isometries applied to
//! the eigen-ensemble. Each restart draws a Haar-like isometry and then
//! refines it by coordinate sweeps over two-row Givens rotations (mixing
//! angle plus relative phase), accepting improvements. The result is a
//! certified lower bound: the witness ensemble always reconstructs the
//! input state.

use super::{ensemble_average_coherence, regularized_assistance, CoherenceError};
use crate::random::{random_isometry, rng_for_stream};
use crate::states::{DensityMatrix, PureEnsemble, PureState};
use crate::WEIGHT_DROP_TOL;
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Ensemble size T; must be at least rank(ρ).
    pub ensemble_size: usize,
    pub restarts: usize,
    /// Refinement sweeps per restart; each sweep re-searches every row pair.
    pub max_iters: usize,
    pub seed: u64,
    /// Stop refining when a full sweep improves the objective by less than
    /// this (in units of the reported log base), and stop restarting once
    /// the gap to the S(Δ(ρ)) ceiling is below it.
    pub convergence_tol: f64,
}

impl OptimizerConfig {
    /// T = n·rank capped at n²; moderate restart budget.
    pub fn default_for(rho: &DensityMatrix) -> Self {
        let n = rho.dim();
        let t = (n * rho.rank()).min(n * n).max(rho.rank());
        Self {
            ensemble_size: t,
            restarts: 8,
            max_iters: 60,
            seed: 0,
            convergence_tol: 1e-9,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self, rho: &DensityMatrix) -> Result<(), CoherenceError> {
        let rank = rho.rank();
        if self.ensemble_size < rank {
            return Err(CoherenceError::ConfigInvalid {
                reason: format!(
                    "ensemble size {} is below rank {}",
                    self.ensemble_size, rank
                ),
            });
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(CoherenceError::ConfigInvalid {
                reason: "restarts and max_iters must be positive".into(),
            });
        }
        if self.convergence_tol <= 0.0 || self.convergence_tol.is_nan() {
            return Err(CoherenceError::ConfigInvalid {
                reason: "convergence_tol must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Best average coherence found over the configured restarts, with the
/// witness decomposition achieving it. Deterministic for a fixed seed;
/// the best-so-far value is nondecreasing in the restart budget.
pub fn maximize_assistance(
    rho: &DensityMatrix,
    cfg: &OptimizerConfig,
    log_base: f64,
) -> Result<(f64, PureEnsemble), CoherenceError> {
    cfg.validate(rho)?;

    let ceiling_nats = regularized_assistance(rho, std::f64::consts::E);
    let tol_nats = cfg.convergence_tol * log_base.ln();

    // Unnormalized eigen-member vectors w_i = √λ_i e_i.
    let rank = rho.rank();
    let n = rho.dim();
    let mut eigen_members: Vec<Vec<Complex64>> = Vec::with_capacity(rank);
    for i in 0..rank {
        let lambda = rho.spectrum()[i].max(0.0);
        let coeff = lambda.sqrt();
        let v = rho.spectral().eigenvector(i);
        eigen_members.push(v.into_iter().map(|z| coeff * z).collect());
    }

    let mut best: Option<(f64, Vec<Vec<Complex64>>)> = None;
    for restart in 0..cfg.restarts {
        let mut rng = rng_for_stream(cfg.seed, restart as u64 + 1);
        let iso = random_isometry(cfg.ensemble_size, rank, &mut rng);

        // Member vectors m_k = Σ_i U_ki w_i; rotations act on them directly.
        let mut members: Vec<Vec<Complex64>> = (0..cfg.ensemble_size)
            .map(|k| {
                let mut m = vec![Complex64::new(0.0, 0.0); n];
                for i in 0..rank {
                    let u = iso[(k, i)];
                    for (slot, w) in m.iter_mut().zip(&eigen_members[i]) {
                        *slot += u * w;
                    }
                }
                m
            })
            .collect();

        let mut value = members.iter().map(|m| contribution_nats(m)).sum::<f64>();
        for _ in 0..cfg.max_iters {
            let before = value;
            value = sweep(&mut members, value);
            if value - before < tol_nats || ceiling_nats - value <= tol_nats {
                break;
            }
        }

        if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
            best = Some((value, members));
        }
        if ceiling_nats - best.as_ref().expect("set above").0 <= tol_nats {
            break;
        }
    }

    let (_, members) = best.expect("at least one restart");
    let weighted: Vec<(f64, PureState)> = members
        .into_iter()
        .filter_map(|m| {
            let p: f64 = m.iter().map(|z| z.norm_sqr()).sum();
            (p > WEIGHT_DROP_TOL).then(|| (p, PureState::normalized(m)))
        })
        .collect();
    let witness = PureEnsemble::from_weighted(weighted).map_err(|e| {
        CoherenceError::ConfigInvalid {
            reason: format!("degenerate witness ensemble: {e}"),
        }
    })?;
    let value = ensemble_average_coherence(&witness, log_base);
    Ok((value, witness))
}

/// One coordinate sweep: for every row pair, grid-search a Givens rotation
/// and refine the winner by golden-section on angle then phase. Returns the
/// updated objective (nats).
fn sweep(members: &mut [Vec<Complex64>], mut value: f64) -> f64 {
    let t = members.len();
    for a in 0..t.saturating_sub(1) {
        for b in a + 1..t {
            let base = contribution_nats(&members[a]) + contribution_nats(&members[b]);

            let pair_objective = |theta: f64, phi: f64| -> f64 {
                let (ma, mb) = rotated_pair(&members[a], &members[b], theta, phi);
                contribution_nats(&ma) + contribution_nats(&mb)
            };

            // Coarse grid over the rotation torus.
            let mut best_theta = 0.0;
            let mut best_phi = 0.0;
            let mut best_val = base;
            for pi in 0..4 {
                let phi = std::f64::consts::FRAC_PI_2 * pi as f64;
                for ti in -4..=4i32 {
                    if ti == 0 {
                        continue;
                    }
                    let theta = std::f64::consts::FRAC_PI_8 * ti as f64;
                    let v = pair_objective(theta, phi);
                    if v > best_val {
                        best_val = v;
                        best_theta = theta;
                        best_phi = phi;
                    }
                }
            }

            // Local refinement around the grid winner.
            let (theta, v) = golden_max(
                |th| pair_objective(th, best_phi),
                best_theta - std::f64::consts::FRAC_PI_8,
                best_theta + std::f64::consts::FRAC_PI_8,
            );
            if v > best_val {
                best_val = v;
                best_theta = theta;
            }
            let (phi, v) = golden_max(
                |ph| pair_objective(best_theta, ph),
                best_phi - std::f64::consts::FRAC_PI_2,
                best_phi + std::f64::consts::FRAC_PI_2,
            );
            if v > best_val {
                best_val = v;
                best_phi = phi;
            }

            if best_val > base {
                let (ma, mb) = rotated_pair(&members[a], &members[b], best_theta, best_phi);
                members[a] = ma;
                members[b] = mb;
                value += best_val - base;
            }
        }
    }
    value
}

fn rotated_pair(
    ma: &[Complex64],
    mb: &[Complex64],
    theta: f64,
    phi: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let (s, c) = theta.sin_cos();
    let e = Complex64::new(phi.cos(), phi.sin());
    let new_a: Vec<Complex64> = ma
        .iter()
        .zip(mb)
        .map(|(x, y)| c * x + s * e * y)
        .collect();
    let new_b: Vec<Complex64> = ma
        .iter()
        .zip(mb)
        .map(|(x, y)| -s * e.conj() * x + c * y)
        .collect();
    (new_a, new_b)
}

/// Weighted diagonal entropy of one unnormalized member:
/// p·S(Δ(ψ)) = −Σ_j |m_j|² ln(|m_j|²/p), p = ‖m‖².
fn contribution_nats(m: &[Complex64]) -> f64 {
    let p: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    if p <= WEIGHT_DROP_TOL * WEIGHT_DROP_TOL {
        return 0.0;
    }
    let mut acc = 0.0;
    for z in m {
        let q = z.norm_sqr();
        if q > 0.0 {
            acc -= q * q.ln();
        }
    }
    acc + p * p.ln()
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..30 {
        if f1 < f2 {
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
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
