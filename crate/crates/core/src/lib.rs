//! Numerical toolkit for coherence of quantum states in a fixed reference
//! basis: relative-entropy and l1 coherence, the closed-form regularized
//! coherence of assistance S(Δ(ρ)), saturation certificates with explicit
//! optimal pure-state decompositions, and a simulator for the one-way
//! assisted distillation protocol.
//!
//! Layout:
//! - [`qmat`]: complex-matrix kernel (Hermitian eigendecomposition,
//!   nonnegative least squares, norms). No external numeric dependencies.
//! - [`states`]: density matrices, diagonal states, pure-state ensembles,
//!   purifications, entropy.
//! - [`coherence`]: coherence measures and a stochastic maximizer that
//!   lower-bounds the coherence of assistance.
//! - [`saturation`]: decides when the maximal average coherence reaches
//!   S(Δ(ρ)) and constructs witness ensembles.
//! - [`protocol`]: one-way assisted distillation transcript (enumerate or
//!   sampled measurement outcomes).
//! - [`random`]: seeded generators for states and isometries.

pub mod coherence;
pub mod protocol;
pub mod qmat;
pub mod random;
pub mod saturation;
pub mod states;

/// Default numerical tolerance used wherever a `tol` parameter has a default.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Ensemble members with weight at or below this are dropped (and the rest
/// renormalized). Kept well below `DEFAULT_TOL` so that dropping members
/// perturbs reconstruction residuals far less than the tolerances checked
/// against them.
pub const WEIGHT_DROP_TOL: f64 = 1e-12;
