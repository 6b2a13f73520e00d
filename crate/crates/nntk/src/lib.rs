//! Regularized Newton training of scaled single-hidden-layer networks and
//! the Newton neural tangent kernel (NNTK) they induce, at finite and
//! infinite width.
//!
//! The crate is `no_std` (with `alloc`) and routes every transcendental
//! float operation through [`libm`], so all results are bit-reproducible
//! for a given seed, independent of the platform's math library.
//!
//! Modules:
//! - [`linalg`]: dense symmetric eigendecomposition, solves, operator norms
//! - [`model`]: the scaled shallow network, initialization, feature rows and
//!   curvature blocks
//! - [`objective`]: squared loss, gradient, and the block-diagonal-plus-low-rank
//!   Hessian structure
//! - [`newton`]: the regularized Newton step (Woodbury fast path and dense
//!   oracle), positive-definiteness guard, and training loop
//! - [`kernels`]: finite-width NNTK, empirical NTK, Monte Carlo limit NTK,
//!   limit NNTK, and kernel comparison
//! - [`limit`]: deterministic infinite-width dynamics and convergence rates

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod kernels;
pub mod limit;
pub mod linalg;
pub mod model;
pub mod newton;
pub mod objective;

pub use error::{Error, Result};
pub use kernels::{
    kernel_distance, nntk_finite, nntk_limit, ntk_empirical, ntk_limit_mc, KernelKind,
    KernelMatrix, KernelProvenance, LimitNtkEstimate,
};
pub use limit::{convergence_report, limit_trajectory, ConvergenceReport, LimitTrajectory};
pub use linalg::{op_norm_sym, solve_sym, sym_eig, Mat, SymEigen, SymMatrix};
pub use model::{
    feature_row, forward, hess_block, sample_init, Activation, InitDistribution, NetworkParams,
};
pub use newton::{
    default_pd_epsilon, newton_step_direct, newton_step_woodbury, pd_guard, train,
    NewtonOptions, NewtonStepResult, TrainTrajectory,
};
pub use objective::{
    gradient, hessian_full, hessian_parts, residual_and_loss, CurvatureMode, Dataset,
    HessianParts,
};
