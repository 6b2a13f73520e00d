//! The regularized Newton step and training loop.
//!
//! The production path exploits the block-diagonal-plus-low-rank structure
//! of the regularized Hessian: per-neuron `(d+2)`-dimensional block solves
//! plus one `M x M` solve, instead of an `N(d+2)`-dimensional system. A
//! dense direct solver is kept as a small-instance oracle so the two routes
//! can be compared.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{norm2, solve_sym, sym_eig, LuFactors, Mat, SymMatrix};
use crate::model::{Activation, NetworkParams};
use crate::objective::{
    gradient, hessian_full, hessian_parts, residual_and_loss, CurvatureMode, Dataset, HessianParts,
};

/// One Newton step: per-neuron update blocks, the dual `zeta` vector, the
/// `M x M` kernel system matrix, and the definiteness diagnostic.
#[derive(Clone, Debug)]
pub struct NewtonStepResult {
    /// Per-neuron update blocks `(z)^i` of length `d+2`.
    pub z_blocks: Vec<Vec<f64>>,
    /// Solution of `(I + A) zeta = r`.
    pub zeta: Vec<f64>,
    /// `A = (1/(MN)) sum_i s_i d_i^{-1} s_i^T`, symmetric PSD under the guard.
    pub kernel_a: SymMatrix,
    /// Smallest eigenvalue over all `d` blocks.
    pub min_block_eig: f64,
}

impl NewtonStepResult {
    /// Update in the flat neuron-major parameter layout.
    pub fn z_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for b in &self.z_blocks {
            out.extend_from_slice(b);
        }
        out
    }

    /// `max_i ||(z)^i||_2`.
    pub fn max_block_update(&self) -> f64 {
        self.z_blocks
            .iter()
            .fold(0.0, |acc, b| f64::max(acc, norm2(b)))
    }
}

/// Per-step records over a training run: `K+1` output/loss records and `K`
/// update records.
#[derive(Clone, Debug)]
pub struct TrainTrajectory {
    /// Network outputs on the training inputs, steps `0..=K`.
    pub outputs: Vec<Vec<f64>>,
    /// Loss per step, `0..=K`.
    pub losses: Vec<f64>,
    /// `max_i ||(z_k)^i||_2` for the step taken at `k = 0..K`.
    pub max_block_updates: Vec<f64>,
    /// Smallest block eigenvalue seen at each step `k = 0..K`.
    pub min_block_eigs: Vec<f64>,
}

/// Knobs that deviate from the defaults: Gauss-Newton curvature and a
/// custom definiteness tolerance.
#[derive(Clone, Copy, Debug, Default)]
pub struct NewtonOptions {
    pub curvature: CurvatureMode,
    /// Guard threshold; `None` means [`default_pd_epsilon`] of gamma.
    pub pd_epsilon: Option<f64>,
}

/// Default guard tolerance, relative to the block shift.
pub fn default_pd_epsilon(gamma: f64) -> f64 {
    1e-12 * gamma
}

/// Smallest eigenvalue over all per-neuron curvature blocks; fails when it
/// does not exceed `epsilon`, carrying the offending neuron.
pub fn pd_guard(parts: &HessianParts, epsilon: f64) -> Result<f64> {
    let mut min_eig = f64::INFINITY;
    let mut min_neuron = 0;
    for (i, block) in parts.d_blocks().iter().enumerate() {
        let smallest = sym_eig(block).values[0];
        if smallest < min_eig {
            min_eig = smallest;
            min_neuron = i;
        }
    }
    if min_eig <= epsilon {
        Err(Error::NotPositiveDefinite {
            neuron: min_neuron,
            eigenvalue: min_eig,
        })
    } else {
        Ok(min_eig)
    }
}

/// Assemble `A = (1/(MN)) sum_i s_i d_i^{-1} s_i^T` along with the
/// per-neuron solves `X_i = d_i^{-1} s_i^T` that both the kernel and the
/// update need. Accumulation is in fixed neuron order.
pub(crate) fn kernel_system(parts: &HessianParts) -> Result<(SymMatrix, Vec<Mat>)> {
    let m = parts.m();
    let n = parts.n();
    let mut acc = vec![0.0; m * m];
    let mut x_blocks = Vec::with_capacity(n);
    for i in 0..n {
        let lu = LuFactors::new(&parts.d_block(i).to_mat())?;
        let x_i = lu.solve_mat(&parts.s_block(i).transpose());
        let s_i = parts.s_block(i);
        for r in 0..m {
            for c in 0..m {
                let mut v = 0.0;
                for k in 0..x_i.rows() {
                    v += s_i.get(r, k) * x_i.get(k, c);
                }
                acc[r * m + c] += v;
            }
        }
        x_blocks.push(x_i);
    }
    let scale = 1.0 / (m as f64 * n as f64);
    acc.iter_mut().for_each(|v| *v *= scale);
    Ok((SymMatrix::new(m, acc)?, x_blocks))
}

/// One regularized Newton step via the Woodbury route, returning the step
/// diagnostics and the updated parameters `theta + alpha z`.
pub fn newton_step_woodbury(
    params: &NetworkParams,
    act: Activation,
    data: &Dataset,
    gamma: f64,
    alpha: f64,
) -> Result<(NewtonStepResult, NetworkParams)> {
    newton_step_woodbury_opts(params, act, data, gamma, alpha, NewtonOptions::default())
}

pub fn newton_step_woodbury_opts(
    params: &NetworkParams,
    act: Activation,
    data: &Dataset,
    gamma: f64,
    alpha: f64,
    opts: NewtonOptions,
) -> Result<(NewtonStepResult, NetworkParams)> {
    if !(alpha.is_finite()) {
        return Err(Error::input("alpha must be finite"));
    }
    let parts = hessian_parts(params, act, data, gamma, opts.curvature)?;
    let epsilon = opts.pd_epsilon.unwrap_or_else(|| default_pd_epsilon(gamma));
    let min_block_eig = pd_guard(&parts, epsilon)?;
    let (kernel_a, x_blocks) = kernel_system(&parts)?;
    let mut shifted = kernel_a.clone();
    shifted.add_diagonal(1.0);
    let zeta = solve_sym(&shifted, parts.residual())?;
    // (z)^i = (1/M) D_i^{-1} J_i^T zeta = (N^{beta-1}/M) d_i^{-1} s_i^T zeta.
    let z_scale = libm::pow(params.n() as f64, params.beta() - 1.0) / data.m() as f64;
    let z_blocks: Vec<Vec<f64>> = x_blocks
        .iter()
        .map(|x_i| x_i.matvec(&zeta).iter().map(|v| v * z_scale).collect())
        .collect();
    let result = NewtonStepResult {
        z_blocks,
        zeta,
        kernel_a,
        min_block_eig,
    };
    let updated = params.with_update(&result.z_flat(), alpha)?;
    Ok((result, updated))
}

/// Dense direct solve of the regularized Newton system; oracle only,
/// guarded at the dense size limit.
pub fn newton_step_direct(
    params: &NetworkParams,
    act: Activation,
    data: &Dataset,
    gamma: f64,
) -> Result<Vec<f64>> {
    newton_step_direct_opts(params, act, data, gamma, NewtonOptions::default())
}

pub fn newton_step_direct_opts(
    params: &NetworkParams,
    act: Activation,
    data: &Dataset,
    gamma: f64,
    opts: NewtonOptions,
) -> Result<Vec<f64>> {
    let hess = hessian_full(params, act, data, gamma, opts.curvature)?;
    let g = gradient(params, act, data)?;
    let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
    solve_sym(&hess, &rhs)
}

/// Run `steps` regularized Newton steps from `params0`, recording the
/// trajectory. Aborts with step diagnostics if the guard fails anywhere.
pub fn train(
    params0: &NetworkParams,
    act: Activation,
    data: &Dataset,
    gamma: f64,
    alpha: f64,
    steps: usize,
) -> Result<TrainTrajectory> {
    train_opts(params0, act, data, gamma, alpha, steps, NewtonOptions::default())
}

pub fn train_opts(
    params0: &NetworkParams,
    act: Activation,
    data: &Dataset,
    gamma: f64,
    alpha: f64,
    steps: usize,
    opts: NewtonOptions,
) -> Result<TrainTrajectory> {
    if steps == 0 {
        return Err(Error::input("step count must be at least 1"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::input("alpha must be positive and finite"));
    }
    let mut params = params0.clone();
    let mut outputs = Vec::with_capacity(steps + 1);
    let mut losses = Vec::with_capacity(steps + 1);
    let mut max_block_updates = Vec::with_capacity(steps);
    let mut min_block_eigs = Vec::with_capacity(steps);
    for k in 0..steps {
        let (r, loss) = residual_and_loss(&params, act, data)?;
        outputs.push(data.ys().iter().zip(&r).map(|(y, rm)| y - rm).collect());
        losses.push(loss);
        let (step, updated) = newton_step_woodbury_opts(&params, act, data, gamma, alpha, opts)
            .map_err(|e| match e {
                Error::NotPositiveDefinite { neuron, eigenvalue } => Error::GuardFailedAtStep {
                    step: k,
                    neuron,
                    eigenvalue,
                },
                other => other,
            })?;
        max_block_updates.push(step.max_block_update());
        min_block_eigs.push(step.min_block_eig);
        params = updated;
    }
    let (r, loss) = residual_and_loss(&params, act, data)?;
    outputs.push(data.ys().iter().zip(&r).map(|(y, rm)| y - rm).collect());
    losses.push(loss);
    Ok(TrainTrajectory {
        outputs,
        losses,
        max_block_updates,
        min_block_eigs,
    })
}
