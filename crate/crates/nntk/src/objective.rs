//! Squared loss over a dataset, its gradient, and the structured Hessian:
//! the low-rank Gauss-Newton part is kept implicit through per-neuron
//! feature blocks, the residual-weighted curvature lives in per-neuron
//! `(d+2) x (d+2)` blocks, and a dense full-Hessian oracle exists for small
//! instances only.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Mat, SymMatrix};
use crate::model::{forward, Activation, NetworkParams};

/// Size guard for the dense Hessian and the dense Newton oracle.
pub const DENSE_ORACLE_LIMIT: usize = 512;

/// Training data: `M` inputs of dimension `d` with scalar labels.
/// Inputs must be finite, nonzero, and pairwise distinct (exact equality).
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    m: usize,
    d: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Dataset {
    pub fn new(d: usize, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::input("input dimension must be at least 1"));
        }
        let m = ys.len();
        if m == 0 {
            return Err(Error::input("dataset must contain at least one sample"));
        }
        if xs.len() != m * d {
            return Err(Error::input("inputs do not match the declared (M, d)"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::input("dataset entries must be finite"));
        }
        for i in 0..m {
            if xs[i * d..(i + 1) * d].iter().all(|v| *v == 0.0) {
                return Err(Error::input("data samples must be nonzero"));
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if xs[i * d..(i + 1) * d] == xs[j * d..(j + 1) * d] {
                    return Err(Error::input("data samples must be pairwise distinct"));
                }
            }
        }
        Ok(Dataset { m, d, xs, ys })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn x(&self, m: usize) -> &[f64] {
        &self.xs[m * self.d..(m + 1) * self.d]
    }

    pub fn y(&self, m: usize) -> f64 {
        self.ys[m]
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }
}

/// Which curvature enters the regularized blocks: the full residual-weighted
/// second-order term, or none of it (the Gauss-Newton special case).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CurvatureMode {
    #[default]
    Full,
    GaussNewton,
}

/// The structured Hessian of the regularized problem at one parameter point:
/// per-neuron feature blocks `s_i` (M x (d+2), the Jacobian is `N^{-beta} s`),
/// per-neuron regularized curvature blocks
/// `d_i = gamma I - N^{beta-1} (1/M) sum_m r_m h_i(x^m)`,
/// and the effective shift `gamma^N = gamma / N^{2 beta - 1}`.
///
/// The dense Gauss-Newton matrix is never materialized here; everything
/// downstream works from `s` blocks and `d` blocks.
#[derive(Clone, Debug)]
pub struct HessianParts {
    n: usize,
    m: usize,
    d: usize,
    beta: f64,
    gamma: f64,
    gamma_n: f64,
    mode: CurvatureMode,
    s_blocks: Vec<Mat>,
    d_blocks: Vec<SymMatrix>,
    residual: Vec<f64>,
    loss: f64,
}

impl HessianParts {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Effective regularizer `gamma / N^{2 beta - 1}` on the full system.
    pub fn gamma_n(&self) -> f64 {
        self.gamma_n
    }

    pub fn mode(&self) -> CurvatureMode {
        self.mode
    }

    /// Feature block of neuron `i`: rows are `s_i(x^m)`.
    pub fn s_block(&self, i: usize) -> &Mat {
        &self.s_blocks[i]
    }

    pub fn d_block(&self, i: usize) -> &SymMatrix {
        &self.d_blocks[i]
    }

    pub fn d_blocks(&self) -> &[SymMatrix] {
        &self.d_blocks
    }

    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub fn loss(&self) -> f64 {
        self.loss
    }
}

/// Residual `r_m = y_m - f(x_m)` and loss `|r|^2 / (2M)`.
pub fn residual_and_loss(
    params: &NetworkParams,
    act: Activation,
    data: &Dataset,
) -> Result<(Vec<f64>, f64)> {
    check_dims(params, data)?;
    let mut r = Vec::with_capacity(data.m());
    for m in 0..data.m() {
        r.push(data.y(m) - forward(params, act, data.x(m))?);
    }
    let loss = r.iter().map(|v| v * v).sum::<f64>() / (2.0 * data.m() as f64);
    Ok((r, loss))
}

/// Loss gradient in the flat neuron-major layout; blockwise it is
/// `-(1/M) N^{-beta} s_i^T r`.
pub fn gradient(params: &NetworkParams, act: Activation, data: &Dataset) -> Result<Vec<f64>> {
    check_dims(params, data)?;
    let (r, _) = residual_and_loss(params, act, data)?;
    let stride = params.d() + 2;
    let scale = -params.width_scale() / data.m() as f64;
    let mut g = vec![0.0; params.num_params()];
    for i in 0..params.n() {
        let block = &mut g[i * stride..(i + 1) * stride];
        for m in 0..data.m() {
            let x = data.x(m);
            let z = params.pre_activation(i, x);
            let s0 = act.apply(z);
            let cs1 = params.c(i) * act.deriv(z);
            let rm = r[m];
            block[0] += s0 * rm;
            for (j, &xj) in x.iter().enumerate() {
                block[1 + j] += cs1 * xj * rm;
            }
            block[stride - 1] += cs1 * rm;
        }
        for v in block.iter_mut() {
            *v *= scale;
        }
    }
    Ok(g)
}

/// Assemble the structured Hessian at the current parameters.
///
/// `gamma = 0` is accepted; the blocks may then be indefinite, and it is the
/// Newton guard's job to refuse them.
pub fn hessian_parts(
    params: &NetworkParams,
    act: Activation,
    data: &Dataset,
    gamma: f64,
    mode: CurvatureMode,
) -> Result<HessianParts> {
    check_dims(params, data)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::input("gamma must be finite and nonnegative"));
    }
    let (residual, loss) = residual_and_loss(params, act, data)?;
    let n = params.n();
    let d = params.d();
    let m = data.m();
    let dim = d + 2;
    let n_f = n as f64;
    let inv_m = 1.0 / m as f64;
    // N^{beta - 1} converts the 1/N^{1-beta} damping of the curvature sum.
    let curv_scale = libm::pow(n_f, params.beta() - 1.0);
    let mut s_blocks = Vec::with_capacity(n);
    let mut d_blocks = Vec::with_capacity(n);
    let mut acc = vec![0.0; dim * dim];
    for i in 0..n {
        let mut s_i = Mat::zeros(m, dim);
        acc.iter_mut().for_each(|v| *v = 0.0);
        for mm in 0..m {
            let x = data.x(mm);
            let z = params.pre_activation(i, x);
            let s0 = act.apply(z);
            let s1 = act.deriv(z);
            let cs1 = params.c(i) * s1;
            let row = s_i.row_mut(mm);
            row[0] = s0;
            for (j, &xj) in x.iter().enumerate() {
                row[1 + j] = cs1 * xj;
            }
            row[dim - 1] = cs1;
            if mode == CurvatureMode::Full {
                // Accumulate (1/M) sum_m r_m h_i(x^m) entrywise.
                let wgt = residual[mm] * inv_m;
                let a = wgt * s1;
                let b = wgt * params.c(i) * act.deriv2(z);
                for (j, &xj) in x.iter().enumerate() {
                    acc[j + 1] += a * xj;
                    acc[(j + 1) * dim] += a * xj;
                    for (k, &xk) in x.iter().enumerate() {
                        acc[(j + 1) * dim + (k + 1)] += b * xj * xk;
                    }
                    acc[(j + 1) * dim + (dim - 1)] += b * xj;
                    acc[(dim - 1) * dim + (j + 1)] += b * xj;
                }
                acc[dim - 1] += a;
                acc[(dim - 1) * dim] += a;
                acc[(dim - 1) * dim + (dim - 1)] += b;
            }
        }
        let mut block = vec![0.0; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let shift = if r == c { gamma } else { 0.0 };
                block[r * dim + c] = shift - curv_scale * acc[r * dim + c];
            }
        }
        s_blocks.push(s_i);
        d_blocks.push(SymMatrix::new(dim, block)?);
    }
    let gamma_n = gamma / libm::pow(n_f, 2.0 * params.beta() - 1.0);
    Ok(HessianParts {
        n,
        m,
        d,
        beta: params.beta(),
        gamma,
        gamma_n,
        mode,
        s_blocks,
        d_blocks,
        residual,
        loss,
    })
}

/// Dense regularized Hessian `gamma^N I + (1/M) J^T J + S`; a small-instance
/// oracle guarded at [`DENSE_ORACLE_LIMIT`] parameters.
pub fn hessian_full(
    params: &NetworkParams,
    act: Activation,
    data: &Dataset,
    gamma: f64,
    mode: CurvatureMode,
) -> Result<SymMatrix> {
    let size = params.num_params();
    if size > DENSE_ORACLE_LIMIT {
        return Err(Error::TooLargeForDense {
            size,
            limit: DENSE_ORACLE_LIMIT,
        });
    }
    let parts = hessian_parts(params, act, data, gamma, mode)?;
    let n = parts.n;
    let dim = parts.d + 2;
    let m = parts.m;
    // J = N^{-beta} s, so G = (1/M) J^T J = (N^{-2 beta} / M) s^T s.
    let g_scale = libm::pow(n as f64, -2.0 * parts.beta) / m as f64;
    // S_i = (d_i - gamma I) / N^{2 beta - 1}.
    let s_scale = libm::pow(n as f64, -(2.0 * parts.beta - 1.0));
    let mut h = vec![0.0; size * size];
    for bi in 0..n {
        for bj in bi..n {
            for a in 0..dim {
                for b in 0..dim {
                    let mut acc = 0.0;
                    for mm in 0..m {
                        acc += parts.s_blocks[bi].get(mm, a) * parts.s_blocks[bj].get(mm, b);
                    }
                    let mut v = g_scale * acc;
                    if bi == bj {
                        let dmat = &parts.d_blocks[bi];
                        let shift = if a == b { parts.gamma } else { 0.0 };
                        v += s_scale * (dmat.get(a, b) - shift);
                        if a == b {
                            v += parts.gamma_n;
                        }
                    }
                    let row = bi * dim + a;
                    let col = bj * dim + b;
                    h[row * size + col] = v;
                    h[col * size + row] = v;
                }
            }
        }
    }
    SymMatrix::new(size, h)
}

fn check_dims(params: &NetworkParams, data: &Dataset) -> Result<()> {
    if params.d() != data.d() {
        return Err(Error::input("dataset dimension does not match the network"));
    }
    Ok(())
}
