//! The scaled shallow network `f(x) = N^{-beta} * sum_i c_i * sigma(w_i . x + eta_i)`:
//! parameter storage, seeded initialization, forward evaluation, and the
//! per-neuron feature row / curvature block that the Newton machinery is
//! built from.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Smooth bounded activation. Both variants are bounded with bounded first
/// and second derivatives, which is what every estimate in this crate
/// leans on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Sigmoid,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => libm::tanh(z),
            Activation::Sigmoid => sigmoid(z),
        }
    }

    pub fn deriv(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let t = libm::tanh(z);
                1.0 - t * t
            }
            Activation::Sigmoid => {
                let s = sigmoid(z);
                s * (1.0 - s)
            }
        }
    }

    /// Second derivative in closed form; no numeric differentiation.
    pub fn deriv2(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let t = libm::tanh(z);
                -2.0 * t * (1.0 - t * t)
            }
            Activation::Sigmoid => {
                let s = sigmoid(z);
                s * (1.0 - s) * (1.0 - 2.0 * s)
            }
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// All `N(d+2)` trainable parameters plus the output scaling exponent.
///
/// The flat parameter layout used by gradients, Hessians, and updates is
/// neuron-major with per-neuron order `(c, w_1..w_d, eta)`, matching the
/// row/column order of [`feature_row`] and [`hess_block`].
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams {
    n: usize,
    d: usize,
    beta: f64,
    c: Vec<f64>,
    w: Vec<f64>,
    eta: Vec<f64>,
}

impl NetworkParams {
    pub fn new(
        n: usize,
        d: usize,
        beta: f64,
        c: Vec<f64>,
        w: Vec<f64>,
        eta: Vec<f64>,
    ) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::input("network needs at least one neuron and one input"));
        }
        if !(beta > 0.5 && beta < 1.0) {
            return Err(Error::input("beta must lie strictly inside (0.5, 1.0)"));
        }
        if c.len() != n || w.len() != n * d || eta.len() != n {
            return Err(Error::input("parameter buffers do not match (n, d)"));
        }
        if c.iter().chain(&w).chain(&eta).any(|v| !v.is_finite()) {
            return Err(Error::input("network parameters must be finite"));
        }
        Ok(NetworkParams { n, d, beta, c, w, eta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn num_params(&self) -> usize {
        self.n * (self.d + 2)
    }

    pub fn c(&self, i: usize) -> f64 {
        self.c[i]
    }

    pub fn w(&self, i: usize) -> &[f64] {
        &self.w[i * self.d..(i + 1) * self.d]
    }

    pub fn eta(&self, i: usize) -> f64 {
        self.eta[i]
    }

    /// `w_i . x + eta_i`.
    pub fn pre_activation(&self, i: usize, x: &[f64]) -> f64 {
        crate::linalg::dot(self.w(i), x) + self.eta[i]
    }

    /// Output normalization `N^{-beta}`.
    pub fn width_scale(&self) -> f64 {
        libm::pow(self.n as f64, -self.beta)
    }

    /// Flatten into the neuron-major `(c, w, eta)` layout.
    pub fn to_flat(&self) -> Vec<f64> {
        let stride = self.d + 2;
        let mut out = vec![0.0; self.n * stride];
        for i in 0..self.n {
            out[i * stride] = self.c[i];
            out[i * stride + 1..i * stride + 1 + self.d].copy_from_slice(self.w(i));
            out[i * stride + 1 + self.d] = self.eta[i];
        }
        out
    }

    /// Rebuild from the flat layout produced by [`Self::to_flat`].
    pub fn from_flat(n: usize, d: usize, beta: f64, flat: &[f64]) -> Result<Self> {
        let stride = d + 2;
        if flat.len() != n * stride {
            return Err(Error::input("flat parameter vector has the wrong length"));
        }
        let mut c = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n * d);
        let mut eta = Vec::with_capacity(n);
        for i in 0..n {
            c.push(flat[i * stride]);
            w.extend_from_slice(&flat[i * stride + 1..i * stride + 1 + d]);
            eta.push(flat[i * stride + 1 + d]);
        }
        NetworkParams::new(n, d, beta, c, w, eta)
    }

    /// `theta + alpha * z` for a flat update vector in the same layout.
    pub fn with_update(&self, z: &[f64], alpha: f64) -> Result<Self> {
        let stride = self.d + 2;
        if z.len() != self.n * stride {
            return Err(Error::input("update vector has the wrong length"));
        }
        let mut flat = self.to_flat();
        for (p, u) in flat.iter_mut().zip(z) {
            *p += alpha * u;
        }
        NetworkParams::from_flat(self.n, self.d, self.beta, &flat)
    }
}

/// Initialization law: `c ~ Uniform(-a, a)` independent of
/// `(w, eta) ~ N(0, std^2)` componentwise. Mean-zero compact support for
/// `c` and an everywhere-positive density for `(w, eta)`. A halfwidth of
/// zero degenerates `c` to the constant 0, which is still mean-zero with
/// compact support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitDistribution {
    pub c_halfwidth: f64,
    pub w_eta_std: f64,
}

impl InitDistribution {
    pub fn new(c_halfwidth: f64, w_eta_std: f64) -> Result<Self> {
        if !(c_halfwidth >= 0.0 && c_halfwidth.is_finite()) {
            return Err(Error::input("c_halfwidth must be nonnegative and finite"));
        }
        if !(w_eta_std > 0.0 && w_eta_std.is_finite()) {
            return Err(Error::input("w_eta_std must be positive and finite"));
        }
        Ok(InitDistribution { c_halfwidth, w_eta_std })
    }
}

impl Default for InitDistribution {
    fn default() -> Self {
        InitDistribution {
            c_halfwidth: 1.0,
            w_eta_std: 1.0,
        }
    }
}

/// Draw network parameters i.i.d. per neuron, fully determined by `seed`.
///
/// Per neuron the draw order is `c`, then `w_1..w_d`, then `eta`, from a
/// ChaCha8 stream, so the result is bit-identical for identical arguments.
pub fn sample_init(
    dist: &InitDistribution,
    n: usize,
    d: usize,
    beta: f64,
    seed: u64,
) -> Result<NetworkParams> {
    if n == 0 || d == 0 {
        return Err(Error::input("n and d must be at least 1"));
    }
    let uniform = if dist.c_halfwidth > 0.0 {
        Some(
            Uniform::new(-dist.c_halfwidth, dist.c_halfwidth)
                .map_err(|_| Error::input("invalid c_halfwidth"))?,
        )
    } else {
        None
    };
    let normal = Normal::new(0.0, dist.w_eta_std)
        .map_err(|_| Error::input("invalid w_eta_std"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n * d);
    let mut eta = Vec::with_capacity(n);
    for _ in 0..n {
        c.push(match &uniform {
            Some(u) => u.sample(&mut rng),
            None => 0.0,
        });
        for _ in 0..d {
            w.push(normal.sample(&mut rng));
        }
        eta.push(normal.sample(&mut rng));
    }
    NetworkParams::new(n, d, beta, c, w, eta)
}

/// Network output `N^{-beta} * sum_i c_i * sigma(w_i . x + eta_i)`,
/// accumulated in neuron index order.
pub fn forward(params: &NetworkParams, act: Activation, x: &[f64]) -> Result<f64> {
    check_input(params, x)?;
    let mut acc = 0.0;
    for i in 0..params.n {
        acc += params.c[i] * act.apply(params.pre_activation(i, x));
    }
    Ok(params.width_scale() * acc)
}

/// Per-neuron feature row `s_i(x)` with layout `(c-slot, w-slots, eta-slot)`:
/// `(sigma(z), c sigma'(z) x^T, c sigma'(z))` at `z = w_i . x + eta_i`.
///
/// The gradient of the network output with respect to neuron `i`'s
/// parameters is exactly `N^{-beta}` times this row.
pub fn feature_row(
    params: &NetworkParams,
    act: Activation,
    i: usize,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_input(params, x)?;
    check_neuron(params, i)?;
    let z = params.pre_activation(i, x);
    let s0 = act.apply(z);
    let cs1 = params.c[i] * act.deriv(z);
    let mut row = Vec::with_capacity(params.d + 2);
    row.push(s0);
    for &xj in x {
        row.push(cs1 * xj);
    }
    row.push(cs1);
    Ok(row)
}

/// Per-neuron curvature block `h_i(x)`, the `(d+2) x (d+2)` symmetric matrix
/// with zero `(c, c)` entry:
///
/// ```text
/// [ 0        sigma' x^T        sigma'      ]
/// [ sigma'x  c sigma'' x x^T   c sigma'' x ]
/// [ sigma'   c sigma'' x^T     c sigma''   ]
/// ```
///
/// The Hessian of the network output with respect to neuron `i`'s
/// parameters is exactly `N^{-beta}` times this block.
pub fn hess_block(
    params: &NetworkParams,
    act: Activation,
    i: usize,
    x: &[f64],
) -> Result<SymMatrix> {
    check_input(params, x)?;
    check_neuron(params, i)?;
    let d = params.d;
    let z = params.pre_activation(i, x);
    let s1 = act.deriv(z);
    let cs2 = params.c[i] * act.deriv2(z);
    let dim = d + 2;
    let mut data = vec![0.0; dim * dim];
    for j in 0..d {
        data[j + 1] = s1 * x[j];
        data[(j + 1) * dim] = s1 * x[j];
    }
    data[dim - 1] = s1;
    data[(dim - 1) * dim] = s1;
    for j in 0..d {
        for k in 0..d {
            data[(j + 1) * dim + (k + 1)] = cs2 * x[j] * x[k];
        }
        data[(j + 1) * dim + (dim - 1)] = cs2 * x[j];
        data[(dim - 1) * dim + (j + 1)] = cs2 * x[j];
    }
    data[(dim - 1) * dim + (dim - 1)] = cs2;
    SymMatrix::new(dim, data)
}

fn check_input(params: &NetworkParams, x: &[f64]) -> Result<()> {
    if x.len() != params.d {
        return Err(Error::input("input dimension does not match the network"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("input must be finite"));
    }
    Ok(())
}

fn check_neuron(params: &NetworkParams, i: usize) -> Result<()> {
    if i >= params.n {
        return Err(Error::input("neuron index out of range"));
    }
    Ok(())
}
