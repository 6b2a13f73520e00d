//! Kernels attached to the network at a parameter point and in the
//! infinite-width limit: the finite-width NNTK that contracts the residual
//! under a regularized Newton step, the empirical tangent kernel, its Monte
//! Carlo infinite-width limit, the limit NNTK, and operator-norm
//! comparisons between any of them.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::linalg::{op_norm_sym, sym_eig, LuFactors, Mat, SymMatrix};
use crate::model::{Activation, InitDistribution, NetworkParams};
use crate::newton::{default_pd_epsilon, kernel_system, pd_guard};
use crate::objective::{hessian_parts, CurvatureMode, Dataset};

/// Which object an `M x M` kernel matrix is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// Finite-width Newton tangent kernel `A (I + A)^{-1}`.
    FiniteNntk,
    /// Empirical tangent kernel `(1/(MN)) sum_i s_i s_i^T`.
    FiniteNtk,
    /// Monte Carlo estimate of the infinite-width tangent kernel.
    LimitNtkMc,
    /// Limit Newton tangent kernel `B (gamma I + B)^{-1}`.
    LimitNntk,
}

/// Where a kernel came from; fields are filled when they apply.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KernelProvenance {
    pub gamma: Option<f64>,
    pub width: Option<usize>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
}

/// A symmetric `M x M` kernel matrix with its kind and provenance.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    mat: SymMatrix,
    kind: KernelKind,
    meta: KernelProvenance,
}

impl KernelMatrix {
    pub fn from_sym(mat: SymMatrix, kind: KernelKind, meta: KernelProvenance) -> Self {
        KernelMatrix { mat, kind, meta }
    }

    pub fn m(&self) -> usize {
        self.mat.dim()
    }

    pub fn mat(&self) -> &SymMatrix {
        &self.mat
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn meta(&self) -> &KernelProvenance {
        &self.meta
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        sym_eig(&self.mat).values
    }
}

/// Monte Carlo limit-kernel estimate with entrywise standard errors
/// (row-major `M x M`).
#[derive(Clone, Debug)]
pub struct LimitNtkEstimate {
    pub kernel: KernelMatrix,
    pub std_err: Vec<f64>,
}

/// Finite-width NNTK `B = A (I + A)^{-1}` at the given parameters, where
/// `A` is the Woodbury kernel system matrix. Formed by solving
/// `(I + A) X = A` columnwise and symmetrizing; requires the definiteness
/// guard to pass.
pub fn nntk_finite(
    params: &NetworkParams,
    act: Activation,
    data: &Dataset,
    gamma: f64,
) -> Result<KernelMatrix> {
    let parts = hessian_parts(params, act, data, gamma, CurvatureMode::Full)?;
    pd_guard(&parts, default_pd_epsilon(gamma))?;
    let (a, _) = kernel_system(&parts)?;
    let mat = solve_shifted_columnwise(&a, 1.0, &a)?;
    Ok(KernelMatrix {
        mat,
        kind: KernelKind::FiniteNntk,
        meta: KernelProvenance {
            gamma: Some(gamma),
            width: Some(params.n()),
            ..Default::default()
        },
    })
}

/// Empirical tangent kernel `(1/(MN)) sum_i s_i s_i^T`; symmetric PSD by
/// construction, expectation at initialization is the limit kernel.
pub fn ntk_empirical(
    params: &NetworkParams,
    act: Activation,
    data: &Dataset,
) -> Result<KernelMatrix> {
    if params.d() != data.d() {
        return Err(Error::input("dataset dimension does not match the network"));
    }
    let m = data.m();
    let dim = params.d() + 2;
    let mut acc = vec![0.0; m * m];
    let mut rows = Mat::zeros(m, dim);
    for i in 0..params.n() {
        for mm in 0..m {
            let x = data.x(mm);
            let z = params.pre_activation(i, x);
            let s0 = act.apply(z);
            let cs1 = params.c(i) * act.deriv(z);
            let row = rows.row_mut(mm);
            row[0] = s0;
            for (j, &xj) in x.iter().enumerate() {
                row[1 + j] = cs1 * xj;
            }
            row[dim - 1] = cs1;
        }
        for r in 0..m {
            for c in r..m {
                let v = crate::linalg::dot(rows.row(r), rows.row(c));
                acc[r * m + c] += v;
            }
        }
    }
    let scale = 1.0 / (m as f64 * params.n() as f64);
    for r in 0..m {
        for c in r..m {
            let v = acc[r * m + c] * scale;
            acc[r * m + c] = v;
            acc[c * m + r] = v;
        }
    }
    Ok(KernelMatrix {
        mat: SymMatrix::new(m, acc)?,
        kind: KernelKind::FiniteNtk,
        meta: KernelProvenance {
            width: Some(params.n()),
            ..Default::default()
        },
    })
}

const MC_CHUNK: usize = 8192;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ splitmix64(chunk.wrapping_add(1)))
}

struct McSampler {
    uniform: Option<Uniform<f64>>,
    normal: Normal<f64>,
    d: usize,
}

impl McSampler {
    fn new(dist: &InitDistribution, d: usize) -> Result<Self> {
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
        Ok(McSampler { uniform, normal, d })
    }

    /// Draw `(c, w, eta)` in the same per-neuron order used by
    /// initialization sampling.
    fn draw(&self, rng: &mut ChaCha8Rng, w: &mut [f64]) -> (f64, f64) {
        let c = match &self.uniform {
            Some(u) => u.sample(rng),
            None => 0.0,
        };
        for slot in w.iter_mut().take(self.d) {
            *slot = self.normal.sample(rng);
        }
        let eta = self.normal.sample(rng);
        (c, eta)
    }
}

/// Monte Carlo estimate of the limit tangent kernel with entries
///
/// `(1/M) E[ sigma_m sigma_n + c^2 sigma'_m sigma'_n (x^m . x^n + 1) ]`
///
/// over `samples` i.i.d. draws of `(c, w, eta)`, plus entrywise standard
/// errors. Sampling is chunked with per-chunk seeded streams merged in
/// chunk order, so the result depends only on `(seed, samples)`.
pub fn ntk_limit_mc(
    dist: &InitDistribution,
    act: Activation,
    data: &Dataset,
    samples: usize,
    seed: u64,
) -> Result<LimitNtkEstimate> {
    if samples == 0 {
        return Err(Error::input("sample count must be at least 1"));
    }
    let m = data.m();
    let d = data.d();
    let sampler = McSampler::new(dist, d)?;
    // Gram of the lifted inputs: x^m . x^n + 1.
    let mut gram = vec![0.0; m * m];
    for a in 0..m {
        for b in 0..m {
            gram[a * m + b] = crate::linalg::dot(data.x(a), data.x(b)) + 1.0;
        }
    }
    let mut sum = vec![0.0; m * m];
    let mut sum_sq = vec![0.0; m * m];
    let mut w = vec![0.0; d];
    let mut sig = vec![0.0; m];
    let mut sig_d = vec![0.0; m];
    let mut remaining = samples;
    let mut chunk = 0u64;
    while remaining > 0 {
        let count = remaining.min(MC_CHUNK);
        let mut rng = chunk_rng(seed, chunk);
        let mut c_sum = vec![0.0; m * m];
        let mut c_sum_sq = vec![0.0; m * m];
        for _ in 0..count {
            let (c, eta) = sampler.draw(&mut rng, &mut w);
            let c2 = c * c;
            for mm in 0..m {
                let z = crate::linalg::dot(&w, data.x(mm)) + eta;
                sig[mm] = act.apply(z);
                sig_d[mm] = act.deriv(z);
            }
            for a in 0..m {
                for b in a..m {
                    let v = sig[a] * sig[b] + c2 * sig_d[a] * sig_d[b] * gram[a * m + b];
                    c_sum[a * m + b] += v;
                    c_sum_sq[a * m + b] += v * v;
                }
            }
        }
        for idx in 0..m * m {
            sum[idx] += c_sum[idx];
            sum_sq[idx] += c_sum_sq[idx];
        }
        remaining -= count;
        chunk += 1;
    }
    let s_f = samples as f64;
    let inv_m = 1.0 / m as f64;
    let mut mat = vec![0.0; m * m];
    let mut se = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let mean = sum[a * m + b] / s_f;
            let entry = inv_m * mean;
            let err = if samples > 1 {
                let var = (sum_sq[a * m + b] - s_f * mean * mean) / (s_f - 1.0);
                inv_m * libm::sqrt(var.max(0.0) / s_f)
            } else {
                0.0
            };
            mat[a * m + b] = entry;
            mat[b * m + a] = entry;
            se[a * m + b] = err;
            se[b * m + a] = err;
        }
    }
    Ok(LimitNtkEstimate {
        kernel: KernelMatrix {
            mat: SymMatrix::new(m, mat)?,
            kind: KernelKind::LimitNtkMc,
            meta: KernelProvenance {
                mc_samples: Some(samples),
                seed: Some(seed),
                ..Default::default()
            },
        },
        std_err: se,
    })
}

/// Monte Carlo standard errors for the eigenvalues of the limit kernel,
/// by first-order perturbation: the error of `lambda_j` is the sampling
/// error of the quadratic form `v_j^T B v_j`, estimated over the same
/// chunked sample stream as [`ntk_limit_mc`] for the given `seed`.
pub fn limit_ntk_eigen_std_errors(
    dist: &InitDistribution,
    act: Activation,
    data: &Dataset,
    samples: usize,
    seed: u64,
    eigenvectors: &Mat,
) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::input("eigenvalue errors need at least 2 samples"));
    }
    let m = data.m();
    if eigenvectors.rows() != m {
        return Err(Error::input("eigenvector rows do not match the dataset"));
    }
    let n_vec = eigenvectors.cols();
    let d = data.d();
    let sampler = McSampler::new(dist, d)?;
    let mut sum = vec![0.0; n_vec];
    let mut sum_sq = vec![0.0; n_vec];
    let mut w = vec![0.0; d];
    let mut sig = vec![0.0; m];
    let mut sig_d = vec![0.0; m];
    let mut lifted = vec![0.0; d + 1];
    let mut remaining = samples;
    let mut chunk = 0u64;
    while remaining > 0 {
        let count = remaining.min(MC_CHUNK);
        let mut rng = chunk_rng(seed, chunk);
        for _ in 0..count {
            let (c, eta) = sampler.draw(&mut rng, &mut w);
            let c2 = c * c;
            for mm in 0..m {
                let z = crate::linalg::dot(&w, data.x(mm)) + eta;
                sig[mm] = act.apply(z);
                sig_d[mm] = act.deriv(z);
            }
            for j in 0..n_vec {
                // v^T (per-sample kernel) v = (1/M)[(sum v sig)^2
                //   + c^2 |sum v sig' (x, 1)|^2].
                let mut u = 0.0;
                lifted.iter_mut().for_each(|t| *t = 0.0);
                for mm in 0..m {
                    let vj = eigenvectors.get(mm, j);
                    u += vj * sig[mm];
                    let coeff = vj * sig_d[mm];
                    for (slot, &xv) in lifted.iter_mut().zip(data.x(mm)) {
                        *slot += coeff * xv;
                    }
                    lifted[d] += coeff;
                }
                let norm_sq: f64 = lifted.iter().map(|v| v * v).sum();
                let proj = (u * u + c2 * norm_sq) / m as f64;
                sum[j] += proj;
                sum_sq[j] += proj * proj;
            }
        }
        remaining -= count;
        chunk += 1;
    }
    let s_f = samples as f64;
    Ok((0..n_vec)
        .map(|j| {
            let mean = sum[j] / s_f;
            let var = (sum_sq[j] - s_f * mean * mean) / (s_f - 1.0);
            libm::sqrt(var.max(0.0) / s_f)
        })
        .collect())
}

/// Limit NNTK `B (gamma I + B)^{-1}`. Shares eigenvectors with `B`, with
/// eigenvalues mapped through `lambda / (gamma + lambda)`. At `gamma = 0`
/// the kernel must be nonsingular and the result is the identity.
pub fn nntk_limit(b: &KernelMatrix, gamma: f64) -> Result<KernelMatrix> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::input("gamma must be finite and nonnegative"));
    }
    if gamma == 0.0 {
        let min = sym_eig(b.mat()).values[0];
        if min <= 1e-12 {
            return Err(Error::SingularLimitKernel {
                min_eigenvalue: min,
            });
        }
    }
    let mat = solve_shifted_columnwise(b.mat(), gamma, b.mat())?;
    Ok(KernelMatrix {
        mat,
        kind: KernelKind::LimitNntk,
        meta: KernelProvenance {
            gamma: Some(gamma),
            ..*b.meta()
        },
    })
}

/// Operator-norm distance between two kernels of equal dimension.
pub fn kernel_distance(a: &KernelMatrix, b: &KernelMatrix) -> Result<f64> {
    if a.m() != b.m() {
        return Err(Error::input("kernel dimensions do not match"));
    }
    Ok(op_norm_sym(&a.mat().sub(b.mat())?))
}

/// Solve `(shift I + A) X = RHS` column by column and symmetrize the result.
fn solve_shifted_columnwise(a: &SymMatrix, shift: f64, rhs: &SymMatrix) -> Result<SymMatrix> {
    let m = a.dim();
    let mut shifted = a.clone();
    shifted.add_diagonal(shift);
    let mat = shifted.to_mat();
    let lu = LuFactors::new(&mat)?;
    let mut out = vec![0.0; m * m];
    let mut col = vec![0.0; m];
    for c in 0..m {
        for r in 0..m {
            col[r] = rhs.get(r, c);
        }
        let x = lu.solve_refined(&mat, &col);
        for r in 0..m {
            out[r * m + c] = x[r];
        }
    }
    SymMatrix::new(m, out)
}
