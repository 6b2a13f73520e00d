//! Deterministic infinite-width training dynamics
//! `f_{k+1} = f_k + alpha B* (y - f_k)`, `f_0 = 0`, and the closed-form
//! convergence rate attached to the spectrum of `B*`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernels::KernelMatrix;
use crate::linalg::{norm2, sym_eig};

/// Limit trajectory with its residual norms and the linear-rate envelope
/// `(1 - alpha lambda_min)^k ||y||`.
#[derive(Clone, Debug)]
pub struct LimitTrajectory {
    /// `f_k` for `k = 0..=K`; `f_0` is exactly zero.
    pub outputs: Vec<Vec<f64>>,
    /// `||y - f_k||_2` for `k = 0..=K`.
    pub residual_norms: Vec<f64>,
    /// Envelope values for `k = 0..=K`.
    pub envelope: Vec<f64>,
}

/// Spectrum endpoints of the limit kernel, the admissible step-size
/// interval `(0, 2/(lambda_max + lambda_min))`, and the contraction rate
/// `1 - alpha lambda_min` for the supplied step size.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Open upper endpoint of the admissible step-size interval.
    pub alpha_sup: f64,
    pub alpha: f64,
    pub admissible: bool,
    pub rate: f64,
}

/// Iterate the deterministic limit recursion for `steps` steps from zero.
///
/// The residual obeys `r_{k+1} = (I - alpha B*) r_k` exactly in floating
/// point, since each step applies the same matrix-vector recursion.
pub fn limit_trajectory(
    bstar: &KernelMatrix,
    y: &[f64],
    alpha: f64,
    steps: usize,
) -> Result<LimitTrajectory> {
    if y.len() != bstar.m() {
        return Err(Error::input("label vector does not match the kernel dimension"));
    }
    if !alpha.is_finite() {
        return Err(Error::input("alpha must be finite"));
    }
    let lambda_min = sym_eig(bstar.mat()).values[0];
    let y_norm = norm2(y);
    let factor = 1.0 - alpha * lambda_min;
    let mut outputs = Vec::with_capacity(steps + 1);
    let mut residual_norms = Vec::with_capacity(steps + 1);
    let mut envelope = Vec::with_capacity(steps + 1);
    let mut f = vec![0.0; y.len()];
    let mut bound = y_norm;
    for k in 0..=steps {
        let r: Vec<f64> = y.iter().zip(&f).map(|(yv, fv)| yv - fv).collect();
        residual_norms.push(norm2(&r));
        envelope.push(bound);
        outputs.push(f.clone());
        if k == steps {
            break;
        }
        let br = bstar.mat().mul_vec(&r);
        for (fv, bv) in f.iter_mut().zip(&br) {
            *fv += alpha * bv;
        }
        bound *= factor;
    }
    Ok(LimitTrajectory {
        outputs,
        residual_norms,
        envelope,
    })
}

/// Spectrum endpoints, admissible step-size interval, and linear rate for
/// the limit dynamics under the given step size.
pub fn convergence_report(bstar: &KernelMatrix, alpha: f64) -> ConvergenceReport {
    let eig = sym_eig(bstar.mat());
    let lambda_min = eig.values[0];
    let lambda_max = eig.values[eig.values.len() - 1];
    let alpha_sup = 2.0 / (lambda_max + lambda_min);
    ConvergenceReport {
        lambda_min,
        lambda_max,
        alpha_sup,
        alpha,
        admissible: alpha > 0.0 && alpha < alpha_sup,
        rate: 1.0 - alpha * lambda_min,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{KernelKind, KernelProvenance};
    use crate::linalg::SymMatrix;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kernel_from(mat: SymMatrix) -> KernelMatrix {
        KernelMatrix::from_sym(mat, KernelKind::LimitNntk, KernelProvenance::default())
    }

    fn spd_kernel(eigs: &[f64], seed: u64) -> (KernelMatrix, crate::linalg::SymEigen) {
        let dim = eigs.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..dim * dim).map(|_| rng.random::<f64>() - 0.5).collect();
        let basis = sym_eig(&SymMatrix::new(dim, raw).unwrap());
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = 0.0;
                for k in 0..dim {
                    acc += basis.vectors.get(i, k) * eigs[k] * basis.vectors.get(j, k);
                }
                data[i * dim + j] = acc;
            }
        }
        let mat = SymMatrix::new(dim, data).unwrap();
        let eig = sym_eig(&mat);
        (kernel_from(mat), eig)
    }

    #[test]
    fn zero_step_size_freezes_the_output() {
        let (kernel, _) = spd_kernel(&[0.3, 0.6], 1);
        let traj = limit_trajectory(&kernel, &[1.0, -2.0], 0.0, 5).unwrap();
        for f in &traj.outputs {
            assert_eq!(f, &vec![0.0, 0.0]);
        }
    }

    #[test]
    fn identity_kernel_converges_in_one_step() {
        let kernel = kernel_from(SymMatrix::identity(3));
        let y = [0.5, -1.0, 2.0];
        let traj = limit_trajectory(&kernel, &y, 1.0, 2).unwrap();
        assert_eq!(traj.outputs[1], y.to_vec());
        assert!(traj.residual_norms[1] <= 1e-15);
    }

    #[test]
    fn scalar_geometric_recursion() {
        // B* = 0.5 I, alpha = 1, y = 1: f_k = 1 - 0.5^k.
        let kernel = kernel_from(SymMatrix::scaled_identity(1, 0.5));
        let traj = limit_trajectory(&kernel, &[1.0], 1.0, 10).unwrap();
        for (k, f) in traj.outputs.iter().enumerate() {
            let expect = 1.0 - libm::pow(0.5, k as f64);
            assert!((f[0] - expect).abs() <= 1e-14);
        }
    }

    #[test]
    fn trajectory_lengths() {
        let (kernel, _) = spd_kernel(&[0.2, 0.9], 2);
        let traj = limit_trajectory(&kernel, &[1.0, 1.0], 0.5, 7).unwrap();
        assert_eq!(traj.outputs.len(), 8);
        assert_eq!(traj.residual_norms.len(), 8);
        assert_eq!(traj.envelope.len(), 8);
        assert_eq!(traj.outputs[0], vec![0.0, 0.0]);
    }

    #[test]
    fn envelope_holds_for_admissible_step_sizes() {
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
            let eigs: Vec<f64> = (0..5).map(|_| 0.05 + 0.9 * rng.random::<f64>()).collect();
            let (kernel, _) = spd_kernel(&eigs, seed);
            let report = convergence_report(&kernel, 0.0);
            let alpha = 0.9 * report.alpha_sup;
            let y: Vec<f64> = (0..5).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let traj = limit_trajectory(&kernel, &y, alpha, 200).unwrap();
            let y_norm = norm2(&y);
            for k in 0..=200 {
                assert!(
                    traj.residual_norms[k] <= traj.envelope[k] + 1e-9 * y_norm,
                    "seed {seed} step {k}"
                );
            }
        }
    }

    #[test]
    fn envelope_is_tight_on_the_smallest_eigenvector() {
        let (kernel, eig) = spd_kernel(&[0.15, 0.4, 0.85], 33);
        let y = eig.vector(0);
        let traj = limit_trajectory(&kernel, &y, 1.0, 50).unwrap();
        for k in 0..=50 {
            assert!((traj.residual_norms[k] - traj.envelope[k]).abs() <= 1e-10);
        }
    }

    #[test]
    fn residual_recursion_is_linear() {
        // Applying (I - alpha B*)^k to y directly matches the trajectory.
        let (kernel, _) = spd_kernel(&[0.3, 0.5, 0.7, 0.95], 44);
        let alpha = 0.8;
        let y = [1.0, -0.5, 0.25, 2.0];
        let traj = limit_trajectory(&kernel, &y, alpha, 30).unwrap();
        let dim = 4;
        let mut iter_mat = SymMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = (if i == j { 1.0 } else { 0.0 }) - alpha * kernel.mat().get(i, j);
                iter_mat.set_sym(i, j, v);
            }
        }
        let mut r = y.to_vec();
        for k in 0..=30 {
            let expect = norm2(&r);
            assert!(
                (traj.residual_norms[k] - expect).abs() <= 1e-11 * expect.max(1e-300),
                "step {k}"
            );
            r = iter_mat.mul_vec(&r);
        }
    }

    #[test]
    fn report_for_identity_kernel() {
        let kernel = kernel_from(SymMatrix::identity(4));
        let report = convergence_report(&kernel, 0.25);
        assert_eq!(report.lambda_min, 1.0);
        assert_eq!(report.lambda_max, 1.0);
        assert_eq!(report.alpha_sup, 1.0);
        assert!(report.admissible);
        assert_eq!(report.rate, 0.75);
    }

    #[test]
    fn report_formula_application() {
        let mut mat = SymMatrix::zeros(2);
        mat.set_sym(0, 0, 0.5);
        mat.set_sym(1, 1, 0.8);
        let report = convergence_report(&kernel_from(mat), 1.0);
        assert!((report.rate - 0.5).abs() <= 1e-15);
        assert!((report.alpha_sup - 2.0 / 1.3).abs() <= 1e-15);
        assert!(report.admissible);
    }

    #[test]
    fn loss_decay_exponent_for_scaled_identity() {
        // Squared-residual ratio per step equals rate^2 when B* = lambda I.
        let kernel = kernel_from(SymMatrix::scaled_identity(3, 0.25));
        let y = [1.0, 2.0, -1.0];
        let alpha = 1.0;
        let traj = limit_trajectory(&kernel, &y, alpha, 5).unwrap();
        let rate = 1.0 - alpha * 0.25;
        for k in 0..5 {
            let ratio = (traj.residual_norms[k + 1] * traj.residual_norms[k + 1])
                / (traj.residual_norms[k] * traj.residual_norms[k]);
            assert!((ratio - rate * rate).abs() <= 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let (kernel, _) = spd_kernel(&[0.5, 0.7], 5);
        assert!(limit_trajectory(&kernel, &[1.0, 2.0, 3.0], 1.0, 3).is_err());
    }
}
