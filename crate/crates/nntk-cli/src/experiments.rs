//! The experiment drivers. Each experiment renders one CSV: a provenance
//! comment, a header row, data rows in deterministic cell order, and
//! trailing `#` comment lines for fitted/aggregated summaries.

use std::fmt::Write as _;
use std::fs;
use std::io;

use nntk::{
    convergence_report, limit_trajectory, nntk_finite, nntk_limit, ntk_limit_mc,
    residual_and_loss, sample_init, sym_eig, train, Activation, Dataset, Error, InitDistribution,
    KernelMatrix, NetworkParams,
};

use crate::config::{Experiment, ExperimentConfig};
use crate::csvfmt::fmt_f64;
use crate::dataset::gen_dataset;
use crate::seeding::mix_seed;
use crate::slope::loglog_slope;

/// Failures of a run: library errors (guard aborts, bad inputs, numeric
/// breakdown) or plain IO.
#[derive(Debug)]
pub enum RunError {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Lib(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Lib(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "{e}"),
        }
    }
}

/// Render the experiment's CSV and write it to `config.out`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(), RunError> {
    let csv = render_experiment(config)?;
    fs::write(&config.out, csv)?;
    Ok(())
}

/// Render the experiment's CSV as a string; pure in the configuration, so
/// identical configurations produce byte-identical output.
pub fn render_experiment(config: &ExperimentConfig) -> Result<String, Error> {
    let data = gen_dataset(config.target, config.m)?;
    let dist = InitDistribution::new(config.c_halfwidth, config.w_eta_std)?;
    let act = Activation::Tanh;
    let mut out = String::new();
    let _ = writeln!(out, "{}", config.provenance_line());
    match config.experiment {
        Experiment::Spectra => render_spectra(config, &data, &dist, act, &mut out)?,
        Experiment::OneStep => render_one_step(config, &data, &dist, act, &mut out)?,
        Experiment::ZSweep => render_z_sweep(config, &data, &dist, act, &mut out)?,
        Experiment::KernelSweep => render_kernel_sweep(config, &data, &dist, act, &mut out)?,
        Experiment::Train => render_train(config, &data, &dist, act, &mut out)?,
        Experiment::Limit => render_limit(config, &data, &dist, act, &mut out)?,
    }
    Ok(out)
}

fn init_cell(
    config: &ExperimentConfig,
    dist: &InitDistribution,
    n: usize,
    run: usize,
) -> Result<NetworkParams, Error> {
    sample_init(dist, n, 1, config.beta, mix_seed(config.seed0, run as u64))
}

fn y_norm_sq(data: &Dataset) -> f64 {
    data.ys().iter().map(|y| y * y).sum()
}

/// Eigenvalues of the limit kernel and of the limit NNTK per gamma, with
/// Monte Carlo error bars on the kernel eigenvalues.
fn render_spectra(
    config: &ExperimentConfig,
    data: &Dataset,
    dist: &InitDistribution,
    act: Activation,
    out: &mut String,
) -> Result<(), Error> {
    let est = ntk_limit_mc(dist, act, data, config.mc_samples, config.seed0)?;
    let eig = sym_eig(est.kernel.mat());
    let eig_se = nntk::kernels::limit_ntk_eigen_std_errors(
        dist,
        act,
        data,
        config.mc_samples,
        config.seed0,
        &eig.vectors,
    )?;
    let mut nntk_eigs = Vec::new();
    for &gamma in &config.gamma_list {
        let kernel = nntk_limit(&est.kernel, gamma)?;
        nntk_eigs.push((gamma, kernel.eigenvalues()));
    }
    let mut header = String::from("m,lambda_ntk,lambda_ntk_se");
    for gamma in &config.gamma_list {
        let _ = write!(header, ",lambda_nntk_gamma_{gamma},lambda_nntk_gamma_{gamma}_se");
    }
    let _ = writeln!(out, "{header}");
    for j in 0..data.m() {
        let _ = write!(
            out,
            "{},{},{}",
            j + 1,
            fmt_f64(eig.values[j]),
            fmt_f64(eig_se[j])
        );
        for (gamma, eigs) in &nntk_eigs {
            // Propagated error of lambda/(gamma+lambda):
            // derivative gamma/(gamma+lambda)^2 times the kernel-eigenvalue
            // error.
            let denom = gamma + eig.values[j];
            let se = if denom > 0.0 {
                eig_se[j] * gamma / (denom * denom)
            } else {
                f64::NAN
            };
            let _ = write!(out, ",{},{}", fmt_f64(eigs[j]), fmt_f64(se));
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(
        out,
        "# min_eigenvalue lambda={} se={}",
        fmt_f64(eig.values[0]),
        fmt_f64(eig_se[0])
    );
    Ok(())
}

/// Relative loss after one Newton step per (N, gamma, seed); guard failures
/// are recorded, not fatal.
fn render_one_step(
    config: &ExperimentConfig,
    data: &Dataset,
    dist: &InitDistribution,
    act: Activation,
    out: &mut String,
) -> Result<(), Error> {
    let norm_sq = y_norm_sq(data);
    let _ = writeln!(out, "n,gamma,seed,rel_loss,guard_ok");
    let mut means = Vec::new();
    for &n in &config.n_list {
        for &gamma in &config.gamma_list {
            let mut ok = 0usize;
            let mut acc = 0.0;
            for run in 0..config.seeds {
                let params = init_cell(config, dist, n, run)?;
                match nntk::newton_step_woodbury(&params, act, data, gamma, config.alpha) {
                    Ok((_, updated)) => {
                        let loss = residual_and_loss(&updated, act, data)?.1;
                        let rel = loss / norm_sq;
                        acc += rel;
                        ok += 1;
                        let _ = writeln!(out, "{n},{gamma},{run},{},1", fmt_f64(rel));
                    }
                    Err(Error::NotPositiveDefinite { .. }) => {
                        let _ = writeln!(out, "{n},{gamma},{run},nan,0");
                    }
                    Err(other) => return Err(other),
                }
            }
            means.push((n, gamma, ok, acc));
        }
    }
    for (n, gamma, ok, acc) in means {
        let mean = if ok > 0 { fmt_f64(acc / ok as f64) } else { "nan".into() };
        let _ = writeln!(
            out,
            "# mean n={n} gamma={gamma} rel_loss={mean} ok={ok}/{}",
            config.seeds
        );
    }
    Ok(())
}

/// Largest per-neuron update norm of the first Newton step per cell, plus a
/// log-log fit of the seed mean against N for every gamma.
/// Per-(N, gamma) aggregate of a sweep: width, value sum, ok-cell count.
type CellSums = Vec<(usize, f64, usize)>;

fn render_z_sweep(
    config: &ExperimentConfig,
    data: &Dataset,
    dist: &InitDistribution,
    act: Activation,
    out: &mut String,
) -> Result<(), Error> {
    let _ = writeln!(out, "n,gamma,seed,max_block_update,guard_ok");
    let mut cells: Vec<(f64, CellSums)> = config
        .gamma_list
        .iter()
        .map(|g| (*g, Vec::new()))
        .collect();
    for &n in &config.n_list {
        for (gi, &gamma) in config.gamma_list.iter().enumerate() {
            let mut ok = 0usize;
            let mut acc = 0.0;
            for run in 0..config.seeds {
                let params = init_cell(config, dist, n, run)?;
                match nntk::newton_step_woodbury(&params, act, data, gamma, config.alpha) {
                    Ok((step, _)) => {
                        let v = step.max_block_update();
                        acc += v;
                        ok += 1;
                        let _ = writeln!(out, "{n},{gamma},{run},{},1", fmt_f64(v));
                    }
                    Err(Error::NotPositiveDefinite { .. }) => {
                        let _ = writeln!(out, "{n},{gamma},{run},nan,0");
                    }
                    Err(other) => return Err(other),
                }
            }
            cells[gi].1.push((n, acc, ok));
        }
    }
    for (gamma, rows) in cells {
        let xs: Vec<f64> = rows
            .iter()
            .filter(|(_, _, ok)| *ok > 0)
            .map(|(n, _, _)| *n as f64)
            .collect();
        let ys: Vec<f64> = rows
            .iter()
            .filter(|(_, _, ok)| *ok > 0)
            .map(|(_, acc, ok)| acc / *ok as f64)
            .collect();
        match loglog_slope(&xs, &ys) {
            Ok((slope, intercept, r2)) => {
                let _ = writeln!(
                    out,
                    "# fit gamma={gamma} slope={} intercept={} r2={} points={}",
                    fmt_f64(slope),
                    fmt_f64(intercept),
                    fmt_f64(r2),
                    xs.len()
                );
            }
            Err(_) => {
                let _ = writeln!(out, "# fit gamma={gamma} skipped points={}", xs.len());
            }
        }
    }
    Ok(())
}

/// Operator distance between the finite-width NNTK at initialization and
/// the Monte Carlo limit NNTK, per (N, gamma, seed), with seed means.
fn render_kernel_sweep(
    config: &ExperimentConfig,
    data: &Dataset,
    dist: &InitDistribution,
    act: Activation,
    out: &mut String,
) -> Result<(), Error> {
    let est = ntk_limit_mc(dist, act, data, config.mc_samples, config.seed0)?;
    let mut limits: Vec<(f64, KernelMatrix)> = Vec::new();
    for &gamma in &config.gamma_list {
        limits.push((gamma, nntk_limit(&est.kernel, gamma)?));
    }
    let _ = writeln!(out, "n,gamma,seed,op_distance,guard_ok");
    let mut means = Vec::new();
    for &n in &config.n_list {
        for (gamma, limit_kernel) in &limits {
            let mut ok = 0usize;
            let mut acc = 0.0;
            for run in 0..config.seeds {
                let params = init_cell(config, dist, n, run)?;
                match nntk_finite(&params, act, data, *gamma) {
                    Ok(kernel) => {
                        let dist_v = nntk::kernel_distance(&kernel, limit_kernel)?;
                        acc += dist_v;
                        ok += 1;
                        let _ = writeln!(out, "{n},{gamma},{run},{},1", fmt_f64(dist_v));
                    }
                    Err(Error::NotPositiveDefinite { .. }) => {
                        let _ = writeln!(out, "{n},{gamma},{run},nan,0");
                    }
                    Err(other) => return Err(other),
                }
            }
            means.push((n, *gamma, ok, acc));
        }
    }
    for (n, gamma, ok, acc) in means {
        let mean = if ok > 0 { fmt_f64(acc / ok as f64) } else { "nan".into() };
        let _ = writeln!(
            out,
            "# mean n={n} gamma={gamma} op_distance={mean} ok={ok}/{}",
            config.seeds
        );
    }
    Ok(())
}

/// Full training trajectories per (N, gamma, seed). A guard failure here is
/// fatal: training is not a sweep over expendable cells.
fn render_train(
    config: &ExperimentConfig,
    data: &Dataset,
    dist: &InitDistribution,
    act: Activation,
    out: &mut String,
) -> Result<(), Error> {
    let mut header = String::from("n,gamma,seed,step,loss,max_block_update,min_block_eig");
    for m in 1..=data.m() {
        let _ = write!(header, ",f_{m}");
    }
    let _ = writeln!(out, "{header}");
    for &n in &config.n_list {
        for &gamma in &config.gamma_list {
            for run in 0..config.seeds {
                let params = init_cell(config, dist, n, run)?;
                let traj = train(&params, act, data, gamma, config.alpha, config.k)?;
                for step in 0..=config.k {
                    let (upd, eig) = if step == 0 {
                        ("nan".to_string(), "nan".to_string())
                    } else {
                        (
                            fmt_f64(traj.max_block_updates[step - 1]),
                            fmt_f64(traj.min_block_eigs[step - 1]),
                        )
                    };
                    let _ = write!(
                        out,
                        "{n},{gamma},{run},{step},{},{upd},{eig}",
                        fmt_f64(traj.losses[step])
                    );
                    for v in &traj.outputs[step] {
                        let _ = write!(out, ",{}", fmt_f64(*v));
                    }
                    let _ = writeln!(out);
                }
            }
        }
    }
    Ok(())
}

/// Deterministic limit trajectory with the linear-rate envelope, plus the
/// end-to-end comparison: finite-width training runs whose final residual
/// is set against the envelope at step K.
fn render_limit(
    config: &ExperimentConfig,
    data: &Dataset,
    dist: &InitDistribution,
    act: Activation,
    out: &mut String,
) -> Result<(), Error> {
    let gamma = config.gamma_list[0];
    let est = ntk_limit_mc(dist, act, data, config.mc_samples, config.seed0)?;
    let bstar = nntk_limit(&est.kernel, gamma)?;
    let report = convergence_report(&bstar, config.alpha);
    let traj = limit_trajectory(&bstar, data.ys(), config.alpha, config.k)?;
    let mut header = String::from("step,residual_norm,envelope");
    for m in 1..=data.m() {
        let _ = write!(header, ",f_{m}");
    }
    let _ = writeln!(out, "{header}");
    for step in 0..=config.k {
        let _ = write!(
            out,
            "{step},{},{}",
            fmt_f64(traj.residual_norms[step]),
            fmt_f64(traj.envelope[step])
        );
        for v in &traj.outputs[step] {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(
        out,
        "# rate gamma={gamma} lambda_min={} lambda_max={} alpha_sup={} rate={} alpha_admissible={}",
        fmt_f64(report.lambda_min),
        fmt_f64(report.lambda_max),
        fmt_f64(report.alpha_sup),
        fmt_f64(report.rate),
        report.admissible
    );
    // Finite-width end-to-end runs against the envelope at step K.
    let envelope_k = traj.envelope[config.k];
    for &n in &config.n_list {
        for run in 0..config.seeds {
            let params = init_cell(config, dist, n, run)?;
            match train(&params, act, data, gamma, config.alpha, config.k) {
                Ok(finite) => {
                    let final_res = finite
                        .outputs
                        .last()
                        .expect("trajectory is nonempty")
                        .iter()
                        .zip(data.ys())
                        .map(|(f, y)| (y - f) * (y - f))
                        .sum::<f64>();
                    let final_res = libm::sqrt(final_res);
                    let _ = writeln!(
                        out,
                        "# finite n={n} seed={run} final_residual={} envelope={} excess={} status=ok",
                        fmt_f64(final_res),
                        fmt_f64(envelope_k),
                        fmt_f64(final_res - envelope_k)
                    );
                }
                Err(Error::GuardFailedAtStep { step, .. }) => {
                    let _ = writeln!(
                        out,
                        "# finite n={n} seed={run} status=guard_failed step={step}"
                    );
                }
                Err(other) => return Err(other),
            }
        }
    }
    Ok(())
}
