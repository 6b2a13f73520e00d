//! CLI argument schema and its resolution into a validated experiment
//! configuration with per-experiment defaults.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::dataset::Target;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    /// Eigenvalues of the limit kernel and the limit NNTK per gamma.
    Spectra,
    /// Relative loss after a single Newton step, per (N, gamma, seed).
    OneStep,
    /// Largest per-neuron update norm at the first step, with log-log fits.
    ZSweep,
    /// Operator distance between the finite NNTK and its limit.
    KernelSweep,
    /// Full finite-width training trajectories.
    Train,
    /// Deterministic limit trajectory with its rate envelope and a
    /// finite-width comparison run.
    Limit,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectra => "spectra",
            Experiment::OneStep => "one-step",
            Experiment::ZSweep => "z-sweep",
            Experiment::KernelSweep => "kernel-sweep",
            Experiment::Train => "train",
            Experiment::Limit => "limit",
        }
    }
}

/// Subcommand-free argument surface; every experiment is selected with
/// `--experiment` and shares the same flags. Unset values fall back to
/// per-experiment defaults.
#[derive(Parser, Debug)]
#[command(
    name = "nntk-cli",
    version,
    about = "Desk-scale experiments for regularized Newton training of shallow networks"
)]
pub struct Cli {
    /// Which experiment to run.
    #[arg(long, value_enum)]
    pub experiment: Experiment,

    /// Comma-separated network widths.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,

    /// Comma-separated regularizer parameters.
    #[arg(long, value_delimiter = ',')]
    pub gamma_list: Option<Vec<f64>>,

    /// Newton step size.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Output scaling exponent, strictly inside (0.5, 1).
    #[arg(long)]
    pub beta: Option<f64>,

    /// Number of training samples.
    #[arg(long)]
    pub m: Option<usize>,

    /// Number of training steps (train and limit experiments).
    #[arg(long)]
    pub k: Option<usize>,

    /// Number of seeded runs per sweep cell.
    #[arg(long)]
    pub seeds: Option<usize>,

    /// Base seed; run r uses seed0 ^ splitmix64(r+1).
    #[arg(long)]
    pub seed0: Option<u64>,

    /// Monte Carlo sample count for limit-kernel estimates.
    #[arg(long)]
    pub mc_samples: Option<usize>,

    /// Label function.
    #[arg(long, value_enum)]
    pub target: Option<Target>,

    /// Half width of the uniform law for the outer weights c.
    #[arg(long)]
    pub c_halfwidth: Option<f64>,

    /// Standard deviation of the Gaussian law for (w, eta).
    #[arg(long)]
    pub w_eta_std: Option<f64>,

    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

/// Fully resolved and validated experiment configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_list: Vec<usize>,
    pub gamma_list: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub m: usize,
    pub k: usize,
    pub seeds: usize,
    pub seed0: u64,
    pub mc_samples: usize,
    pub target: Target,
    pub c_halfwidth: f64,
    pub w_eta_std: f64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn resolve(cli: Cli) -> Result<Self, String> {
        let experiment = cli.experiment;
        let (default_target, default_ns, default_gammas, default_k) = match experiment {
            Experiment::Spectra => (
                Target::Sin5Pi,
                vec![4096],
                vec![0.001, 0.1, 1.0],
                1,
            ),
            Experiment::OneStep => (
                Target::Sin5Pi,
                vec![256, 1024, 4096],
                vec![1.0, 0.1, 0.01],
                1,
            ),
            Experiment::ZSweep => (
                Target::Sin20Pi,
                vec![256, 512, 1024, 2048, 4096, 8192],
                vec![1.0, 0.1, 0.01],
                1,
            ),
            Experiment::KernelSweep => (
                Target::Sin20Pi,
                vec![256, 1024, 4096],
                vec![1.0],
                1,
            ),
            Experiment::Train => (Target::Sin5Pi, vec![4096], vec![1.0], 5),
            Experiment::Limit => (Target::Sin5Pi, vec![4096], vec![1.0], 50),
        };
        let config = ExperimentConfig {
            experiment,
            n_list: cli.n_list.unwrap_or(default_ns),
            gamma_list: cli.gamma_list.unwrap_or(default_gammas),
            alpha: cli.alpha.unwrap_or(1.0),
            beta: cli.beta.unwrap_or(0.52),
            m: cli.m.unwrap_or(16),
            k: cli.k.unwrap_or(default_k),
            seeds: cli.seeds.unwrap_or(20),
            seed0: cli.seed0.unwrap_or(0),
            mc_samples: cli.mc_samples.unwrap_or(200_000),
            target: cli.target.unwrap_or(default_target),
            c_halfwidth: cli.c_halfwidth.unwrap_or(1.0),
            w_eta_std: cli.w_eta_std.unwrap_or(1.0),
            out: cli.out,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_list.is_empty() {
            return Err("--n-list must not be empty".into());
        }
        if self.n_list.contains(&0) {
            return Err("widths must be at least 1".into());
        }
        if self.gamma_list.is_empty() {
            return Err("--gamma-list must not be empty".into());
        }
        if self.gamma_list.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err("gamma values must be finite and nonnegative".into());
        }
        if !(self.beta > 0.5 && self.beta < 1.0) {
            return Err("--beta must lie strictly inside (0.5, 1)".into());
        }
        if !self.alpha.is_finite() {
            return Err("--alpha must be finite".into());
        }
        if self.m == 0 {
            return Err("--m must be at least 1".into());
        }
        if self.k == 0 {
            return Err("--k must be at least 1".into());
        }
        if self.seeds == 0 {
            return Err("--seeds must be at least 1".into());
        }
        if self.mc_samples < 2 {
            return Err("--mc-samples must be at least 2".into());
        }
        if !(self.c_halfwidth >= 0.0 && self.c_halfwidth.is_finite()) {
            return Err("--c-halfwidth must be nonnegative and finite".into());
        }
        if !(self.w_eta_std > 0.0 && self.w_eta_std.is_finite()) {
            return Err("--w-eta-std must be positive and finite".into());
        }
        Ok(())
    }

    /// One-line config echo placed at the top of every CSV.
    pub fn provenance_line(&self) -> String {
        let ns: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        let gs: Vec<String> = self.gamma_list.iter().map(|g| g.to_string()).collect();
        format!(
            "# nntk-cli {} experiment={} target={} m={} beta={} alpha={} k={} \
             n_list={} gamma_list={} seeds={} seed0={} mc_samples={} c_halfwidth={} w_eta_std={}",
            env!("CARGO_PKG_VERSION"),
            self.experiment.name(),
            self.target.name(),
            self.m,
            self.beta,
            self.alpha,
            self.k,
            ns.join(","),
            gs.join(","),
            self.seeds,
            self.seed0,
            self.mc_samples,
            self.c_halfwidth,
            self.w_eta_std,
        )
    }
}
