//! Experiment harness around the `nntk` library: dataset generation, the
//! desk-scale experiments (kernel spectra, one-step loss, update-norm and
//! kernel-distance sweeps, finite training, limit dynamics), slope fitting,
//! and reproducible CSV emission.

pub mod config;
pub mod csvfmt;
pub mod dataset;
pub mod experiments;
pub mod seeding;
pub mod slope;

pub use config::{Experiment, ExperimentConfig};
pub use dataset::{gen_dataset, target_value, Target};
pub use experiments::{render_experiment, run_experiment, RunError};
pub use seeding::mix_seed;
pub use slope::loglog_slope;
