//! Synthetic one-dimensional regression targets: a linear trend plus a
//! low- or high-frequency sine, sampled on a midpoint grid over [-1, 1].

use clap::ValueEnum;
use nntk::{Dataset, Result};

/// Which label function to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// `y = 2x + 0.4 sin(5 pi x)`
    #[value(name = "sin5pi")]
    Sin5Pi,
    /// `y = 2x + 0.4 sin(20 pi x)`
    #[value(name = "sin20pi")]
    Sin20Pi,
}

impl Target {
    pub fn frequency(self) -> f64 {
        match self {
            Target::Sin5Pi => 5.0,
            Target::Sin20Pi => 20.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::Sin5Pi => "sin5pi",
            Target::Sin20Pi => "sin20pi",
        }
    }
}

/// Label value `2x + 0.4 sin(omega pi x)`.
pub fn target_value(target: Target, x: f64) -> f64 {
    2.0 * x + 0.4 * libm::sin(target.frequency() * core::f64::consts::PI * x)
}

/// Midpoint grid point `m` of `1..=total` on [-1, 1]. Odd totals would put
/// a point at zero, so they get a half-cell shift; either way no grid point
/// is ever zero and all stay inside (-1, 1).
pub fn grid_point(m: usize, total: usize) -> f64 {
    if total % 2 == 0 {
        (2.0 * m as f64 - 1.0) / total as f64 - 1.0
    } else {
        (4.0 * m as f64 - 1.0) / (2.0 * total as f64) - 1.0
    }
}

/// Sample `m` labeled points of the target on the midpoint grid.
pub fn gen_dataset(target: Target, m: usize) -> Result<Dataset> {
    let xs: Vec<f64> = (1..=m).map(|k| grid_point(k, m)).collect();
    let ys: Vec<f64> = xs.iter().map(|x| target_value(target, *x)).collect();
    Dataset::new(1, xs, ys)
}
