//! Ordinary least squares on log-log axes, for fitting empirical decay
//! rates out of sweep results.

use nntk::{Error, Result};

/// Fit `ln y = slope * ln x + intercept` by least squares and report
/// `(slope, intercept, r_squared)`. Requires at least two points, all
/// strictly positive. Constant `y` gives slope 0 with `r_squared = 1`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::Input("x and y lengths differ".into()));
    }
    if xs.len() < 2 {
        return Err(Error::Input("need at least two points".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Input("log-log fit needs positive finite values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| libm::log(*v)).collect();
    let ly: Vec<f64> = ys.iter().map(|v| libm::log(*v)).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Input("x values must not all coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok((slope, intercept, r_squared))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs: Vec<f64> = (1..=20).map(|k| k as f64 * 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| libm::pow(*x, -0.48)).collect();
        let (slope, _, r2) = loglog_slope(&xs, &ys).unwrap();
        assert!((slope + 0.48).abs() <= 1e-12);
        assert!((r2 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn constant_values_fit_slope_zero() {
        let xs = [1.0, 2.0, 4.0];
        let ys = [3.5, 3.5, 3.5];
        let (slope, _, r2) = loglog_slope(&xs, &ys).unwrap();
        assert_eq!(slope, 0.0);
        assert_eq!(r2, 1.0);
    }

    #[test]
    fn noisy_quadratic_recovers_the_exponent() {
        // y = 3 x^2 with 1% multiplicative noise over 20 points.
        let xs: Vec<f64> = (1..=20).map(|k| k as f64).collect();
        let noise = [
            1.009, 0.994, 1.007, 0.992, 1.003, 0.998, 1.010, 0.991, 1.005, 0.996,
            1.001, 0.999, 1.008, 0.993, 1.004, 0.997, 1.006, 0.995, 1.002, 1.000,
        ];
        let ys: Vec<f64> = xs
            .iter()
            .zip(&noise)
            .map(|(x, e)| 3.0 * x * x * e)
            .collect();
        let (slope, intercept, _) = loglog_slope(&xs, &ys).unwrap();
        assert!((slope - 2.0).abs() <= 0.05, "slope {slope}");
        assert!((libm::exp(intercept) - 3.0).abs() <= 0.2);
    }

    #[test]
    fn rejects_nonpositive_values() {
        assert!(loglog_slope(&[1.0, 2.0], &[1.0, 0.0]).is_err());
        assert!(loglog_slope(&[1.0, -2.0], &[1.0, 1.0]).is_err());
        assert!(loglog_slope(&[1.0], &[1.0]).is_err());
    }
}
