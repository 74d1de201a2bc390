//! Shared fixtures for the benchmarks.

use chaoslab::{Complex64, GridSpec};

/// Deterministic coefficients and frequencies for exponential-sum kernels.
pub fn exp_sum_fixture(terms: usize) -> (Vec<Complex64>, Vec<f64>) {
    let coef = (0..terms).map(|k| Complex64::from_polar(1.0 / (k as f64 + 1.0).sqrt(), 0.7 * k as f64)).collect();
    let freq = (0..terms).map(|k| (k as f64 + 2.0).ln()).collect();
    (coef, freq)
}

pub fn unit_grid(points: usize) -> GridSpec {
    GridSpec::unit(points).expect("fixture grid")
}
