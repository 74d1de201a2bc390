//! Truncated and randomized Euler products on the critical line.

use crate::error::{Error, Result};
use crate::grid::{coarse_for_bandwidth, euler_log_on_grid, interpolate, GridField, GridSpec};
use crate::prime_tools::PrimeTable;
use crate::rng;
use num_complex::Complex64;
use rand::RngCore;
use std::f64::consts::TAU;

pub const DEFAULT_J_MAX: usize = 60;

/// Uniform phases θ_k ∈ [0, 1), k = 1..N.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomPhases {
    pub theta: Vec<f64>,
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomPhases {
    /// Fixed phases, e.g. all zero to switch the randomization off.
    pub fn from_theta(theta: Vec<f64>) -> Result<Self> {
        if theta.iter().any(|t| !(0.0..1.0).contains(t)) {
            return Err(Error::invalid("phases must lie in [0, 1)"));
        }
        Ok(RandomPhases { theta, seed: 0, stream_id: 0 })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub(crate) fn check_level(&self, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(Error::invalid(format!(
                "truncation level {n} exceeds {} sampled phases",
                self.len()
            )));
        }
        Ok(())
    }

    /// θ_k ↦ 1 − θ_k (mod 1), the phase pattern of the conjugate field.
    pub fn reflected(&self) -> Self {
        let theta = self.theta.iter().map(|&t| if t == 0.0 { 0.0 } else { 1.0 - t }).collect();
        RandomPhases { theta, seed: self.seed, stream_id: self.stream_id }
    }
}

/// θ_k is draw k of stream (seed, stream_id); longer requests extend shorter ones.
pub fn sample_phases(n: usize, seed: u64, stream_id: u64) -> RandomPhases {
    let mut r = rng::stream(seed, stream_id);
    let theta = (0..n).map(|_| rng::unit_f64(r.next_u64())).collect();
    RandomPhases { theta, seed, stream_id }
}

/// ζ_N(s) = Π_{k≤N} (1 − p_k^{−s})^{−1}.
pub fn zeta_n_eval(s: Complex64, n: usize, table: &PrimeTable) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(Error::domain(format!("truncated Euler product needs Re s > 0, got {s}")));
    }
    let primes = table.prefix(n)?;
    let mut prod = Complex64::new(1.0, 0.0);
    for &p in primes {
        prod *= 1.0 - (-s * (p as f64).ln()).exp();
    }
    Ok(prod.inv())
}

/// The factor variable z_k = p_k^{−1/2−ix} e^{2πiθ_k}.
#[inline]
fn factor_z(p: u64, theta: f64, x: f64) -> Complex64 {
    let lp = (p as f64).ln();
    Complex64::from_polar((-0.5 * lp).exp(), TAU * theta - x * lp)
}

/// ζ_{N,rand}(1/2 + ix).
pub fn zeta_rand_eval(x: f64, phases: &RandomPhases, n: usize, table: &PrimeTable) -> Result<Complex64> {
    phases.check_level(n)?;
    let primes = table.prefix(n)?;
    let mut prod = Complex64::new(1.0, 0.0);
    for (&p, &t) in primes.iter().zip(&phases.theta) {
        prod *= 1.0 - factor_z(p, t, x);
    }
    Ok(prod.inv())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSeries {
    pub value: Complex64,
    /// Upper bound on |log ζ_{N,rand} − value|.
    pub tail_bound: f64,
}

/// Σ_{j≤j_max} Σ_{k≤N} j^{−1} e^{2πijθ_k} p_k^{−j(1/2+ix)} with a tail bound.
pub fn log_zeta_rand(
    x: f64,
    phases: &RandomPhases,
    n: usize,
    table: &PrimeTable,
    j_max: usize,
) -> Result<LogSeries> {
    if j_max == 0 {
        return Err(Error::invalid("j_max must be ≥ 1"));
    }
    phases.check_level(n)?;
    let primes = table.prefix(n)?;
    let mut value = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    for (&p, &t) in primes.iter().zip(&phases.theta) {
        let z = factor_z(p, t, x);
        let mut zj = Complex64::new(1.0, 0.0);
        let mut s = Complex64::new(0.0, 0.0);
        for j in 1..=j_max {
            zj *= z;
            s += zj / j as f64;
        }
        value += s;
        tail += tail_term(p, j_max);
    }
    Ok(LogSeries { value, tail_bound: tail })
}

/// Σ_{j>J} p^{−j/2}/j ≤ r^{J+1} / ((J+1)(1−r)), r = p^{−1/2}.
fn tail_term(p: u64, j_max: usize) -> f64 {
    let r = (p as f64).powf(-0.5);
    r.powi(j_max as i32 + 1) / ((j_max + 1) as f64 * (1.0 - r))
}

/// Σ_{k≤N} Σ_{j≥j_min} p_k^{−j/2}/j, summed until terms are negligible.
pub fn higher_order_bound(n: usize, j_min: usize, table: &PrimeTable) -> Result<f64> {
    let primes = table.prefix(n)?;
    let mut total = 0.0;
    for &p in primes {
        let r = (p as f64).powf(-0.5);
        let mut rj = r.powi(j_min as i32);
        let mut j = j_min;
        loop {
            let t = rj / j as f64;
            total += t;
            if t < 1e-18 {
                break;
            }
            rj *= r;
            j += 1;
        }
    }
    Ok(total)
}

fn euler_terms(phases: &RandomPhases, n: usize, table: &PrimeTable) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    phases.check_level(n)?;
    let primes = table.prefix(n)?;
    let freq: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let amp = freq.iter().map(|l| (-0.5 * l).exp()).collect();
    let phase = phases.theta[..n].iter().map(|t| TAU * t).collect();
    Ok((amp, phase, freq))
}

/// log ζ_{N,rand}(1/2 + ix) on every grid point, factorwise principal branch.
pub fn log_field_exact(phases: &RandomPhases, n: usize, table: &PrimeTable, grid: &GridSpec) -> Result<Vec<Complex64>> {
    let (amp, phase, freq) = euler_terms(phases, n, table)?;
    Ok(euler_log_on_grid(&amp, &phase, &freq, grid))
}

/// As [`log_field_exact`], but dense grids are filled by local interpolation
/// from an exact evaluation on a coarser grid resolving every frequency log p_k.
pub fn log_field(phases: &RandomPhases, n: usize, table: &PrimeTable, grid: &GridSpec) -> Result<Vec<Complex64>> {
    let omega = if n == 0 { 0.0 } else { (table.prefix(n)?[n - 1] as f64).ln() };
    match coarse_for_bandwidth(grid, omega) {
        None => log_field_exact(phases, n, table, grid),
        Some(coarse) => {
            let cv = log_field_exact(phases, n, table, &coarse)?;
            Ok(interpolate(&coarse, &cv, grid))
        }
    }
}

/// ζ_{N,rand}(1/2 + ix) sampled on a grid.
pub fn field_on_grid(phases: &RandomPhases, n: usize, table: &PrimeTable, grid: &GridSpec) -> Result<GridField> {
    let logs = log_field(phases, n, table, grid)?;
    GridField::new(*grid, logs.into_iter().map(|l| l.exp()).collect())
}

/// ζ_N(1 + i(x − y)), the exact large-T two-point limit.
pub fn truncated_two_point(x: f64, y: f64, n: usize, table: &PrimeTable) -> Result<Complex64> {
    zeta_n_eval(Complex64::new(1.0, x - y), n, table)
}
