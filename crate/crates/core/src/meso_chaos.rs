//! Complex Brownian integrals G[w](x) = ∫ e^{−2πixu} w(u) dB_u, the mesoscopic
//! chaos η_{a,A}, its exponent covariances, and the mesoscopic scaling check.

use crate::error::{Error, Result};
use crate::euler_field::{log_field, sample_phases};
use crate::grid::{exp_sum_on_grid, GridField, GridSpec};
use crate::prime_tools::{li_inverse, PrimeTable};
use crate::quad::{integrate, QuadOptions};
use crate::rng;
use crate::special::{ci_minus_log, si_ci};
use crate::spectral_norms::{mult_distance, windowed, SpectralProfile};
use crate::stats::median;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::Arc;

pub use crate::special::{ci, si};

/// Increments of B^ℂ = (B¹ + iB²)/√2 on [jh, (j+1)h), j < ⌈u_max/h⌉.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianGrid {
    pub u_max: f64,
    pub h: f64,
    pub increments: Vec<Complex64>,
    pub seed: u64,
}

pub fn sample_brownian(u_max: f64, h: f64, seed: u64) -> Result<BrownianGrid> {
    if !(u_max > 0.0 && h > 0.0) {
        return Err(Error::invalid("u_max and h must be positive"));
    }
    if h > u_max / 10.0 {
        return Err(Error::invalid(format!("step {h} too coarse for u_max {u_max}")));
    }
    let count = (u_max / h - 1e-9).ceil() as usize;
    let mut r = rng::stream(seed, rng::name_tag("brownian"));
    let s = (0.5 * h).sqrt();
    let increments = (0..count)
        .map(|_| {
            let a: f64 = StandardNormal.sample(&mut r);
            let b: f64 = StandardNormal.sample(&mut r);
            Complex64::new(a * s, b * s)
        })
        .collect();
    Ok(BrownianGrid { u_max, h, increments, seed })
}

impl BrownianGrid {
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// Left point of increment j.
    pub fn u(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    /// Increments whose left points lie in [lo, hi).
    pub fn index_range(&self, lo: f64, hi: f64) -> Result<std::ops::Range<usize>> {
        if !(lo >= 0.0 && hi >= lo) {
            return Err(Error::invalid(format!("bad window [{lo}, {hi}]")));
        }
        let end = (hi / self.h - 1e-9).ceil() as usize;
        if end > self.len() {
            return Err(Error::invalid(format!("Brownian grid covers [0, {}], window needs {hi}", self.len() as f64 * self.h)));
        }
        let start = ((lo / self.h - 1e-9).ceil() as usize).min(end);
        Ok(start..end)
    }
}

/// Frequency weight w(u).
#[derive(Clone)]
pub enum Weight {
    /// u^{−1/2}.
    InvSqrt,
    /// √(2Ĉ(u)), Ĉ(u) = Si(2πu)/(πu).
    TwoCHatSqrt,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Weight {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Weight::InvSqrt => u.sqrt().recip(),
            Weight::TwoCHatSqrt => c_hat(u).map(|c| (2.0 * c).sqrt()).unwrap_or(f64::INFINITY),
            Weight::Custom(f) => f(u),
        }
    }
}

impl std::fmt::Debug for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Weight::InvSqrt => write!(f, "InvSqrt"),
            Weight::TwoCHatSqrt => write!(f, "TwoCHatSqrt"),
            Weight::Custom(_) => write!(f, "Custom"),
        }
    }
}

fn ito_terms(weight: &Weight, lo: f64, hi: f64, bm: &BrownianGrid, centered: bool) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let range = bm.index_range(lo, hi)?;
    let mut coef = Vec::with_capacity(range.len());
    let mut freq = Vec::with_capacity(range.len());
    for j in range {
        let u = bm.u(j);
        // the centered kernel vanishes at u = 0 whatever the weight does
        if centered && u == 0.0 {
            continue;
        }
        let w = weight.eval(u);
        if !w.is_finite() {
            return Err(Error::invalid(format!("weight is not finite at u = {u}; shift the window edge")));
        }
        coef.push(bm.increments[j] * w);
        freq.push(TAU * u);
    }
    Ok((coef, freq))
}

/// Left-point Itô sum Σ_j e^{−2πixu_j} w(u_j) ΔB_j over u_j ∈ [lo, hi).
pub fn stochastic_field(grid: &GridSpec, weight: &Weight, window: (f64, f64), bm: &BrownianGrid) -> Result<GridField> {
    let (coef, freq) = ito_terms(weight, window.0, window.1, bm, false)?;
    GridField::new(*grid, exp_sum_on_grid(&coef, &freq, grid))
}

/// Σ_j (e^{−2πixu_j} − 1) w(u_j) ΔB_j; the u = 0 term is zero and skipped.
pub fn centered_field(grid: &GridSpec, weight: &Weight, window: (f64, f64), bm: &BrownianGrid) -> Result<GridField> {
    let (coef, freq) = ito_terms(weight, window.0, window.1, bm, true)?;
    let at0: Complex64 = coef.iter().sum();
    let v = exp_sum_on_grid(&coef, &freq, grid);
    GridField::new(*grid, v.into_iter().map(|z| z - at0).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MesoWindow {
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
}

impl MesoWindow {
    pub fn new(a: f64, big_a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0 && big_a >= 1.0 && big_a.is_finite()) {
            return Err(Error::invalid(format!("need 0 < a ≤ 1 ≤ A, got a={a}, A={big_a}")));
        }
        Ok(MesoWindow { a, big_a })
    }

    /// Window of ζ_{N,rand}(½ + iδx): [δ, δ log li⁻¹(N+1)], with A raised to 1 when
    /// the upper end falls below it.
    pub fn for_zeta(delta: f64, n: usize) -> Result<(Self, f64)> {
        let l = li_inverse(n as f64 + 1.0)?.ln();
        Ok((Self::new(delta, (delta * l).max(1.0))?, delta * l))
    }

    /// Step used for η draws: resolves both the lower edge and unit oscillations.
    pub fn step(&self) -> f64 {
        (self.a / 10.0).min(0.01)
    }
}

fn check_step(bm: &BrownianGrid, a: f64) -> Result<()> {
    if bm.h > a / 10.0 * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("step {} exceeds a/10 = {}", bm.h, a / 10.0)));
    }
    Ok(())
}

/// log η_{a,A}: ∫_a^1 (e^{−2πixu} − 1)u^{−1/2} dB + ∫_1^A e^{−2πixu}u^{−1/2} dB.
pub fn eta_exponent(grid: &GridSpec, window: &MesoWindow, bm: &BrownianGrid) -> Result<GridField> {
    check_step(bm, window.a)?;
    let low = centered_field(grid, &Weight::InvSqrt, (window.a, 1.0), bm)?;
    let high = stochastic_field(grid, &Weight::InvSqrt, (1.0, window.big_a), bm)?;
    GridField::new(*grid, low.values.iter().zip(&high.values).map(|(a, b)| a + b).collect())
}

pub fn eta_field(grid: &GridSpec, window: &MesoWindow, bm: &BrownianGrid) -> Result<GridField> {
    let e = eta_exponent(grid, window, bm)?;
    Ok(e.map(|_, v| v.exp()))
}

/// Y_δ = ∫_δ^1 u^{−1/2} dB.
pub fn y_delta_sample(delta: f64, bm: &BrownianGrid) -> Result<Complex64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    check_step(bm, delta)?;
    let range = bm.index_range(delta, 1.0)?;
    Ok(range.map(|j| bm.increments[j] / bm.u(j).sqrt()).sum())
}

/// ∫_0^δ (e^{−2πixu} − 1)u^{−1/2} dB, the piece that makes up h_δ.
pub fn h_delta_piece(grid: &GridSpec, delta: f64, bm: &BrownianGrid) -> Result<GridField> {
    centered_field(grid, &Weight::InvSqrt, (0.0, delta), bm)
}

/// ∫_lo^hi e^{−iνu}/u du.
fn exp_over_u(nu: f64, lo: f64, hi: f64) -> Result<Complex64> {
    if nu == 0.0 {
        return Ok(Complex64::new((hi / lo).ln(), 0.0));
    }
    let s = nu.abs();
    let (sh, ch) = si_ci(s * hi)?;
    let (sl, cl) = si_ci(s * lo)?;
    Ok(Complex64::new(ch - cl, -nu.signum() * (sh - sl)))
}

/// ∫_a^1 (e^{−iνu} − 1)/u du.
fn centered_over_u(nu: f64, a: f64) -> Result<Complex64> {
    if nu == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s = nu.abs();
    let (s1, _) = si_ci(s)?;
    let (sa, _) = si_ci(s * a)?;
    Ok(Complex64::new(ci_minus_log(s) - ci_minus_log(s * a), -nu.signum() * (s1 - sa)))
}

/// K(x, y) = E[E(x) conj E(y)] for the η exponent E.
fn exponent_kernel(x: f64, y: f64, window: &MesoWindow) -> Result<Complex64> {
    let (w, wx, wy) = (TAU * (x - y), TAU * x, TAU * y);
    Ok(centered_over_u(w, window.a)? - centered_over_u(wx, window.a)? - centered_over_u(-wy, window.a)?
        + exp_over_u(w, 1.0, window.big_a)?)
}

/// (E[Re E(x) Re E(y)], E[Re E(x) Im E(y)]) for the η_{a,A} exponent, in closed
/// form through Si and Ci.
pub fn meso_cross_covariance(x: f64, y: f64, window: &MesoWindow) -> Result<(f64, f64)> {
    if x == y {
        return Err(Error::domain("the cross covariance has a sign jump at x = y"));
    }
    let k = exponent_kernel(x, y, window)?;
    Ok((0.5 * k.re, -0.5 * k.im))
}

/// The same pair by direct adaptive quadrature of the kernel.
pub fn meso_cross_covariance_quadrature(x: f64, y: f64, window: &MesoWindow, opts: QuadOptions) -> Result<(f64, f64)> {
    if x == y {
        return Err(Error::domain("the cross covariance has a sign jump at x = y"));
    }
    let low = |u: f64| {
        let a = Complex64::from_polar(1.0, -TAU * x * u) - 1.0;
        let b = Complex64::from_polar(1.0, -TAU * y * u) - 1.0;
        a * b.conj() / u
    };
    let high = |u: f64| Complex64::from_polar(1.0 / u, -TAU * (x - y) * u);
    let mut k = Complex64::new(0.0, 0.0);
    // split at integers so each panel sees at most a few oscillations
    let mut edges = vec![window.a, 1.0];
    let mut e = 1.0;
    while e < window.big_a {
        e = (e + 1.0).min(window.big_a);
        edges.push(e);
    }
    for (i, pair) in edges.windows(2).enumerate() {
        if pair[1] <= pair[0] {
            continue;
        }
        k += if i == 0 {
            crate::quad::integrate_complex(low, pair[0], pair[1], opts)?
        } else {
            crate::quad::integrate_complex(high, pair[0], pair[1], opts)?
        };
    }
    Ok((0.5 * k.re, -0.5 * k.im))
}

/// E|E(x)|² = ∫_a^1 |e^{−2πixu} − 1|²/u du + log A.
pub fn eta_exponent_variance(x: f64, window: &MesoWindow) -> Result<f64> {
    let low = integrate(|u| 2.0 * (1.0 - (TAU * x * u).cos()) / u, window.a, 1.0, QuadOptions::default())?;
    Ok(low + window.big_a.ln())
}

/// Ĉ(k) = Si(2πk)/(πk).
pub fn c_hat(k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::domain(format!("Ĉ needs k > 0, got {k}")));
    }
    Ok(si_ci(TAU * k)?.0 / (PI * k))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MesoScalingReport {
    pub delta: f64,
    pub n: usize,
    pub draws: usize,
    pub window: MesoWindow,
    /// δ·log li⁻¹(N+1); the scaling statement wants this large.
    pub delta_log_height: f64,
    pub precondition_met: bool,
    pub median_mult_distance: f64,
    pub distances: Vec<f64>,
}

/// Points on (0,1) used for mesoscopic fields.
pub fn meso_grid() -> GridSpec {
    GridSpec::unit(257).expect("static grid")
}

/// ζ_{N,rand}(½ + iδx) for x on `grid`.
pub fn scaled_zeta_field(phases: &crate::euler_field::RandomPhases, n: usize, delta: f64, grid: &GridSpec, table: &PrimeTable) -> Result<GridField> {
    let scaled = GridSpec::new(grid.x0 * delta, grid.x1 * delta, grid.n_points)?;
    let logs = log_field(phases, n, table, &scaled)?;
    GridField::new(*grid, logs.into_iter().map(|l| l.exp()).collect())
}

/// Draw i of an η field with the given window; Brownian seed derived from (seed, i).
pub fn eta_draw(window: &MesoWindow, grid: &GridSpec, seed: u64, i: u64) -> Result<GridField> {
    let bm = sample_brownian(window.big_a.max(1.0) + window.step(), window.step(), rng::derive(seed, i))?;
    eta_field(grid, window, &bm)
}

/// Distribution of mult_distance between windowed ζ_{N,rand}(½ + iδ·) fields and
/// independent η fields with the matching truncation window.
pub fn meso_scaling_check(delta: f64, n: usize, n_draws: usize, alpha: f64, table: &PrimeTable, seed: u64) -> Result<MesoScalingReport> {
    if !(delta > 0.0 && delta <= 1.0) || (delta.log2() - delta.log2().round()).abs() > 1e-12 {
        return Err(Error::invalid(format!("delta must be a power 2^-j, got {delta}")));
    }
    if n_draws == 0 {
        return Err(Error::invalid("need at least one draw"));
    }
    let (window, dl) = MesoWindow::for_zeta(delta, n)?;
    let profile = SpectralProfile::new(alpha)?;
    let grid = meso_grid();
    let eta_seed = rng::derive(seed, rng::name_tag("meso-eta"));
    let distances = (0..n_draws as u64)
        .into_par_iter()
        .map(|i| {
            let z = windowed(&scaled_zeta_field(&sample_phases(n, seed, i), n, delta, &grid, table)?);
            let e = windowed(&eta_draw(&window, &grid, eta_seed, i)?);
            mult_distance(&z, &e, &profile)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(MesoScalingReport {
        delta,
        n,
        draws: n_draws,
        window,
        delta_log_height: dl,
        precondition_met: dl >= 10.0,
        median_mult_distance: median(&distances),
        distances,
    })
}

/// mult_distance between pairs of independent η draws: the floor any
/// distributional comparison can reach.
pub fn eta_self_distance(window: &MesoWindow, n_draws: usize, alpha: f64, seed: u64) -> Result<Vec<f64>> {
    let profile = SpectralProfile::new(alpha)?;
    let grid = meso_grid();
    (0..n_draws as u64)
        .into_par_iter()
        .map(|i| {
            let a = windowed(&eta_draw(window, &grid, seed, 2 * i)?);
            let b = windowed(&eta_draw(window, &grid, seed, 2 * i + 1)?);
            mult_distance(&a, &b, &profile)
        })
        .collect()
}

/// Scalar standard complex normal, used where only a reference law is needed.
pub fn complex_normal(seed: u64, i: u64) -> Complex64 {
    let mut r = rng::stream(seed, i);
    let a: f64 = StandardNormal.sample(&mut r);
    let b: f64 = StandardNormal.sample(&mut r);
    Complex64::new(a, b) * FRAC_1_SQRT_2
}
