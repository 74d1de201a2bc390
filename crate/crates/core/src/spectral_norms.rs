//! Negative-order Sobolev norms (whole line and circle), the Z-norm series,
//! the multiplicative-equivalence metric and empirical Wasserstein distances.
//!
//! Convention: f̂(ξ) = ∫ e^{−2πiξx} f(x) dx. Norm functions return squared norms.

use crate::assignment;
use crate::error::{Error, Result};
use crate::euler_field::zeta_n_eval;
use crate::grid::{GridField, GridSpec};
use crate::prime_tools::{smooth_mask, PrimeTable};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

/// Weight (1+ξ²)^{−α} with α > ½, integrated over |ξ| ≤ xi_max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralProfile {
    pub alpha: f64,
    /// None: a quarter of the sampling rate, 1/(4Δx).
    pub xi_max: Option<f64>,
    /// Minimum DFT length; None: four times the sample count.
    pub n_freq: Option<usize>,
}

impl SpectralProfile {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.5) {
            return Err(Error::invalid(format!("alpha must exceed 1/2, got {alpha}")));
        }
        Ok(SpectralProfile { alpha, xi_max: None, n_freq: None })
    }

    pub fn with_xi_max(mut self, xi_max: f64) -> Result<Self> {
        if !(xi_max > 0.0) {
            return Err(Error::invalid("xi_max must be positive"));
        }
        self.xi_max = Some(xi_max);
        Ok(self)
    }

    fn weight(&self, xi: f64) -> f64 {
        (1.0 + xi * xi).powf(-self.alpha)
    }
}

type Evaluator = Box<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// f̂ evaluable at any real frequency.
pub struct FourierProbe {
    eval: Evaluator,
    pub description: String,
}

impl FourierProbe {
    pub fn new(description: impl Into<String>, eval: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        FourierProbe { eval: Box::new(eval), description: description.into() }
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| Complex64::new(0.0, 0.0))
    }

    /// f(x) = e^{−πx²}, self-dual.
    pub fn gaussian() -> Self {
        Self::new("gaussian", |xi| Complex64::new((-PI * xi * xi).exp(), 0.0))
    }

    /// Trapezoid Fourier sum of the samples; valid when the field vanishes at the grid ends.
    pub fn from_field(field: &GridField) -> Self {
        let pts = field.grid.points();
        let w = field.grid.trapezoid_weights();
        let vals: Vec<Complex64> = field.values.iter().zip(&w).map(|(v, w)| v * w).collect();
        Self::new("sampled field", move |xi| {
            pts.iter().zip(&vals).map(|(&x, v)| v * Complex64::from_polar(1.0, -TAU * xi * x)).sum()
        })
    }

    pub fn at(&self, xi: f64) -> Complex64 {
        (self.eval)(xi)
    }
}

impl std::fmt::Debug for FourierProbe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierProbe").field("description", &self.description).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSum {
    pub value: f64,
    /// Partial sums never decreased (fails only on non-finite terms).
    pub monotone: bool,
}

fn z_terms(probe: &FourierProbe, n_max: usize, keep: impl Fn(usize) -> bool) -> PartialSum {
    let mut value = 0.0;
    let mut monotone = true;
    for n in 1..=n_max {
        if !keep(n) {
            continue;
        }
        let g = probe.at((n as f64).ln() / TAU);
        let next = value + g.norm_sqr() / n as f64;
        monotone &= next >= value;
        value = next;
    }
    PartialSum { value, monotone }
}

/// ‖f‖²_Z truncated: Σ_{n≤n_max} |f̂(log n / 2π)|²/n.
pub fn z_norm_sq(probe: &FourierProbe, n_max: usize) -> Result<PartialSum> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be positive"));
    }
    Ok(z_terms(probe, n_max, |_| true))
}

/// ‖f‖²_{Z,N}: the same series over p_N-smooth n only.
pub fn z_norm_smooth_sq(probe: &FourierProbe, n: usize, n_max: usize, table: &PrimeTable) -> Result<PartialSum> {
    if n_max == 0 || n == 0 {
        return Err(Error::invalid("n and n_max must be positive"));
    }
    table.prefix(n)?;
    let mask = smooth_mask(n_max, table.nth(n));
    Ok(z_terms(probe, n_max, |k| mask[k]))
}

fn fft_plan(len: usize) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<(FftPlanner<f64>, HashMap<usize, Arc<dyn Fft<f64>>>)>> = OnceLock::new();
    let mut guard = PLANS
        .get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    let (planner, cache) = &mut *guard;
    cache.entry(len).or_insert_with(|| planner.plan_fft_forward(len)).clone()
}

/// Frequencies and transform values of a sampled field on |ξ| ≤ xi_max.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub xi: Vec<f64>,
    pub values: Vec<Complex64>,
    pub d_xi: f64,
}

/// Trapezoid-weighted DFT, zero-padded, restricted to |ξ| ≤ xi_max. The common
/// phase e^{−2πiξx₀} is included so the values approximate f̂ itself.
pub fn spectrum(field: &GridField, profile: &SpectralProfile) -> Result<Spectrum> {
    let n = field.n_points();
    if n < 8 {
        return Err(Error::invalid(format!("operational norm needs ≥ 8 samples, got {n}")));
    }
    let h = field.grid.spacing();
    let len = (4 * n).max(profile.n_freq.unwrap_or(0));
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for ((b, v), w) in buf.iter_mut().zip(&field.values).zip(field.grid.trapezoid_weights()) {
        *b = v * w;
    }
    fft_plan(len).process(&mut buf);
    let d_xi = 1.0 / (len as f64 * h);
    let xi_max = profile.xi_max.unwrap_or(0.25 / h).min(0.5 / h);
    let mut xi = Vec::new();
    let mut values = Vec::new();
    for (k, b) in buf.into_iter().enumerate() {
        let kk = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
        let f = kk * d_xi;
        if f.abs() <= xi_max {
            xi.push(f);
            values.push(b * Complex64::from_polar(1.0, -TAU * f * field.grid.x0));
        }
    }
    Ok(Spectrum { xi, values, d_xi })
}

fn weighted_inner(a: &Spectrum, b: &Spectrum, profile: &SpectralProfile) -> Complex64 {
    a.xi.iter()
        .zip(a.values.iter().zip(&b.values))
        .map(|(&xi, (u, v))| u * v.conj() * profile.weight(xi))
        .sum::<Complex64>()
        * a.d_xi
}

/// Operational ‖f‖²_{W^{−α,2}(ℝ)}: ∫_{|ξ|≤xi_max} (1+ξ²)^{−α}|f̂(ξ)|² dξ on DFT bins.
/// Equivalent to the true norm up to constants; use for relative comparisons.
pub fn sobolev_norm_neg_sq(field: &GridField, profile: &SpectralProfile) -> Result<f64> {
    let s = spectrum(field, profile)?;
    Ok(weighted_inner(&s, &s, profile).re)
}

/// Σ_j (1+j²)^{−α}|f̂_j|² for a finitely supported two-sided sequence (j, f̂_j).
pub fn circle_sobolev_norm_sq(coeffs: &[(i64, Complex64)], alpha: f64) -> f64 {
    coeffs.iter().map(|&(j, c)| (1.0 + (j as f64).powi(2)).powf(-alpha) * c.norm_sqr()).sum()
}

/// Multiplies by (1+x²)^{−1}.
pub fn regularize(field: &GridField) -> GridField {
    field.map(|x, v| v / (1.0 + x * x))
}

/// Smooth cutoff on [0,1]: 0 at the ends, 1 on [0.05, 0.95], raised-cosine ramps.
pub fn unit_window(x: f64) -> f64 {
    const RAMP: f64 = 0.05;
    if !(0.0..=1.0).contains(&x) {
        0.0
    } else if x < RAMP {
        0.5 - 0.5 * (PI * x / RAMP).cos()
    } else if x > 1.0 - RAMP {
        0.5 - 0.5 * (PI * (1.0 - x) / RAMP).cos()
    } else {
        1.0
    }
}

/// Field restricted to (0,1) through [`unit_window`].
pub fn windowed(field: &GridField) -> GridField {
    field.map(|x, v| v * unit_window(x))
}

/// min over |λ| = 1 of ‖u/‖u‖ − λv/‖v‖‖, which equals √(2 − 2|⟨û, v̂⟩_w|/(‖u‖‖v‖));
/// the optimal λ is the phase of ⟨û, v̂⟩_w.
pub fn mult_distance(u: &GridField, v: &GridField, profile: &SpectralProfile) -> Result<f64> {
    if u.grid != v.grid {
        return Err(Error::invalid("mult_distance needs fields on the same grid"));
    }
    let su = spectrum(u, profile)?;
    let sv = spectrum(v, profile)?;
    let nu = weighted_inner(&su, &su, profile).re;
    let nv = weighted_inner(&sv, &sv, profile).re;
    if !(nu > 0.0 && nv > 0.0) {
        return Err(Error::invalid("mult_distance of a field with zero norm"));
    }
    // residual at the optimal phase; summing it directly avoids the
    // cancellation in 2 − 2|⟨·,·⟩| when u and v are nearly proportional
    let inner = weighted_inner(&su, &sv, profile);
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
    let (a, b) = (nu.sqrt().recip(), phase / nv.sqrt());
    let d2: f64 = su.xi.iter()
        .zip(su.values.iter().zip(&sv.values))
        .map(|(&xi, (x, y))| (x * a - y * b).norm_sqr() * profile.weight(xi))
        .sum::<f64>()
        * su.d_xi;
    Ok(d2.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerIdentityReport {
    /// Σ_{n p_N-smooth} f̂(log n/2π) conj ĝ(log n/2π) / n.
    pub series: Complex64,
    /// ∫∫ f(x) ζ_N(1+i(x−y)) conj g(y) dx dy.
    pub integral: Complex64,
    pub abs_diff: f64,
    /// Change of the integral side when the grid is halved.
    pub quad_error_estimate: f64,
}

/// Logs of all p_N-smooth integers with log n ≤ log_max.
fn smooth_logs(primes: &[u64], log_max: f64, cap: usize) -> Result<Vec<f64>> {
    let lp: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    let mut out = vec![0.0];
    for &l in &lp {
        let current = out.len();
        for i in 0..current {
            let mut v = out[i] + l;
            while v <= log_max {
                out.push(v);
                if out.len() > cap {
                    return Err(Error::range(format!("more than {cap} smooth numbers below e^{log_max}")));
                }
                v += l;
            }
        }
    }
    Ok(out)
}

fn double_integral(f: &GridField, g: &GridField, n: usize, table: &PrimeTable, stride: usize) -> Result<Complex64> {
    let pick = |field: &GridField| -> (Vec<f64>, Vec<Complex64>) {
        let m = (field.n_points() - 1) / stride + 1;
        let grid = GridSpec::new(field.grid.x0, field.grid.x(stride * (m - 1)), m).expect("subgrid");
        let w = grid.trapezoid_weights();
        let v = (0..m).map(|i| field.values[i * stride] * w[i]).collect();
        (grid.points(), v)
    };
    let (xs, fv) = pick(f);
    let (ys, gv) = pick(g);
    let mut total = Complex64::new(0.0, 0.0);
    let mut cache: HashMap<i64, Complex64> = HashMap::new();
    let same = f.grid == g.grid;
    let h = f.grid.spacing() * stride as f64;
    for (i, (&x, a)) in xs.iter().zip(&fv).enumerate() {
        if *a == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, (&y, b)) in ys.iter().zip(&gv).enumerate() {
            let k = if same {
                let key = i as i64 - j as i64;
                match cache.get(&key) {
                    Some(v) => *v,
                    None => {
                        let v = zeta_n_eval(Complex64::new(1.0, key as f64 * h), n, table)?;
                        cache.insert(key, v);
                        v
                    }
                }
            } else {
                zeta_n_eval(Complex64::new(1.0, x - y), n, table)?
            };
            total += a * k * b.conj();
        }
    }
    Ok(total)
}

/// Checks ⟨f,g⟩_{Z,N} = ∫∫ f(x) ζ_N(1+i(x−y)) conj g(y) dx dy by computing
/// both sides independently. f and g should vanish at their grid ends.
pub fn z_inner_identity_check(f: &GridField, g: &GridField, n: usize, table: &PrimeTable) -> Result<InnerIdentityReport> {
    if f.n_points() < 9 || g.n_points() < 9 {
        return Err(Error::invalid("need at least 9 samples per field"));
    }
    let primes = table.prefix(n)?;
    // the 1/n weight makes the series tail beyond e^40 negligible for bounded f̂, ĝ
    let logs = smooth_logs(primes, 40.0, 2_000_000)?;
    let pf = FourierProbe::from_field(f);
    let pg = FourierProbe::from_field(g);
    let series: Complex64 = logs
        .iter()
        .map(|&l| {
            let xi = l / TAU;
            pf.at(xi) * pg.at(xi).conj() * (-l).exp()
        })
        .sum();
    let integral = double_integral(f, g, n, table, 1)?;
    let coarse = double_integral(f, g, n, table, 2)?;
    Ok(InnerIdentityReport {
        series,
        integral,
        abs_diff: (series - integral).norm(),
        quad_error_estimate: (integral - coarse).norm(),
    })
}

/// Exact W₁ between equal-size samples on the line (sorted matching).
pub fn wasserstein_real(a: &[f64], b: &[f64]) -> Result<f64> {
    check_sizes(a.len(), b.len())?;
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64)
}

/// Exact W₁ between equal-size planar samples by optimal assignment.
pub fn wasserstein_planar(a: &[[f64; 2]], b: &[[f64; 2]]) -> Result<f64> {
    check_sizes(a.len(), b.len())?;
    let (_, total) = assignment::solve(a.len(), |i, j| (a[i][0] - b[j][0]).hypot(a[i][1] - b[j][1]))?;
    Ok(total / a.len() as f64)
}

pub enum Samples<'a> {
    Real(&'a [f64]),
    Planar(&'a [[f64; 2]]),
}

pub fn wasserstein_empirical(a: Samples, b: Samples) -> Result<f64> {
    match (a, b) {
        (Samples::Real(a), Samples::Real(b)) => wasserstein_real(a, b),
        (Samples::Planar(a), Samples::Planar(b)) => wasserstein_planar(a, b),
        _ => Err(Error::invalid("cannot compare real and planar samples")),
    }
}

fn check_sizes(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("sample counts differ: {a} vs {b}")));
    }
    if a == 0 || a > 2048 {
        return Err(Error::invalid(format!("sample count {a} outside 1..=2048")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss_field::planar_gaussian_samples;
    use crate::prime_tools::build_prime_table;
    use crate::quad::{integrate, QuadOptions};
    use crate::rng;
    use rand::Rng;

    fn bump(c: f64, r: f64) -> impl Fn(f64) -> f64 {
        move |x| {
            let t = (x - c) / r;
            if t.abs() < 1.0 { (-1.0 / (1.0 - t * t)).exp() } else { 0.0 }
        }
    }

    #[test]
    fn z_norm_gaussian() {
        let p = FourierProbe::gaussian();
        let full = z_norm_sq(&p, 1_000_000).unwrap();
        assert!(full.monotone);
        let oracle: f64 = (1..=1_000_000u64).map(|n| (-(n as f64).ln().powi(2) / TAU).exp() / n as f64).sum();
        assert!((full.value - oracle).abs() < 1e-12);
        let half = z_norm_sq(&p, 500_000).unwrap().value;
        assert!(half <= full.value && full.value - half < 1e-8);
        assert_eq!(z_norm_sq(&FourierProbe::zero(), 100).unwrap().value, 0.0);
        assert!(z_norm_sq(&p, 0).is_err());
    }

    #[test]
    fn z_norm_smooth_limits() {
        let t = build_prime_table(2000).unwrap();
        let p = FourierProbe::gaussian();
        let n_max = 10_000;
        let full = z_norm_sq(&p, n_max).unwrap().value;
        let mut prev = 0.0;
        for level in [1, 3, 10, 100, 1229] {
            let v = z_norm_smooth_sq(&p, level, n_max, &t).unwrap().value;
            assert!(v >= prev && v <= full + 1e-15);
            prev = v;
        }
        // p_1229 = 9973 and 10007 is prime, so every n ≤ 10⁴ is smooth
        assert!((prev - full).abs() < 1e-15);
    }

    #[test]
    fn spike_norm() {
        let g = GridSpec::new(-1.0, 1.0, 2001).unwrap();
        let h = g.spacing();
        let mut f = GridField::zeros(g);
        f.values[1000] = Complex64::new(1.0 / h, 0.0);
        let v = sobolev_norm_neg_sq(&f, &SpectralProfile::new(1.0).unwrap()).unwrap();
        assert!((v / PI - 1.0).abs() < 0.05, "{v}");
        assert_eq!(sobolev_norm_neg_sq(&GridField::zeros(g), &SpectralProfile::new(1.0).unwrap()).unwrap(), 0.0);
        let small = GridField::zeros(GridSpec::unit(7).unwrap());
        assert!(sobolev_norm_neg_sq(&small, &SpectralProfile::new(1.0).unwrap()).is_err());
        assert!(SpectralProfile::new(0.5).is_err());
    }

    #[test]
    fn gaussian_spectrum_matches_transform() {
        let g = GridSpec::new(-6.0, 6.0, 1201).unwrap();
        let f = GridField::from_fn(g, |x| Complex64::new((-PI * x * x).exp(), 0.0));
        let s = spectrum(&f, &SpectralProfile::new(1.0).unwrap()).unwrap();
        for (xi, v) in s.xi.iter().zip(&s.values) {
            assert!((v - Complex64::new((-PI * xi * xi).exp(), 0.0)).norm() < 1e-10);
        }
        let prof = SpectralProfile::new(0.75).unwrap();
        let want = integrate(|xi| (1.0 + xi * xi).powf(-0.75) * (-TAU * xi * xi).exp(), -8.0, 8.0, QuadOptions::default()).unwrap();
        let got = sobolev_norm_neg_sq(&f, &prof).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn dilation_bound() {
        let bump = bump(0.0, 1.0);
        let g = GridSpec::new(-8.0, 8.0, 4001).unwrap();
        for alpha in [0.75, 1.0] {
            let prof = SpectralProfile::new(alpha).unwrap().with_xi_max(60.0).unwrap();
            let base = sobolev_norm_neg_sq(&GridField::from_fn(g, |x| bump(x).into()), &prof).unwrap().sqrt();
            for d in [0.5, 0.25] {
                let dil = sobolev_norm_neg_sq(&GridField::from_fn(g, |x| bump(d * x).into()), &prof).unwrap().sqrt();
                assert!(dil <= 1.05 * d.powf(-1.0 - 2.0 * alpha) * base, "{alpha} {d}");
            }
        }
    }

    #[test]
    fn circle_norms() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(circle_sobolev_norm_sq(&[(0, one)], 1.0), 1.0);
        assert_eq!(circle_sobolev_norm_sq(&[(1, one)], 1.0), 0.5);
        // DFT oracle: coefficients of a trigonometric polynomial recovered from samples
        let coeffs = [(-2i64, Complex64::new(0.5, 0.1)), (1, Complex64::new(-0.3, 0.7)), (3, one)];
        let m = 16;
        let samples: Vec<Complex64> = (0..m)
            .map(|k| {
                let th = TAU * k as f64 / m as f64;
                coeffs.iter().map(|&(j, c)| c * Complex64::from_polar(1.0, j as f64 * th)).sum()
            })
            .collect();
        let recovered: Vec<(i64, Complex64)> = (-7i64..=8)
            .map(|j| {
                let c: Complex64 = samples.iter().enumerate()
                    .map(|(k, v)| v * Complex64::from_polar(1.0, -TAU * (j * k as i64) as f64 / m as f64))
                    .sum();
                (j, c / m as f64)
            })
            .collect();
        let a = circle_sobolev_norm_sq(&coeffs, 0.8);
        let b = circle_sobolev_norm_sq(&recovered, 0.8);
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn circle_dilation_bound() {
        let g = GridSpec::new(-1.0, 2.0, 3001).unwrap();
        let alpha = 0.75;
        let prof = SpectralProfile::new(alpha).unwrap();
        let mut r = rng::stream(17, 0);
        for _ in 0..5 {
            let coeffs: Vec<(i64, Complex64)> = (-6i64..=6)
                .map(|j| (j, Complex64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5)))
                .collect();
            let circ = circle_sobolev_norm_sq(&coeffs, alpha).sqrt();
            for eps in [0.5, 0.25, 0.125] {
                let f = GridField::from_fn(g, |x| {
                    coeffs.iter().map(|&(j, c)| c * Complex64::from_polar(unit_window(x), TAU * eps * j as f64 * x)).sum()
                });
                let v = sobolev_norm_neg_sq(&f, &prof).unwrap().sqrt();
                assert!(v <= 1.05 * eps.powf(-1.0 - 2.0 * alpha) * circ, "{eps}: {v} vs {circ}");
            }
        }
    }

    #[test]
    fn regularization() {
        let g = GridSpec::new(-2.0, 2.0, 5).unwrap();
        let f = GridField::from_fn(g, |_| Complex64::new(3.0, -1.0));
        let r = regularize(&f);
        assert_eq!(r.values[2], f.values[2]);
        assert_eq!(r.values[3], f.values[3] / 2.0);
        let rr = regularize(&r);
        for (i, x) in g.points().into_iter().enumerate() {
            assert!((rr.values[i] - f.values[i] / (1.0 + x * x).powi(2)).norm() < 1e-15);
        }
    }

    #[test]
    fn mult_distance_properties() {
        let g = GridSpec::new(-1.0, 1.0, 801).unwrap();
        let prof = SpectralProfile::new(1.0).unwrap();
        let b = bump(0.0, 0.9);
        let u = GridField::from_fn(g, |x| Complex64::new(b(x), 0.3 * x * b(x)));
        let c = Complex64::new(-2.0, 0.7);
        assert!(mult_distance(&u, &u.scale(c), &prof).unwrap() < 1e-12);
        // even real against odd real: the weighted pairing is odd in ξ
        let even = GridField::from_fn(g, |x| b(x).into());
        let odd = GridField::from_fn(g, |x| (x * b(x)).into());
        assert!((mult_distance(&even, &odd, &prof).unwrap() - 2f64.sqrt()).abs() < 1e-10);
        let d1 = mult_distance(&u, &odd, &prof).unwrap();
        let d2 = mult_distance(&odd, &u, &prof).unwrap();
        assert!((d1 - d2).abs() < 1e-14);
        assert!(mult_distance(&u, &GridField::zeros(g), &prof).is_err());
        let other = GridField::zeros(GridSpec::new(0.0, 1.0, 801).unwrap());
        assert!(mult_distance(&u, &other, &prof).is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(unit_window(0.0), 0.0);
        assert_eq!(unit_window(0.5), 1.0);
        assert_eq!(unit_window(1.0), 0.0);
        assert!((unit_window(0.025) - 0.5).abs() < 1e-15);
        assert!((unit_window(0.3) - unit_window(0.7)).abs() < 1e-15);
    }

    #[test]
    fn inner_identity() {
        let t = build_prime_table(10).unwrap();
        let g = GridSpec::new(-1.0, 1.0, 401).unwrap();
        let b = bump(0.0, 1.0);
        let f = GridField::from_fn(g, |x| b(x).into());
        let rep = z_inner_identity_check(&f, &f, 3, &t).unwrap();
        assert!(rep.abs_diff < 1e-3, "{rep:?}");
        assert!(rep.quad_error_estimate < 1e-3);
        let h = GridField::from_fn(g, |x| Complex64::new(b(x) * x, b(x)));
        let a = z_inner_identity_check(&f, &h, 3, &t).unwrap();
        let r = z_inner_identity_check(&h, &f, 3, &t).unwrap();
        assert!(a.abs_diff < 1e-3 && (a.series - r.series.conj()).norm() < 1e-12);
        assert!((a.integral - r.integral.conj()).norm() < 1e-12);
        let zero = z_inner_identity_check(&f, &GridField::zeros(g), 3, &t).unwrap();
        assert_eq!(zero.series.norm() + zero.integral.norm(), 0.0);
    }

    #[test]
    fn embedding_budgets() {
        let g = GridSpec::new(-4.0, 4.0, 1601).unwrap();
        let mut r = rng::stream(5, 0);
        for _ in 0..20 {
            let c = r.random_range(-2.0..2.0);
            let w = r.random_range(0.2..1.5);
            let a = Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
            let k = r.random_range(-3.0..3.0);
            let b = bump(c, w);
            let f = GridField::from_fn(g, |x| a * Complex64::from_polar(b(x), k * x));
            let rhs: f64 = g.points().iter().zip(g.trapezoid_weights())
                .zip(&f.values)
                .map(|((x, w), v)| w * (1.0 + x * x) * v.norm_sqr())
                .sum();
            let probe = FourierProbe::from_field(&f);
            let z = z_norm_sq(&probe, 20_000).unwrap().value;
            assert!(z <= 10.0 * rhs, "{z} vs {rhs}");
            for m in [1.0, 4.0, 16.0] {
                let n_max = (40.0 * m) as i64;
                let s: f64 = (-n_max..=n_max).map(|n| probe.at(n as f64 / m).norm_sqr()).sum::<f64>() / m;
                assert!(s <= 10.0 * rhs, "M={m}: {s} vs {rhs}");
            }
        }
    }

    #[test]
    fn wasserstein() {
        let a = [0.3, -1.0, 2.0];
        assert_eq!(wasserstein_real(&a, &a).unwrap(), 0.0);
        assert_eq!(wasserstein_empirical(Samples::Real(&[0.0]), Samples::Real(&[1.0])).unwrap(), 1.0);
        assert_eq!(wasserstein_planar(&[[0.0, 0.0]], &[[1.0, 0.0]]).unwrap(), 1.0);
        assert!(wasserstein_real(&a, &a[..2]).is_err());
        assert!(wasserstein_empirical(Samples::Real(&[0.0]), Samples::Planar(&[[0.0, 0.0]])).is_err());
        let x = planar_gaussian_samples(512, 1, 10);
        let y = planar_gaussian_samples(512, 1, 11);
        assert!(wasserstein_planar(&x, &y).unwrap() < 0.25);
        // planar assignment agrees with sorting for points on a line
        let p: Vec<[f64; 2]> = x.iter().take(200).map(|v| [v[0], 0.0]).collect();
        let q: Vec<[f64; 2]> = y.iter().take(200).map(|v| [v[0], 0.0]).collect();
        let r1: Vec<f64> = p.iter().map(|v| v[0]).collect();
        let r2: Vec<f64> = q.iter().map(|v| v[0]).collect();
        assert!((wasserstein_planar(&p, &q).unwrap() - wasserstein_real(&r1, &r2).unwrap()).abs() < 1e-12);
    }
}
