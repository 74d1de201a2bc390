//! CUE eigenphases, characteristic polynomials υ_N(θ) = det(I − e^{−iθ}U) and
//! their truncations, trace statistics, and the mesoscopic comparison with η.

use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec};
use crate::meso_chaos::{eta_draw, meso_grid, MesoWindow};
use crate::rng;
use crate::spectral_norms::{circle_sobolev_norm_sq, mult_distance, windowed, SpectralProfile};
use crate::stats::{mean_se, median, variance_se, Estimate};
use nalgebra::{linalg::Schur, DMatrix};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

/// Largest dimension served by the dense QR route.
pub const MAX_DENSE_N: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPhases {
    /// Eigenphases in [0, 2π).
    pub phases: Vec<f64>,
    pub seed: u64,
    pub stream_id: u64,
}

impl EigenPhases {
    pub fn from_phases(phases: Vec<f64>) -> Self {
        EigenPhases { phases: phases.into_iter().map(|p| p.rem_euclid(TAU)).collect(), seed: 0, stream_id: 0 }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Tr U^k.
    pub fn trace_power(&self, k: i64) -> Complex64 {
        self.phases.iter().map(|&p| Complex64::from_polar(1.0, k as f64 * p)).sum()
    }

    /// c_l with υ_N(θ) = Σ_{l=0}^N c_l e^{−ilθ}: coefficients of Π_j (1 − e^{iφ_j}t).
    pub fn char_coefficients(&self) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); self.len() + 1];
        c[0] = Complex64::new(1.0, 0.0);
        for (j, &p) in self.phases.iter().enumerate() {
            let z = Complex64::from_polar(1.0, p);
            for l in (1..=j + 1).rev() {
                let prev = c[l - 1];
                c[l] -= z * prev;
            }
        }
        c
    }
}

/// Haar unitary from a complex Ginibre matrix: QR, then column j of Q times
/// r_jj/|r_jj| so that the triangular factor has positive diagonal.
pub fn sample_haar_unitary(n: usize, seed: u64, stream_id: u64) -> Result<DMatrix<Complex64>> {
    if n == 0 || n > MAX_DENSE_N {
        return Err(Error::invalid(format!("dimension must lie in 1..={MAX_DENSE_N}, got {n}")));
    }
    let mut r = rng::stream(seed, stream_id);
    let z = DMatrix::from_fn(n, n, |_, _| {
        let a: f64 = StandardNormal.sample(&mut r);
        let b: f64 = StandardNormal.sample(&mut r);
        Complex64::new(a, b) * FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let (mut q, rr) = (qr.q(), qr.r());
    for j in 0..n {
        let d = rr[(j, j)];
        if d.norm() == 0.0 {
            return Err(Error::numeric("singular Ginibre sample"));
        }
        let ph = d / d.norm();
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    Ok(q)
}

pub fn sample_cue(n: usize, seed: u64, stream_id: u64) -> Result<EigenPhases> {
    let u = sample_haar_unitary(n, seed, stream_id)?;
    let ev = if n == 1 {
        vec![u[(0, 0)]]
    } else {
        Schur::try_new(u, 1e-14, 10_000)
            .and_then(|s| s.eigenvalues())
            .ok_or_else(|| Error::numeric("Schur iteration did not converge"))?
            .iter()
            .copied()
            .collect()
    };
    let phases = ev.iter().map(|z| z.arg().rem_euclid(TAU)).collect();
    Ok(EigenPhases { phases, seed, stream_id })
}

/// υ_N(θ) = Π_j (1 − e^{i(φ_j − θ)}).
pub fn char_poly(theta: f64, ep: &EigenPhases) -> Complex64 {
    ep.phases.iter().map(|&p| Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, p - theta)).product()
}

/// log of υ_{N,M}(θ): −Σ_{k≤M} Tr U^k e^{−ikθ}/k.
pub fn truncated_log_char(theta: f64, ep: &EigenPhases, m: usize) -> Result<Complex64> {
    if m == 0 {
        return Err(Error::invalid("M must be at least 1"));
    }
    Ok(-(1..=m as i64).map(|k| ep.trace_power(k) * Complex64::from_polar(1.0, -(k as f64) * theta) / k as f64).sum::<Complex64>())
}

pub fn truncated_char(theta: f64, ep: &EigenPhases, m: usize) -> Result<Complex64> {
    Ok(truncated_log_char(theta, ep, m)?.exp())
}

/// Coefficients b_l, l ≤ degree, of υ_{N,M}(θ) = Σ_l b_l e^{−ilθ}.
pub fn truncated_char_coefficients(ep: &EigenPhases, m: usize, degree: usize) -> Result<Vec<Complex64>> {
    if m == 0 {
        return Err(Error::invalid("M must be at least 1"));
    }
    // exp of g(t) = −Σ T_k t^k/k through l b_l = Σ_k k g_k b_{l−k}
    let kg: Vec<Complex64> = (1..=m as i64).map(|k| -ep.trace_power(k)).collect();
    let mut b = vec![Complex64::new(0.0, 0.0); degree + 1];
    b[0] = Complex64::new(1.0, 0.0);
    for l in 1..=degree {
        let s: Complex64 = (1..=l.min(m)).map(|k| kg[k - 1] * b[l - k]).sum();
        b[l] = s / l as f64;
    }
    Ok(b)
}

/// E[υ_N(θ) conj υ_N(θ′)] = Σ_{l=0}^N e^{−il(θ−θ′)}.
pub fn toeplitz_second_moment(theta: f64, theta_prime: f64, n: usize) -> Complex64 {
    let d = theta - theta_prime;
    let w = Complex64::from_polar(1.0, -d);
    if (w - 1.0).norm() < 1e-12 {
        // summing directly keeps accuracy next to the removable singularity
        return (0..=n).map(|l| Complex64::from_polar(1.0, -(l as f64) * d)).sum();
    }
    (Complex64::new(1.0, 0.0) - w.powu(n as u32 + 1)) / (Complex64::new(1.0, 0.0) - w)
}

/// Σ_{l=0}^N (1+l²)^{−α}.
pub fn sobolev_moment_target(n: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(Error::invalid(format!("alpha must exceed 1/2, got {alpha}")));
    }
    Ok((0..=n).map(|l| (1.0 + (l * l) as f64).powf(-alpha)).sum())
}

/// ‖υ_N‖²_{ℋ^{−α}} on the circle.
pub fn char_sobolev_norm_sq(ep: &EigenPhases, alpha: f64) -> f64 {
    let c: Vec<(i64, Complex64)> = ep.char_coefficients().into_iter().enumerate().map(|(l, v)| (-(l as i64), v)).collect();
    circle_sobolev_norm_sq(&c, alpha)
}

/// Degree at which the υ_{N,M} coefficient series is cut for Sobolev norms.
pub const TRUNCATED_SERIES_DEGREE: usize = 400;

pub fn truncated_sobolev_norm_sq(ep: &EigenPhases, m: usize, alpha: f64) -> Result<f64> {
    let b = truncated_char_coefficients(ep, m, TRUNCATED_SERIES_DEGREE)?;
    let c: Vec<(i64, Complex64)> = b.into_iter().enumerate().map(|(l, v)| (-(l as i64), v)).collect();
    Ok(circle_sobolev_norm_sq(&c, alpha))
}

/// Per-draw eigenphases, draw i on stream i.
pub fn cue_draws(n: usize, n_draws: usize, seed: u64) -> Result<Vec<EigenPhases>> {
    (0..n_draws as u64).into_par_iter().map(|i| sample_cue(n, seed, i)).collect()
}

/// Empirical Var(Tr U^k) = E|Tr U^k − mean|² for k = 1..k_max; the Gaussian-limit target is k.
pub fn ds_trace_variances(n: usize, k_max: usize, n_draws: usize, seed: u64) -> Result<Vec<Estimate>> {
    if k_max == 0 || k_max > n {
        return Err(Error::invalid(format!("need 1 ≤ k_max ≤ N, got k_max={k_max}, N={n}")));
    }
    if n_draws < 2 {
        return Err(Error::invalid("need at least two draws"));
    }
    let traces: Vec<Vec<Complex64>> = (0..n_draws as u64)
        .into_par_iter()
        .map(|i| {
            let e = sample_cue(n, seed, i)?;
            Ok((1..=k_max as i64).map(|k| e.trace_power(k)).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..k_max)
        .map(|k| {
            let t: Vec<Complex64> = traces.iter().map(|d| d[k]).collect();
            let m = t.iter().sum::<Complex64>() / t.len() as f64;
            let dev: Vec<f64> = t.iter().map(|z| (z - m).norm_sqr()).collect();
            let mut e = mean_se(&dev);
            e.mean *= t.len() as f64 / (t.len() as f64 - 1.0);
            e
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionReport {
    pub l: u32,
    pub eps: f64,
    pub brute: f64,
    pub target: f64,
    pub abs_error: f64,
    /// Σ over compositions at ε = 0 as a reduced fraction, when it fits in i128.
    pub exact_rational: Option<(i128, i128)>,
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn rational_add(x: Option<(i128, i128)>, num: i128, den: i128) -> Option<(i128, i128)> {
    let (a, b) = x?;
    let n = a.checked_mul(den)?.checked_add(num.checked_mul(b)?)?;
    let d = b.checked_mul(den)?;
    let g = gcd(n, d).max(1);
    Some((n / g, d / g))
}

/// Brute force Σ_k (1/k!) Σ_{j_1+…+j_k = l} e^{−εΣj}/Πj against e^{−εl}.
pub fn composition_identity_check(l: u32, eps: f64, brute_cap: u32) -> Result<CompositionReport> {
    if brute_cap > 20 || l > brute_cap || l == 0 || !(eps >= 0.0) {
        return Err(Error::invalid(format!("need 1 ≤ l ≤ brute_cap ≤ 20 and ε ≥ 0, got l={l}, cap={brute_cap}, ε={eps}")));
    }
    // per part count k: Σ Π 1/j as float and as exact fraction
    let mut float_by_k = vec![0.0; l as usize + 1];
    let mut exact_by_k: Vec<Option<(i128, i128)>> = vec![Some((0, 1)); l as usize + 1];
    fn walk(rest: u32, k: usize, prod: i128, float_by_k: &mut [f64], exact_by_k: &mut [Option<(i128, i128)>]) {
        if rest == 0 {
            float_by_k[k] += 1.0 / prod as f64;
            exact_by_k[k] = rational_add(exact_by_k[k], 1, prod);
            return;
        }
        for j in 1..=rest {
            walk(rest - j, k + 1, prod * j as i128, float_by_k, exact_by_k);
        }
    }
    walk(l, 0, 1, &mut float_by_k, &mut exact_by_k);
    let mut fact = 1.0;
    let mut fact_i: i128 = 1;
    let mut brute = 0.0;
    let mut exact = Some((0i128, 1i128));
    for k in 1..=l as usize {
        fact *= k as f64;
        fact_i *= k as i128;
        brute += float_by_k[k] / fact;
        exact = exact_by_k[k].and_then(|(a, b)| rational_add(exact, a, b.checked_mul(fact_i)?));
    }
    brute *= (-eps * l as f64).exp();
    let target = (-eps * l as f64).exp();
    Ok(CompositionReport { l, eps, brute, target, abs_error: (brute - target).abs(), exact_rational: if eps == 0.0 { exact } else { None } })
}

/// ½ Σ_{k≥1} min(k, N)/k², the exact variance of Re log υ_N(θ).
pub fn log_char_variance_target(n: usize) -> f64 {
    let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
    // Σ_{k>N} 1/k²: a direct block then the trigamma asymptotic series
    let cut = n + 100;
    let x = (cut + 1) as f64;
    let tail = (n + 1..=cut).map(|k| 1.0 / (k as f64).powi(2)).sum::<f64>()
        + 1.0 / x + 0.5 / (x * x) + 1.0 / (6.0 * x.powi(3)) - 1.0 / (30.0 * x.powi(5));
    0.5 * (h + n as f64 * tail)
}

/// Var(Re log υ_N(0)) over independent draws.
pub fn log_char_variance(n: usize, n_draws: usize, seed: u64) -> Result<Estimate> {
    let v: Vec<f64> = (0..n_draws as u64)
        .into_par_iter()
        .map(|i| Ok(sample_cue(n, seed, i)?.phases.iter().map(|&p| (2.0 - 2.0 * p.cos()).sqrt().ln()).sum()))
        .collect::<Result<_>>()?;
    Ok(variance_se(&v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmtMesoReport {
    pub n: usize,
    pub delta: f64,
    pub draws: usize,
    pub window: MesoWindow,
    pub median_mult_distance: f64,
    pub distances: Vec<f64>,
    pub log_char_variance: Estimate,
    /// ½ Σ min(k,N)/k²
    pub log_char_variance_target: f64,
    /// ½ Σ_{k≤N} 1/k, the leading part of the target
    pub log_char_variance_leading: f64,
}

/// x ↦ det(I − e^{iδx}U) on `grid`.
pub fn scaled_char_field(ep: &EigenPhases, delta: f64, grid: &GridSpec) -> Result<GridField> {
    GridField::new(*grid, grid.points().into_iter().map(|x| char_poly(-delta * x, ep)).collect())
}

/// mult_distance between windowed scaled characteristic polynomials and
/// independent η fields on [δ, δN], plus the log-modulus variance diagnostic.
pub fn rmt_meso_compare(n: usize, delta: f64, n_draws: usize, alpha: f64, seed: u64) -> Result<RmtMesoReport> {
    if n > MAX_DENSE_N {
        return Err(Error::invalid(format!("N ≤ {MAX_DENSE_N} required")));
    }
    if !(delta > 0.0 && delta * n as f64 >= 10.0) {
        return Err(Error::invalid(format!("need δN ≥ 10, got {}", delta * n as f64)));
    }
    if n_draws < 2 {
        return Err(Error::invalid("need at least two draws"));
    }
    let window = MesoWindow::new(delta.min(1.0), (delta * n as f64).max(1.0))?;
    let profile = SpectralProfile::new(alpha)?;
    let grid = meso_grid();
    let eta_seed = rng::derive(seed, rng::name_tag("cue-eta"));
    let rows: Vec<(f64, f64)> = (0..n_draws as u64)
        .into_par_iter()
        .map(|i| {
            let ep = sample_cue(n, seed, i)?;
            let u = windowed(&scaled_char_field(&ep, delta, &grid)?);
            let e = windowed(&eta_draw(&window, &grid, eta_seed, i)?);
            let lv = ep.phases.iter().map(|&p| (2.0 - 2.0 * p.cos()).sqrt().ln()).sum();
            Ok((mult_distance(&u, &e, &profile)?, lv))
        })
        .collect::<Result<_>>()?;
    let distances: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let logs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(RmtMesoReport {
        n,
        delta,
        draws: n_draws,
        window,
        median_mult_distance: median(&distances),
        distances,
        log_char_variance: variance_se(&logs),
        log_char_variance_target: log_char_variance_target(n),
        log_char_variance_leading: 0.5 * (1..=n).map(|k| 1.0 / k as f64).sum::<f64>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{complex_mean_se, correlation, ks_test, skewness};
    use proptest::prelude::*;

    /// Exact Haar average of a trigonometric polynomial in the eigenphases of
    /// per-variable degree ≤ `degree`: Weyl density averaged over a grid fine
    /// enough to integrate every monomial exactly.
    fn haar_exact(n: usize, degree: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        let m = n + degree + 1;
        let total = m.pow(n as u32);
        let s: f64 = (0..total)
            .into_par_iter()
            .map(|mut idx| {
                let mut ph = vec![0.0; n];
                for p in ph.iter_mut() {
                    *p = TAU * (idx % m) as f64 / m as f64;
                    idx /= m;
                }
                let mut w = 1.0;
                for a in 0..n {
                    for b in a + 1..n {
                        w *= 2.0 - 2.0 * (ph[a] - ph[b]).cos();
                    }
                }
                w * f(&ph)
            })
            .sum();
        s / total as f64 / (1..=n).product::<usize>() as f64
    }

    /// Toeplitz determinant det[f̂_{j−k}] by permutation expansion.
    fn toeplitz_det(n: usize, fhat: impl Fn(i64) -> f64) -> f64 {
        fn perms(v: &mut Vec<usize>, k: usize, out: &mut Vec<(Vec<usize>, f64)>, sign: f64) {
            if k == v.len() {
                out.push((v.clone(), sign));
                return;
            }
            for i in k..v.len() {
                v.swap(k, i);
                perms(v, k + 1, out, if i == k { sign } else { -sign });
                v.swap(k, i);
            }
        }
        let mut out = Vec::new();
        perms(&mut (0..n).collect(), 0, &mut out, 1.0);
        out.iter().map(|(p, s)| s * (0..n).map(|j| fhat(j as i64 - p[j] as i64)).product::<f64>()).sum()
    }

    #[test]
    fn haar_oracle_trace_moments() {
        for n in 1..=6 {
            for k in 1..=6i64 {
                let v = haar_exact(n, k as usize, |ph| {
                    let (c, s) = ph.iter().fold((0.0, 0.0), |(c, s), &p| (c + (k as f64 * p).cos(), s + (k as f64 * p).sin()));
                    c * c + s * s
                });
                assert!((v - (k as usize).min(n) as f64).abs() < 1e-9, "n={n} k={k}: {v}");
            }
        }
        // the variance target rests on those moments
        let direct: f64 = 0.5 * (1..200_000usize).map(|k| k.min(100) as f64 / (k * k) as f64).sum::<f64>();
        assert!((log_char_variance_target(100) - direct).abs() < 1e-3);
    }

    #[test]
    fn unitary_and_phases() {
        let u = sample_haar_unitary(8, 3, 0).unwrap();
        let id = &u.adjoint() * &u;
        assert!((id - DMatrix::<Complex64>::identity(8, 8)).norm() < 1e-12);
        let ep = sample_cue(8, 3, 0).unwrap();
        assert_eq!(ep, sample_cue(8, 3, 0).unwrap());
        assert!(ep.phases.iter().all(|p| (0.0..TAU).contains(p)));
        let tr = u.trace();
        assert!((tr - ep.trace_power(1)).norm() < 1e-10);
        assert!(sample_cue(0, 1, 0).is_err() && sample_cue(513, 1, 0).is_err());
    }

    #[test]
    fn cue_one_is_uniform() {
        let p: Vec<f64> = cue_draws(1, 10_000, 5).unwrap().into_iter().map(|e| e.phases[0]).collect();
        assert!(ks_test(&p, |x| (x / TAU).clamp(0.0, 1.0)).1 > 1e-3);
    }

    #[test]
    fn trace_statistics() {
        let v = ds_trace_variances(10, 5, 20_000, 7).unwrap();
        for (k, e) in v.iter().enumerate() {
            assert!(e.within((k + 1) as f64, 3.0), "k={}: {e:?}", k + 1);
        }
        let draws = cue_draws(10, 20_000, 8).unwrap();
        let t1: Vec<Complex64> = draws.iter().map(|e| e.trace_power(1)).collect();
        assert!(complex_mean_se(&t1).within(Complex64::new(0.0, 0.0), 3.0));
        let var: Vec<f64> = t1.iter().map(|z| z.norm_sqr()).collect();
        assert!(mean_se(&var).within(1.0, 3.0));
        let re: Vec<f64> = t1.iter().map(|z| z.re).collect();
        assert!(skewness(&re).within(0.0, 3.0));
        let t2: Vec<f64> = draws.iter().map(|e| e.trace_power(2).re).collect();
        let r = correlation(&re, &t2);
        assert!(r.abs() < 3.0 / (re.len() as f64).sqrt(), "{r}");
        assert!(ds_trace_variances(4, 5, 10, 1).is_err());
    }

    #[test]
    fn char_poly_examples() {
        let ep = EigenPhases::from_phases(vec![0.0]);
        assert!((char_poly(std::f64::consts::PI, &ep) - 2.0).norm() < 1e-15);
        let ep = sample_cue(6, 1, 0).unwrap();
        assert!(char_poly(ep.phases[2], &ep).norm() < 1e-12);
        assert!((char_poly(0.3, &ep) - char_poly(0.3 + TAU, &ep)).norm() < 1e-12);
        let c = ep.char_coefficients();
        let direct: Complex64 = c.iter().enumerate().map(|(l, v)| v * Complex64::from_polar(1.0, -(l as f64) * 0.7)).sum();
        assert!((direct - char_poly(0.7, &ep)).norm() < 1e-12);
    }

    #[test]
    fn truncated_examples() {
        let n = 7;
        let roots = EigenPhases::from_phases((0..n).map(|j| TAU * j as f64 / n as f64).collect());
        for m in 1..n {
            assert!((truncated_char(0.4, &roots, m).unwrap() - 1.0).norm() < 1e-12);
        }
        assert!(truncated_char(0.4, &roots, 0).is_err());
        let ep = sample_cue(12, 2, 0).unwrap();
        let l = truncated_log_char(1.1, &ep, 30).unwrap();
        let direct: Complex64 = -(1..=30).map(|k| ep.phases.iter().map(|&p| Complex64::from_polar(1.0, k as f64 * (p - 1.1))).sum::<Complex64>() / k as f64).sum::<Complex64>();
        assert!((l - direct).norm() < 1e-12);
        // the coefficient series reproduces the exponential
        let b = truncated_char_coefficients(&ep, 3, 200).unwrap();
        let s: Complex64 = b.iter().enumerate().map(|(j, v)| v * Complex64::from_polar(1.0, -(j as f64) * 1.1)).sum();
        assert!((s - truncated_char(1.1, &ep, 3).unwrap()).norm() < 1e-9);
        // M ≥ N with large M recovers υ_N away from eigenphases only slowly; check the moderate case
        let far = (0..ep.len()).map(|j| ep.phases[j]).fold(f64::INFINITY, |a, p| a.min((p - 2.0).rem_euclid(TAU).min((2.0 - p).rem_euclid(TAU))));
        if far > 0.2 {
            let t = truncated_char(2.0, &ep, 4000).unwrap();
            assert!((t - char_poly(2.0, &ep)).norm() < 0.05 * char_poly(2.0, &ep).norm());
        }
    }

    proptest! {
        #[test]
        fn truncated_never_zero(phases in prop::collection::vec(0.0..TAU, 1..20), theta in 0.0..TAU, m in 1usize..40) {
            let ep = EigenPhases::from_phases(phases);
            prop_assert!(truncated_char(theta, &ep, m).unwrap().norm() > 0.0);
        }

        #[test]
        fn toeplitz_closed_form(d in -10.0..10.0f64, n in 0usize..60) {
            let direct: Complex64 = (0..=n).map(|l| Complex64::from_polar(1.0, -(l as f64) * d)).sum();
            prop_assert!((toeplitz_second_moment(d, 0.0, n) - direct).norm() < 1e-9 * (n as f64 + 1.0));
        }
    }

    #[test]
    fn second_moments() {
        assert!((toeplitz_second_moment(0.2, 0.2, 5) - 6.0).norm() < 1e-12);
        assert!(toeplitz_second_moment(std::f64::consts::PI, 0.0, 1).norm() < 1e-12);
        let draws = cue_draws(8, 40_000, 11).unwrap();
        for (t, tp) in [(0.0, 0.0), (0.3, 0.1), (1.0, -2.0)] {
            let z: Vec<Complex64> = draws.iter().map(|e| char_poly(t, e) * char_poly(tp, e).conj()).collect();
            assert!(complex_mean_se(&z).within(toeplitz_second_moment(t, tp, 8), 3.0), "{t} {tp}");
        }
        assert_eq!(sobolev_moment_target(0, 1.0).unwrap(), 1.0);
        assert_eq!(sobolev_moment_target(1, 1.0).unwrap(), 1.5);
        assert!(sobolev_moment_target(3, 0.5).is_err());
        let norms: Vec<f64> = cue_draws(20, 20_000, 12).unwrap().iter().map(|e| char_sobolev_norm_sq(e, 1.0)).collect();
        assert!(mean_se(&norms).within(sobolev_moment_target(20, 1.0).unwrap(), 3.0));
    }

    #[test]
    fn heine_szego() {
        for n in 1..=4 {
            let draws = cue_draws(n, 40_000, 13 + n as u64).unwrap();
            // f(z) = 1 − z
            let a: Vec<Complex64> = draws.iter().map(|e| e.phases.iter().map(|&p| Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, p)).product()).collect();
            let da = toeplitz_det(n, |k| match k { 0 => 1.0, 1 => -1.0, _ => 0.0 });
            assert!(complex_mean_se(&a).within(Complex64::new(da, 0.0), 3.0), "n={n}");
            // f(z) = |1 − z|²
            let b: Vec<f64> = draws.iter().map(|e| e.phases.iter().map(|&p| 2.0 - 2.0 * p.cos()).product()).collect();
            let db = toeplitz_det(n, |k| match k { 0 => 2.0, 1 | -1 => -1.0, _ => 0.0 });
            assert!((db - (n + 1) as f64).abs() < 1e-12);
            assert!(mean_se(&b).within(db, 3.0), "n={n}");
        }
    }

    #[test]
    fn compositions() {
        for l in 1..=12 {
            for eps in [0.0, 0.3, 1.0] {
                let r = composition_identity_check(l, eps, 20).unwrap();
                assert!(r.abs_error < 1e-10, "{r:?}");
            }
            assert_eq!(composition_identity_check(l, 0.0, 20).unwrap().exact_rational, Some((1, 1)));
        }
        assert!((composition_identity_check(5, 0.3, 20).unwrap().brute - (-1.5f64).exp()).abs() < 1e-10);
        assert!(composition_identity_check(21, 0.0, 20).is_err());
        assert!(composition_identity_check(5, 0.0, 4).is_err());
    }

    #[test]
    fn log_variance() {
        let e = log_char_variance(30, 5000, 15).unwrap();
        assert!(e.within(log_char_variance_target(30), 3.0), "{e:?} vs {}", log_char_variance_target(30));
    }

    #[test]
    fn meso_compare_pieces() {
        assert!(rmt_meso_compare(16, 0.25, 4, 1.0, 1).is_err());
        let r = rmt_meso_compare(64, 0.25, 8, 1.0, 1).unwrap();
        assert_eq!(r.distances.len(), 8);
        assert!(r.window.big_a == 16.0 && r.window.a == 0.25);
        let g = meso_grid();
        let ep = sample_cue(64, 1, 0).unwrap();
        let u = windowed(&scaled_char_field(&ep, 0.25, &g).unwrap());
        let e = windowed(&eta_draw(&r.window, &g, 3, 0).unwrap());
        let prof = SpectralProfile::new(1.0).unwrap();
        let s = Complex64::new(-0.3, 2.0);
        assert!((mult_distance(&u, &e, &prof).unwrap() - mult_distance(&u, &e.scale(s), &prof).unwrap()).abs() < 1e-10);
    }
}
