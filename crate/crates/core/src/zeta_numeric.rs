//! Euler–Maclaurin evaluation of ζ, the functional-equation factor, and the
//! mean-value and divisor-sum checks that connect the random model to ζ.

use crate::error::{Error, Result};
use crate::euler_field::zeta_n_eval;
use crate::prime_tools::{divisor_sum, PrimeTable};
use crate::quad::composite_gl;
use crate::rng;
use crate::special::{ln_cos, ln_gamma, EULER_GAMMA};
use crate::stats::{complex_mean_se, ComplexEstimate};
use num_complex::Complex64;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// B_2, B_4, ..., B_18.
const BERNOULLI: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaEvaluator {
    /// Direct terms: ⌈slope·|Im s|⌉ + offset.
    pub cutoff_slope: f64,
    pub cutoff_offset: usize,
    /// Number of Bernoulli corrections, at most 8.
    pub bernoulli_order: usize,
    pub ceiling: f64,
}

impl Default for ZetaEvaluator {
    fn default() -> Self {
        ZetaEvaluator { cutoff_slope: 1.3, cutoff_offset: 20, bernoulli_order: 8, ceiling: 1e5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub value: Complex64,
    pub error_bound: f64,
}

impl ZetaEvaluator {
    pub fn terms(&self, s: Complex64) -> usize {
        let by_height = (self.cutoff_slope * s.im.abs()).ceil() as usize + self.cutoff_offset;
        // the remainder estimate also needs N well above |s|
        by_height.max(s.norm().ceil() as usize + self.cutoff_offset)
    }

    pub fn eval(&self, s: Complex64) -> Result<ZetaValue> {
        if s == Complex64::new(1.0, 0.0) {
            return Err(Error::Pole("s = 1".into()));
        }
        if !(s.im.abs() <= self.ceiling) || !s.re.is_finite() {
            return Err(Error::range(format!("|Im s| beyond ceiling {}: {s}", self.ceiling)));
        }
        let order = self.bernoulli_order.min(BERNOULLI.len() - 1);
        let n = self.terms(s);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for k in (1..n).rev() {
            let l = (k as f64).ln();
            let m = (-s.re * l).exp();
            let (sn, cs) = (s.im * l).sin_cos();
            sum += Complex64::new(m * cs, -m * sn);
            abs_sum += m;
        }
        let nf = n as f64;
        let ln_n = nf.ln();
        let n_pow = (-s * ln_n).exp(); // N^{−s}
        sum += n_pow * nf / (s - 1.0) + n_pow * 0.5;
        // Σ B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
        let mut rising = s; // s(s+1)…(s+2k−2)
        let mut fact = 2.0; // (2k)!
        let mut npow = n_pow / nf; // N^{−s−2k+1}
        let mut next = 0.0;
        for k in 1..=order + 1 {
            let term = rising * npow * (BERNOULLI[k - 1] / fact);
            if k <= order {
                sum += term;
            } else {
                let sigma = s.re + (2 * order + 1) as f64;
                let widen = if sigma > 0.0 {
                    (s + (2 * order + 1) as f64).norm() / sigma
                } else {
                    f64::INFINITY
                };
                next = term.norm() * widen.max(1.0);
            }
            let k2 = 2 * k as u32;
            rising *= (s + (k2 - 1) as f64) * (s + k2 as f64);
            fact *= ((k2 + 1) * (k2 + 2)) as f64;
            npow /= nf * nf;
        }
        let rounding = 4.0 * f64::EPSILON * (abs_sum + 1.0) * (n as f64).sqrt();
        Ok(ZetaValue { value: sum, error_bound: next + rounding })
    }
}

/// ζ(s) by Euler–Maclaurin with the default policy.
pub fn zeta_em(s: Complex64) -> Result<Complex64> {
    ZetaEvaluator::default().eval(s).map(|v| v.value)
}

/// χ(1 − s) = 2(2π)^{−s} Γ(s) cos(sπ/2), so that ζ(1 − s) = χ(1 − s) ζ(s).
pub fn chi_factor(s: Complex64) -> Result<Complex64> {
    let lg = ln_gamma(s)?;
    let l = Complex64::new(2f64.ln(), 0.0) - s * TAU.ln() + lg + ln_cos(s * (PI / 2.0));
    Ok(l.exp())
}

/// Main term of V_T^{(1)}(x, y); log(T/2π) + 2γ − 1 on the diagonal.
pub fn two_point_kernel(x: f64, y: f64, t: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::invalid("two_point_kernel needs T > 0"));
    }
    let u = x - y;
    let l = (t / TAU).ln();
    if u.abs() < 1e-6 {
        // Laurent expansion: ζ(1+s) = 1/s + γ − γ₁ s + …; the 1/s terms cancel.
        let diag = l + 2.0 * EULER_GAMMA - 1.0;
        let slope = Complex64::new(0.0, u) * (-0.5 * l * l + l - 1.0 + EULER_GAMMA * (1.0 - l));
        return Ok(diag + slope);
    }
    let a = zeta_em(Complex64::new(1.0, u))?;
    let b = zeta_em(Complex64::new(1.0, -u))?;
    Ok(a + b / Complex64::new(1.0, -u) * Complex64::from_polar(1.0, -u * l))
}

/// log(T/2π) + 2γ − 1.
pub fn mean_square_target(t: f64) -> f64 {
    (t / TAU).ln() + 2.0 * EULER_GAMMA - 1.0
}

const GL_ORDER: usize = 16;
const MAX_REFINEMENTS: usize = 8;

/// ∫_a^b f(ζ(1/2+it)) dt by panel Gauss–Legendre, halving the panel width
/// until the relative change drops below `rel_change`.
fn critical_line_integral(
    a: f64,
    b: f64,
    start_width: f64,
    rel_change: f64,
    f: impl Fn(Complex64) -> Complex64 + Sync,
) -> Result<Complex64> {
    let ev = ZetaEvaluator::default();
    let eval = |panels: usize| -> Result<Complex64> {
        let (xs, ws) = composite_gl(a, b, panels, GL_ORDER);
        let vals: Vec<Complex64> = xs
            .par_iter()
            .map(|&t| ev.eval(Complex64::new(0.5, t)).map(|z| f(z.value)))
            .collect::<Result<_>>()?;
        Ok(vals.iter().zip(&ws).map(|(v, w)| v * w).sum())
    };
    let mut panels = (((b - a) / start_width).ceil() as usize).max(1);
    let mut prev = eval(panels)?;
    for _ in 0..MAX_REFINEMENTS {
        panels *= 2;
        let cur = eval(panels)?;
        if (cur - prev).norm() <= rel_change * cur.norm().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::numeric(format!("integral over [{a}, {b}] did not settle")))
}

/// (1/T) ∫₀^T |ζ(1/2+it)|² dt.
pub fn mean_square(t: f64, start_width: f64) -> Result<f64> {
    if !(t >= 10.0) {
        return Err(Error::invalid("mean_square needs T ≥ 10"));
    }
    let v = critical_line_integral(0.0, t, start_width, 1e-3, |z| Complex64::new(z.norm_sqr(), 0.0))?;
    Ok(v.re / t)
}

/// (B − A)^{−1} ∫_A^B ζ(1/2+it) dt.
pub fn mean_value(a: f64, b: f64) -> Result<Complex64> {
    if !(b > a) {
        return Err(Error::invalid("mean_value needs B > A"));
    }
    let v = critical_line_integral(a, b, 2.0, 1e-4, |z| z)?;
    Ok(v / (b - a))
}

/// Error budget (1 + |B|^{1/6})/(B − A) of the mean value.
pub fn mean_value_budget(a: f64, b: f64) -> f64 {
    (1.0 + a.abs().max(b.abs()).powf(1.0 / 6.0)) / (b - a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivisorCheck {
    pub t: f64,
    pub a: f64,
    pub smooth_level: Option<usize>,
    /// D_{ia}(T) / T.
    pub exact: Complex64,
    pub main_term: Complex64,
    pub abs_error: f64,
    /// T^{−1/3} + T^{−5/12}|a|^{1/6}.
    pub budget: f64,
    pub budget_factor: f64,
    pub pass: bool,
}

/// Main term ζ(1+ia) + ζ(1−ia) T^{−ia}/(1−ia), or ζ_N(1+ia) for smooth sums.
pub fn divisor_main_term(t: f64, a: f64, smooth: Option<(usize, &PrimeTable)>) -> Result<Complex64> {
    match smooth {
        Some((n, table)) => zeta_n_eval(Complex64::new(1.0, a), n, table),
        None if a == 0.0 => Ok(Complex64::new(t.ln() + 2.0 * EULER_GAMMA - 1.0, 0.0)),
        None => {
            let p = zeta_em(Complex64::new(1.0, a))?;
            let m = zeta_em(Complex64::new(1.0, -a))?;
            Ok(p + m * Complex64::from_polar(1.0, -a * t.ln()) / Complex64::new(1.0, -a))
        }
    }
}

pub fn divisor_budget(t: f64, a: f64) -> f64 {
    t.powf(-1.0 / 3.0) + t.powf(-5.0 / 12.0) * a.abs().powf(1.0 / 6.0)
}

/// Exact D_{ia}(T)/T against its main term, T half an odd integer.
pub fn divisor_asymptotics_check(
    t: f64,
    a: f64,
    smooth: Option<(usize, &PrimeTable)>,
    budget_factor: f64,
) -> Result<DivisorCheck> {
    if !(t >= 1.0) || (t - 0.5).fract() != 0.0 {
        return Err(Error::invalid(format!("T must be half an odd integer ≥ 1, got {t}")));
    }
    if t > 1e6 {
        return Err(Error::invalid("T beyond the brute-force budget 10⁶"));
    }
    let exact = divisor_sum(t, a, smooth)? / t;
    let main_term = divisor_main_term(t, a, smooth)?;
    let abs_error = (exact - main_term).norm();
    let budget = divisor_budget(t, a);
    Ok(DivisorCheck {
        t,
        a,
        smooth_level: smooth.map(|s| s.0),
        exact,
        main_term,
        abs_error,
        budget,
        budget_factor,
        pass: abs_error <= budget_factor * budget,
    })
}

/// Which shifted second moment to sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftMoment {
    /// ζ(1/2+it+ix)·conj ζ(1/2+it+iy), target two_point_kernel.
    Full,
    /// ζ_N(·+ix)·conj ζ(·+iy) + ζ(·+ix)·conj ζ_N(·+iy), target 2ζ_N(1+i(x−y)).
    SmoothCross(usize),
}

/// Monte Carlo over t = ωT, ω uniform on [0, 1].
pub fn empirical_shift_moment(
    x: f64,
    y: f64,
    t: f64,
    n_samples: usize,
    kind: ShiftMoment,
    table: &PrimeTable,
    seed: u64,
) -> Result<ComplexEstimate> {
    if n_samples < 2 {
        return Err(Error::invalid("need at least two shift samples"));
    }
    let mut r = rng::stream(seed, rng::name_tag("shift-moment"));
    let shifts: Vec<f64> = (0..n_samples).map(|_| t * rng::unit_f64(r.next_u64())).collect();
    let vals: Vec<Complex64> = shifts
        .par_iter()
        .map(|&s| -> Result<Complex64> {
            let sx = Complex64::new(0.5, s + x);
            let sy = Complex64::new(0.5, s + y);
            let zx = zeta_em(sx)?;
            let zy = zeta_em(sy)?;
            Ok(match kind {
                ShiftMoment::Full => zx * zy.conj(),
                ShiftMoment::SmoothCross(n) => {
                    zeta_n_eval(sx, n, table)? * zy.conj() + zx * zeta_n_eval(sy, n, table)?.conj()
                }
            })
        })
        .collect::<Result<_>>()?;
    Ok(complex_mean_se(&vals))
}
