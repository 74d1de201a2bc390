//! Sine/cosine integrals and the complex log-gamma function.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 2.0;

/// (Si(x), Ci(x)) for x > 0.
///
/// Power series below 2, Lentz continued fraction for E₁(ix) above.
pub fn si_ci(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("Ci requires x > 0, got {x}")));
    }
    if x <= SERIES_LIMIT {
        let x2 = x * x;
        let mut si = 0.0;
        let mut ci = 0.0;
        let mut term = 1.0; // x^k / k!
        let mut k = 1u32;
        loop {
            term *= x / k as f64;
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 1 {
                si += sign * term / k as f64;
            } else {
                ci += sign * term / k as f64;
            }
            if term < 1e-18 * (1.0 + x2) {
                break;
            }
            k += 1;
        }
        return Ok((si, EULER_GAMMA + x.ln() + ci));
    }
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut i = 2u32;
    loop {
        let a = -((i - 1) as f64).powi(2);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
        i += 1;
        if i > 100_000 {
            return Err(Error::numeric("Si/Ci continued fraction did not converge"));
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    Ok((FRAC_PI_2 + h.im, -h.re))
}

/// Sine integral, odd in x.
pub fn si(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let (s, _) = si_ci(x.abs()).expect("x != 0");
    s.copysign(x)
}

pub fn ci(x: f64) -> Result<f64> {
    si_ci(x).map(|(_, c)| c)
}

/// Ci(x) − log x, continuous at 0 where it equals γ.
pub fn ci_minus_log(x: f64) -> f64 {
    if x == 0.0 {
        return EULER_GAMMA;
    }
    ci(x.abs()).expect("x != 0") - x.abs().ln()
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// log Γ(z) for complex z, Lanczos approximation with reflection.
///
/// The imaginary part is some branch of arg Γ(z); only exp of the result is
/// branch-free.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::domain(format!("Gamma pole at {z}")));
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let lg = ln_gamma(Complex64::new(1.0, 0.0) - z)?;
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - lg);
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += *c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln())
}

/// log sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    let i = Complex64::i();
    // sin w = (e^{iw} − e^{−iw}) / 2i; factor out the dominant exponential.
    if w.im >= 0.0 {
        // e^{−iw} dominates
        let r = (2.0 * i * w).exp() - 1.0;
        -i * w + r.ln() - (2.0 * i).ln()
    } else {
        let r = Complex64::new(1.0, 0.0) - (-2.0 * i * w).exp();
        i * w + r.ln() - (2.0 * i).ln()
    }
}

/// log cos(z), stable for large |Im z|.
pub fn ln_cos(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let ln2 = std::f64::consts::LN_2;
    if z.im >= 0.0 {
        -i * z + (Complex64::new(1.0, 0.0) + (2.0 * i * z).exp()).ln() - ln2
    } else {
        i * z + (Complex64::new(1.0, 0.0) + (-2.0 * i * z).exp()).ln() - ln2
    }
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    ln_gamma(z).map(|l| l.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOptions};

    #[test]
    fn si_against_quadrature() {
        let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-14, max_intervals: 10_000 };
        for &x in &[0.1, 1.0, 1.9, 2.0, 2.1, 2.0 * PI, 10.0, 40.0] {
            let q = integrate(|t| if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0, x, opts).unwrap();
            assert!((si(x) - q).abs() < 1e-11, "x={x}: {} vs {q}", si(x));
        }
    }

    #[test]
    fn ci_against_quadrature() {
        // Ci(x) = γ + log x + ∫₀^x (cos t − 1)/t dt
        let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-14, max_intervals: 10_000 };
        for &x in &[0.05, 0.7, 2.0, 3.5, 12.0, 30.0] {
            let q = integrate(|t| if t == 0.0 { 0.0 } else { (t.cos() - 1.0) / t }, 0.0, x, opts)
                .unwrap();
            let want = EULER_GAMMA + x.ln() + q;
            assert!((ci(x).unwrap() - want).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn si_limits() {
        assert_eq!(si(0.0), 0.0);
        assert!((si(1e6) - FRAC_PI_2).abs() < 1e-5);
        assert!((si(2.0 * PI) - 1.418_151_576_132_628).abs() < 1e-12);
        assert_eq!(si(-3.0), -si(3.0));
        assert!(ci(0.0).is_err());
        assert!(ci(-1.0).is_err());
    }

    #[test]
    fn gamma_values() {
        let g = gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((g.re - 24.0).abs() < 1e-11 && g.im.abs() < 1e-11);
        let g = gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-13);
        let g = gamma(Complex64::new(-1.5, 0.0)).unwrap();
        assert!((g.re - 4.0 * PI.sqrt() / 3.0).abs() < 1e-12);
        // |Γ(1/2 + it)|² = π / cosh(πt)
        for t in [1.0, 10.0, 100.0] {
            let lg = ln_gamma(Complex64::new(0.5, t)).unwrap();
            let want = 0.5 * (PI.ln() - (PI * t).cosh().ln());
            assert!((lg.re - want).abs() < 1e-11 * want.abs().max(1.0), "t={t}");
        }
        assert!(gamma(Complex64::new(-2.0, 0.0)).is_err());
    }
}
