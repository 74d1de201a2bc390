//! Small sample-statistics helpers shared by the Monte Carlo checks.
//!
//! All reductions run sequentially over slices in index order so results do
//! not depend on the worker count that produced the samples.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    /// |mean − target| ≤ k·SE.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se
    }

    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.se
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEstimate {
    pub mean: Complex64,
    pub se_re: f64,
    pub se_im: f64,
    pub n: usize,
}

impl ComplexEstimate {
    /// Real and imaginary parts each within k standard errors.
    pub fn within(&self, target: Complex64, k: f64) -> bool {
        (self.mean.re - target.re).abs() <= k * self.se_re
            && (self.mean.im - target.im).abs() <= k * self.se_im
    }

    pub fn re(&self) -> Estimate {
        Estimate { mean: self.mean.re, se: self.se_re, n: self.n }
    }

    pub fn im(&self) -> Estimate {
        Estimate { mean: self.mean.im, se: self.se_im, n: self.n }
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

pub fn mean_se(xs: &[f64]) -> Estimate {
    let n = xs.len();
    Estimate { mean: mean(xs), se: (variance(xs) / n as f64).sqrt(), n }
}

pub fn complex_mean_se(zs: &[Complex64]) -> ComplexEstimate {
    let re: Vec<f64> = zs.iter().map(|z| z.re).collect();
    let im: Vec<f64> = zs.iter().map(|z| z.im).collect();
    let r = mean_se(&re);
    let i = mean_se(&im);
    ComplexEstimate { mean: Complex64::new(r.mean, i.mean), se_re: r.se, se_im: i.se, n: zs.len() }
}

/// Sample variance with a standard error from the fourth central moment.
pub fn variance_se(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let m = mean(xs);
    let v = variance(xs);
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    let var_of_var = (m4 - v * v * (n - 3.0) / (n - 1.0)) / n;
    Estimate { mean: v, se: var_of_var.max(0.0).sqrt(), n: xs.len() }
}

pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    covariance(xs, ys) / (variance(xs) * variance(ys)).sqrt()
}

/// Sample skewness with its large-sample standard error √(6/n).
pub fn skewness(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let m = mean(xs);
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    Estimate { mean: m3 / m2.powf(1.5), se: (6.0 / n).sqrt(), n: xs.len() }
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Linear-interpolation quantile (type 7).
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Kendall's tau-a between two equally long sequences.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let a = (xs[j] - xs[i]).signum() * (ys[j] - ys[i]).signum();
            if a > 0.0 {
                s += 1;
            } else if a < 0.0 {
                s -= 1;
            }
        }
    }
    s as f64 / (n * (n - 1) / 2) as f64
}

/// Kendall tau of a sequence against its index order.
pub fn trend_tau(ys: &[f64]) -> f64 {
    let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
    kendall_tau(&xs, ys)
}

/// Number of adjacent pairs that fail to decrease strictly.
pub fn decrease_violations(ys: &[f64]) -> usize {
    ys.windows(2).filter(|w| !(w[1] < w[0])).count()
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF; returns (D, p).
pub fn ks_test(xs: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let en = n.sqrt();
    (d, kolmogorov_q((en + 0.12 + 0.11 / en) * d))
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
