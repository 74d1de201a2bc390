//! Prime tables, the logarithmic integral and divisor arithmetic.

use crate::error::{Error, Result};
use crate::special::EULER_GAMMA;
use num_complex::Complex64;
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

/// The first `count` primes in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn count(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// p_k, one-based.
    pub fn nth(&self, k: usize) -> u64 {
        self.primes[k - 1]
    }

    /// Largest prime in the table.
    pub fn last(&self) -> u64 {
        *self.primes.last().expect("table is nonempty")
    }

    /// The first `n` primes, or invalid-argument if the table is too short.
    pub fn prefix(&self, n: usize) -> Result<&[u64]> {
        self.check_level(n)?;
        Ok(&self.primes[..n])
    }

    pub(crate) fn check_level(&self, n: usize) -> Result<()> {
        if n > self.count() {
            return Err(Error::invalid(format!(
                "truncation level {n} exceeds prime table of {}",
                self.count()
            )));
        }
        Ok(())
    }

    /// Number of table primes ≤ x.
    pub fn pi(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    fn validate(primes: Vec<u64>) -> Result<Self> {
        if primes.first() != Some(&2) {
            return Err(Error::invalid("prime table must start at 2"));
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("prime table is not strictly increasing"));
        }
        Ok(PrimeTable { primes })
    }

    /// Write the cache format: u64 LE count, then `count` u64 LE entries.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(fs::File::create(&tmp)?);
            w.write_all(&(self.count() as u64).to_le_bytes())?;
            for p in &self.primes {
                w.write_all(&p.to_le_bytes())?;
            }
            w.flush()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(fs::File::open(path)?);
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)?;
        let count = u64::from_le_bytes(buf) as usize;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != 8 * count {
            return Err(Error::invalid(format!(
                "cache {} declares {count} entries but holds {} bytes",
                path.display(),
                bytes.len()
            )));
        }
        let primes = bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::validate(primes)
    }

    /// Load `dir/primes-{count}.bin` if present and valid, else build and store it.
    pub fn load_or_build(count: usize, dir: &Path) -> Result<Self> {
        let path = cache_path(dir, count);
        if let Ok(t) = Self::read_cache(&path) {
            if t.count() == count {
                return Ok(t);
            }
        }
        let t = build_prime_table(count)?;
        fs::create_dir_all(dir)?;
        t.write_cache(&path)?;
        Ok(t)
    }
}

pub fn cache_path(dir: &Path, count: usize) -> PathBuf {
    dir.join(format!("primes-{count}.bin"))
}

/// Upper bound for p_n (Rosser–Schoenfeld for n ≥ 6).
fn nth_prime_upper_bound(n: usize) -> u64 {
    if n < 6 {
        return 15;
    }
    let x = n as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 1
}

/// All primes ≤ limit by a segmented odd-only sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if limit < 2 {
        return out;
    }
    out.push(2);
    let root = (limit as f64).sqrt() as u64 + 1;
    let mut base = Vec::new();
    {
        let mut small = vec![true; (root + 1) as usize];
        let mut i = 3;
        while i * i <= root {
            if small[i as usize] {
                let mut j = i * i;
                while j <= root {
                    small[j as usize] = false;
                    j += 2 * i;
                }
            }
            i += 2;
        }
        let mut i = 3;
        while i <= root {
            if small[i as usize] {
                base.push(i);
            }
            i += 2;
        }
    }
    // Segment of odd numbers lo, lo+2, ..., covering SEG values.
    const SEG: u64 = 1 << 18;
    let mut seg = vec![true; SEG as usize];
    let mut lo = 3u64;
    while lo <= limit {
        let hi = (lo + 2 * SEG).min(limit + 1);
        let len = (hi - lo).div_ceil(2) as usize;
        seg[..len].fill(true);
        for &p in &base {
            if p * p >= hi {
                break;
            }
            let mut start = (p * p).max(lo.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut j = ((start - lo) / 2) as usize;
            while j < len {
                seg[j] = false;
                j += p as usize;
            }
        }
        for (j, &is_p) in seg[..len].iter().enumerate() {
            if is_p {
                out.push(lo + 2 * j as u64);
            }
        }
        lo = hi + (hi % 2 == 0) as u64;
    }
    out
}

pub fn build_prime_table(count: usize) -> Result<PrimeTable> {
    if count == 0 {
        return Err(Error::invalid("prime table count must be ≥ 1"));
    }
    let mut primes = primes_up_to(nth_prime_upper_bound(count));
    primes.truncate(count);
    debug_assert_eq!(primes.len(), count);
    PrimeTable::validate(primes)
}

/// Principal-value logarithmic integral ∫₀^x dt / log t.
///
/// Evaluated by the Ramanujan series, which converges for every x > 1
/// without cancellation.
pub fn li(x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::domain(format!("li requires x > 1, got {x}")));
    }
    if !x.is_finite() {
        return Err(Error::domain("li requires finite x"));
    }
    let l = x.ln();
    // li(x) = γ + ln ln x + √x Σ_{n≥1} (−1)^{n−1} lⁿ / (n! 2^{n−1}) Σ_{k=0}^{⌊(n−1)/2⌋} 1/(2k+1)
    let mut sum = 0.0;
    let mut fact_pow = 1.0; // lⁿ / (n! 2^{n−1})
    let mut inner = 0.0;
    for n in 1..2000u32 {
        fact_pow *= if n == 1 { l } else { l / (n as f64 * 2.0) };
        if (n - 1) % 2 == 0 {
            inner += 1.0 / n as f64;
        }
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * fact_pow * inner;
        sum += term;
        if n > 5 && term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    Ok(EULER_GAMMA + l.ln() + x.sqrt() * sum)
}

/// Soldner's constant, the positive zero of li.
const SOLDNER: f64 = 1.451_369_234_883_381_1;

/// The unique x > μ with li(x) = y, by bracketed Newton iteration.
pub fn li_inverse(y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain(format!("li_inverse requires y > 0, got {y}")));
    }
    let mut lo = SOLDNER;
    let mut hi = 2.0f64;
    while li(hi)? < y {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::range("li_inverse bracket overflow"));
        }
    }
    let mut x = (y * y.max(2.0).ln()).clamp(lo, hi);
    for _ in 0..200 {
        let f = li(x)? - y;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - f * x.ln();
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x || hi - lo <= 1e-15 * hi {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::numeric(format!("li_inverse({y}) did not converge")))
}

/// Prime factorization by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn sigma_from_factors(factors: impl Iterator<Item = (u64, u32)>, q: Complex64) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for (p, e) in factors {
        let pq = (q * (p as f64).ln()).exp();
        let mut term = Complex64::new(1.0, 0.0);
        let mut s = term;
        for _ in 0..e {
            term *= pq;
            s += term;
        }
        prod *= s;
    }
    prod
}

/// σ_q(n) = Σ_{d|n} d^q, via the multiplicative structure.
pub fn sigma_q(n: u64, q: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::invalid("sigma_q requires n ≥ 1"));
    }
    Ok(sigma_from_factors(factorize(n).into_iter(), q))
}

/// σ_q(n; N): divisors whose prime factors are all ≤ p_N.
pub fn sigma_q_smooth(n: u64, q: Complex64, level: usize, table: &PrimeTable) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::invalid("sigma_q_smooth requires n ≥ 1"));
    }
    if level == 0 {
        return Err(Error::invalid("smoothness level must be ≥ 1"));
    }
    table.check_level(level)?;
    let bound = table.nth(level);
    Ok(sigma_from_factors(factorize(n).into_iter().filter(|&(p, _)| p <= bound), q))
}

/// D_{ia}(T) = Σ_{n≤T} σ_{−ia}(n), or its p_N-smooth variant.
///
/// Sweeps d = 1..⌊T⌋ adding d^{−ia} to every multiple's bin, then sums the
/// bins in order.
pub fn divisor_sum(t: f64, a: f64, smooth: Option<(usize, &PrimeTable)>) -> Result<Complex64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("divisor_sum requires finite T ≥ 0, got {t}")));
    }
    let m = t.floor() as usize;
    if m == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let allowed = match smooth {
        None => None,
        Some((level, table)) => {
            if level == 0 {
                return Err(Error::invalid("smoothness level must be ≥ 1"));
            }
            table.check_level(level)?;
            Some(smooth_mask(m, table.nth(level)))
        }
    };
    let mut re = vec![0.0f64; m + 1];
    let mut im = vec![0.0f64; m + 1];
    for d in 1..=m {
        if let Some(mask) = &allowed {
            if !mask[d] {
                continue;
            }
        }
        let (s, c) = (-a * (d as f64).ln()).sin_cos();
        let mut k = d;
        while k <= m {
            re[k] += c;
            im[k] += s;
            k += d;
        }
    }
    Ok(Complex64::new(re.iter().sum(), im.iter().sum()))
}

/// mask[d] = all prime factors of d are ≤ bound, for d ≤ m.
pub(crate) fn smooth_mask(m: usize, bound: u64) -> Vec<bool> {
    let mut mask = vec![true; m + 1];
    for p in primes_up_to(m as u64) {
        if p > bound {
            let mut k = p as usize;
            while k <= m {
                mask[k] = false;
                k += p as usize;
            }
        }
    }
    mask
}
