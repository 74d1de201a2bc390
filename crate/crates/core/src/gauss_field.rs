//! The Gaussian field 𝒢_N, its covariance Ψ_N, the prime-block structure with
//! frozen blocks, and the empirical check of the block-sum coupling.

use crate::error::{Error, Result};
use crate::euler_field::RandomPhases;
use crate::grid::{exp_sum_on_grid, GridSpec};
use crate::prime_tools::PrimeTable;
use crate::rng;
use crate::spectral_norms::wasserstein_planar;
use crate::zeta_numeric::zeta_em;
use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::TAU;
use std::ops::{Range, RangeInclusive};

/// Standard normals W_k^{(1)}, W_k^{(2)}, k = 1..N.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDraws {
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub seed: u64,
    pub stream_id: u64,
}

impl GaussianDraws {
    pub fn len(&self) -> usize {
        self.w1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w1.is_empty()
    }

    pub fn zeros(n: usize) -> Self {
        GaussianDraws { w1: vec![0.0; n], w2: vec![0.0; n], seed: 0, stream_id: 0 }
    }

    pub(crate) fn check_level(&self, n: usize) -> Result<()> {
        if n > self.len() {
            return Err(Error::invalid(format!("truncation level {n} exceeds {} draws", self.len())));
        }
        Ok(())
    }
}

/// Pairs (W^{(1)}_k, W^{(2)}_k) drawn in order, so longer requests extend shorter ones.
pub fn sample_gaussian_draws(n: usize, seed: u64, stream_id: u64) -> GaussianDraws {
    let mut r = rng::stream(seed, stream_id);
    let mut w1 = Vec::with_capacity(n);
    let mut w2 = Vec::with_capacity(n);
    for _ in 0..n {
        w1.push(StandardNormal.sample(&mut r));
        w2.push(StandardNormal.sample(&mut r));
    }
    GaussianDraws { w1, w2, seed, stream_id }
}

/// 𝒢_N(x) = Σ_{k≤N} (2p_k)^{−1/2} p_k^{−ix} (W_k^{(1)} + iW_k^{(2)}).
pub fn gauss_field_eval(x: f64, draws: &GaussianDraws, n: usize, table: &PrimeTable) -> Result<Complex64> {
    draws.check_level(n)?;
    let primes = table.prefix(n)?;
    let mut s = Complex64::new(0.0, 0.0);
    for (k, &p) in primes.iter().enumerate() {
        let pf = p as f64;
        let w = Complex64::new(draws.w1[k], draws.w2[k]);
        s += w * Complex64::from_polar((2.0 * pf).sqrt().recip(), -x * pf.ln());
    }
    Ok(s)
}

pub fn gauss_field_on_grid(draws: &GaussianDraws, n: usize, table: &PrimeTable, grid: &GridSpec) -> Result<Vec<Complex64>> {
    draws.check_level(n)?;
    let primes = table.prefix(n)?;
    let coef: Vec<Complex64> = primes
        .iter()
        .enumerate()
        .map(|(k, &p)| Complex64::new(draws.w1[k], draws.w2[k]) / (2.0 * p as f64).sqrt())
        .collect();
    let freq: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
    Ok(exp_sum_on_grid(&coef, &freq, grid))
}

/// Ψ_N(u) = ½ Σ_{k≤N} cos(u log p_k)/p_k.
pub fn psi_covariance(u: f64, n: usize, table: &PrimeTable) -> Result<f64> {
    let primes = table.prefix(n)?;
    Ok(0.5 * primes.iter().map(|&p| (u * (p as f64).ln()).cos() / p as f64).sum::<f64>())
}

/// ½ Σ_{k≤N} 1/p_k, the variance of Re 𝒢_N.
pub fn selberg_variance(n: usize, table: &PrimeTable) -> Result<f64> {
    psi_covariance(0.0, n, table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// A(u) = Σ_{k=2}^{j_max} Σ_{p ≤ p_count} p^{−k(1+iu)}/k, with a bound on the
/// omitted terms (k > j_max, or p beyond the table prefix).
pub fn prime_power_tail(u: f64, j_max: usize, table: &PrimeTable, p_count: usize) -> Result<(Complex64, f64)> {
    if j_max < 2 {
        return Err(Error::invalid("j_max must be ≥ 2"));
    }
    let primes = table.prefix(p_count)?;
    let mut a = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    for &p in primes {
        let pf = p as f64;
        let z = Complex64::from_polar(1.0 / pf, -u * pf.ln());
        let mut zk = z;
        for k in 2..=j_max {
            zk *= z;
            a += zk / k as f64;
        }
        tail += pf.powi(-(j_max as i32 + 1)) / ((j_max + 1) as f64 * (1.0 - 1.0 / pf));
    }
    // Σ_{p>P} Σ_{k≥2} p^{−k}/k ≤ Σ_{n>P} 1/(2n(n−1)) = 1/(2P)
    tail += 0.5 / primes[p_count - 1] as f64;
    Ok((a, tail))
}

/// The limit Ψ_∞(u) = ½ Re(log ζ(1+iu) − A(u)).
pub fn psi_limit_via_zeta(u: f64, j_max: usize, table: &PrimeTable, p_count: usize) -> Result<TruncatedValue> {
    if u == 0.0 {
        return Err(Error::domain("Ψ has a logarithmic singularity at u = 0"));
    }
    let z = zeta_em(Complex64::new(1.0, u))?;
    let (a, tail) = prime_power_tail(u, j_max, table, p_count)?;
    Ok(TruncatedValue { value: 0.5 * (z.norm().ln() - a.re), tail_bound: 0.5 * tail })
}

/// Block boundaries r_1 = 1, r_m = ⌊exp(3 log² m)⌋.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSequence {
    pub boundaries: Vec<u64>,
}

pub fn block_boundaries(m: usize) -> Result<BlockSequence> {
    if m == 0 {
        return Err(Error::invalid("need at least one block boundary"));
    }
    let mut boundaries = Vec::with_capacity(m);
    for k in 1..=m {
        let l = (k as f64).ln();
        let r = (3.0 * l * l).exp().floor();
        if !(r < 9.0e18) {
            return Err(Error::range(format!("r_{k} overflows 64 bits")));
        }
        boundaries.push(r as u64);
    }
    Ok(BlockSequence { boundaries })
}

impl BlockSequence {
    /// r_m, one-based.
    pub fn r(&self, m: usize) -> u64 {
        self.boundaries[m - 1]
    }

    /// Number of complete blocks (block m needs r_{m+1}).
    pub fn n_blocks(&self) -> usize {
        self.boundaries.len().saturating_sub(1)
    }

    /// Zero-based prime indices of block m: r_m − 1 .. r_{m+1} − 1.
    pub fn block(&self, m: usize) -> Result<Range<usize>> {
        if m == 0 || m > self.n_blocks() {
            return Err(Error::invalid(format!("block {m} outside 1..={}", self.n_blocks())));
        }
        Ok(self.r(m) as usize - 1..self.r(m + 1) as usize - 1)
    }

    /// Largest m with r_{m+1} ≤ count.
    pub fn max_block_within(&self, count: usize) -> usize {
        (1..=self.n_blocks()).take_while(|&m| self.r(m + 1) as usize <= count).last().unwrap_or(0)
    }

    /// Block ranges checked against the available randomness and primes.
    pub fn block_checked(&self, m: usize, available: usize) -> Result<Range<usize>> {
        let r = self.block(m)?;
        if m > self.max_block_within(available) {
            return Err(Error::range(format!(
                "block {m} needs r_{{m+1}} = {} ≤ {available}",
                self.r(m + 1)
            )));
        }
        Ok(r)
    }
}

/// b_m = √(½ Σ_{j ∈ block m} 1/p_j).
pub fn block_scale(m: usize, blocks: &BlockSequence, table: &PrimeTable) -> Result<f64> {
    let r = blocks.block_checked(m, table.count())?;
    Ok((0.5 * table.primes()[r].iter().map(|&p| 1.0 / p as f64).sum::<f64>()).sqrt())
}

pub enum BlockSource<'a> {
    Phases(&'a RandomPhases),
    Gaussian(&'a GaussianDraws),
}

/// Ỹ_m(x) = p_{r_m}^{−ix}(C_m + iS_m) for phases, Z̃_m(x) = b_m p_{r_m}^{−ix}(V^{(1)} + iV^{(2)})
/// for Gaussian draws, with b_m V^{(i)} = Σ_{j ∈ block} W_j^{(i)}/√(2p_j).
pub fn frozen_block(x: f64, m: usize, source: &BlockSource, blocks: &BlockSequence, table: &PrimeTable) -> Result<Complex64> {
    let available = match source {
        BlockSource::Phases(p) => p.len(),
        BlockSource::Gaussian(d) => d.len(),
    };
    let range = blocks.block_checked(m, available.min(table.count()))?;
    let primes = table.primes();
    let mut s = Complex64::new(0.0, 0.0);
    for k in range.clone() {
        let pf = primes[k] as f64;
        s += match source {
            BlockSource::Phases(ph) => Complex64::from_polar(pf.sqrt().recip(), TAU * ph.theta[k]),
            BlockSource::Gaussian(d) => Complex64::new(d.w1[k], d.w2[k]) / (2.0 * pf).sqrt(),
        };
    }
    let lead = primes[range.start] as f64;
    Ok(s * Complex64::from_polar(1.0, -x * lead.ln()))
}

/// The unfrozen block sum Y_m(x) or Z_m(x).
pub fn block_sum(x: f64, m: usize, source: &BlockSource, blocks: &BlockSequence, table: &PrimeTable) -> Result<Complex64> {
    let available = match source {
        BlockSource::Phases(p) => p.len(),
        BlockSource::Gaussian(d) => d.len(),
    };
    let range = blocks.block_checked(m, available.min(table.count()))?;
    let primes = table.primes();
    let mut s = Complex64::new(0.0, 0.0);
    for k in range {
        let pf = primes[k] as f64;
        let rot = Complex64::from_polar(1.0, -x * pf.ln());
        s += rot
            * match source {
                BlockSource::Phases(ph) => Complex64::from_polar(pf.sqrt().recip(), TAU * ph.theta[k]),
                BlockSource::Gaussian(d) => Complex64::new(d.w1[k], d.w2[k]) / (2.0 * pf).sqrt(),
            };
    }
    Ok(s)
}

/// Ẽ_2 restricted to the given blocks:
/// Σ_m Σ_{k ∈ block m} f_k(x)(e^{2πiθ_k} − (W_k^{(1)} + iW_k^{(2)})/√2),
/// f_k(x) = p_k^{−1/2}(p_k^{−ix} − p_{r_m}^{−ix}).
pub fn freezing_error_blocks(
    x: f64,
    block_range: RangeInclusive<usize>,
    phases: &RandomPhases,
    draws: &GaussianDraws,
    blocks: &BlockSequence,
    table: &PrimeTable,
) -> Result<Complex64> {
    if phases.len() != draws.len() {
        return Err(Error::invalid(format!(
            "phases ({}) and draws ({}) must share one index set",
            phases.len(),
            draws.len()
        )));
    }
    let primes = table.primes();
    let mut total = Complex64::new(0.0, 0.0);
    for m in block_range {
        let range = blocks.block_checked(m, phases.len().min(table.count()))?;
        let lead = Complex64::from_polar(1.0, -x * (primes[range.start] as f64).ln());
        for k in range {
            let pf = primes[k] as f64;
            let f = (Complex64::from_polar(1.0, -x * pf.ln()) - lead) / pf.sqrt();
            let noise = Complex64::from_polar(1.0, TAU * phases.theta[k])
                - Complex64::new(draws.w1[k], draws.w2[k]) / 2f64.sqrt();
            total += f * noise;
        }
    }
    Ok(total)
}

/// Ẽ_{2,n}(x): blocks 1..=n.
pub fn freezing_error(
    x: f64,
    n_blocks: usize,
    phases: &RandomPhases,
    draws: &GaussianDraws,
    blocks: &BlockSequence,
    table: &PrimeTable,
) -> Result<Complex64> {
    freezing_error_blocks(x, 1..=n_blocks, phases, draws, blocks, table)
}

/// Σ_k sup_{x∈[0,1]} |f_k(x)|² over the given blocks.
pub fn freezing_envelope(block_range: RangeInclusive<usize>, blocks: &BlockSequence, table: &PrimeTable) -> Result<f64> {
    let primes = table.primes();
    let mut s = 0.0;
    for m in block_range {
        let range = blocks.block_checked(m, table.count())?;
        let lead = primes[range.start] as f64;
        for k in range {
            let pf = primes[k] as f64;
            // |p^{−ix} − q^{−ix}|² = 2 − 2cos(x log(p/q)) is maximal at x = 1 on [0, 1]
            let d = (pf / lead).ln().min(std::f64::consts::PI);
            s += (2.0 - 2.0 * d.cos()) / pf;
        }
    }
    Ok(s)
}

/// Normalized block sums (C_m, S_m)/b_m for independent phase draws.
pub fn normalized_block_samples(m: usize, n_samples: usize, seed: u64, blocks: &BlockSequence, table: &PrimeTable) -> Result<Vec<[f64; 2]>> {
    let range = blocks.block_checked(m, table.count())?;
    let b = block_scale(m, blocks, table)?;
    let primes = &table.primes()[range];
    let amp: Vec<f64> = primes.iter().map(|&p| (p as f64).sqrt().recip()).collect();
    use rayon::prelude::*;
    Ok((0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, rng::derive(m as u64, i));
            let (mut c, mut s) = (0.0, 0.0);
            for a in &amp {
                let (sn, cs) = (TAU * rng::unit_f64(r.next_u64())).sin_cos();
                c += a * cs;
                s += a * sn;
            }
            [c / b, s / b]
        })
        .collect())
}

/// Independent standard planar Gaussian samples.
pub fn planar_gaussian_samples(n_samples: usize, seed: u64, stream_id: u64) -> Vec<[f64; 2]> {
    let d = sample_gaussian_draws(n_samples, seed, stream_id);
    d.w1.into_iter().zip(d.w2).map(|(a, b)| [a, b]).collect()
}

/// Empirical W₁ between n normalized block sums of block m and n standard
/// planar Gaussians, by exact assignment.
pub fn coupling_w1_estimate(m: usize, n_samples: usize, seed: u64, table: &PrimeTable) -> Result<f64> {
    let reference = planar_gaussian_samples(n_samples, seed, rng::name_tag("coupling-reference"));
    coupling_w1_against(m, n_samples, seed, &reference, table)
}

/// As [`coupling_w1_estimate`] with a caller-supplied Gaussian reference set.
pub fn coupling_w1_against(m: usize, n_samples: usize, seed: u64, reference: &[[f64; 2]], table: &PrimeTable) -> Result<f64> {
    if n_samples < 64 || n_samples % 2 != 0 {
        return Err(Error::invalid("n_samples must be even and ≥ 64"));
    }
    if reference.len() != n_samples {
        return Err(Error::invalid("reference set size must equal n_samples"));
    }
    let blocks = block_boundaries(m + 1)?;
    let samples = normalized_block_samples(m, n_samples, seed, &blocks, table)?;
    wasserstein_planar(&samples, reference)
}
