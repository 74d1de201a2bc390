//! Real chaos measures |ζ_{N,rand}(½+ix)|^β dx / E|·|^β on [0,1], their
//! critical rescaling, the Gaussian reference measures and the complex chaos ν_N.

use crate::error::{Error, Result};
use crate::euler_field::{log_field, sample_phases, RandomPhases};
use crate::gauss_field::{gauss_field_on_grid, sample_gaussian_draws, selberg_variance, GaussianDraws};
use crate::grid::{GridField, GridSpec};
use crate::prime_tools::PrimeTable;
use crate::quad::{integrate, QuadOptions};
use crate::stats::{mean_se, Estimate};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Critical inverse temperature.
pub const BETA_C: f64 = 2.0;

/// E|1 − p^{−1/2}e^{iφ}|^{−β} over uniform φ, by adaptive quadrature.
pub fn moment_factor(p: u64, beta: f64) -> Result<f64> {
    if p < 2 {
        return Err(Error::invalid(format!("moment_factor needs p ≥ 2, got {p}")));
    }
    if beta == 0.0 {
        return Ok(1.0);
    }
    let r2 = 1.0 / p as f64;
    let r = r2.sqrt();
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, ..QuadOptions::default() };
    // symmetric in φ ↦ −φ, so half the circle suffices
    let v = integrate(|phi| (1.0 - 2.0 * r * phi.cos() + r2).powf(-0.5 * beta), 0.0, PI, opts)?;
    Ok(v / PI)
}

/// Per-prime factors E|1 − p_k^{−1/2}e^{2πiθ}|^{−β} and their running products.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationTable {
    pub beta: f64,
    pub factors: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl NormalizationTable {
    pub fn new(beta: f64, n: usize, table: &PrimeTable) -> Result<Self> {
        let primes = table.prefix(n)?;
        let factors = primes.par_iter().map(|&p| moment_factor(p, beta)).collect::<Result<Vec<f64>>>()?;
        let mut acc = 1.0;
        let cumulative = factors.iter().map(|f| {
            acc *= f;
            acc
        }).collect();
        Ok(NormalizationTable { beta, factors, cumulative })
    }

    /// E|ζ_{N,rand}(½+ix)|^β.
    pub fn at(&self, n: usize) -> Result<f64> {
        match n {
            0 => Ok(1.0),
            _ if n <= self.cumulative.len() => Ok(self.cumulative[n - 1]),
            _ => Err(Error::invalid(format!("table holds {} factors, asked for {n}", self.cumulative.len()))),
        }
    }
}

pub fn normalization(n: usize, beta: f64, table: &PrimeTable) -> Result<f64> {
    NormalizationTable::new(beta, n, table)?.at(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosMeasureSample {
    pub beta: f64,
    pub n: usize,
    pub grid: GridSpec,
    pub density: Vec<f64>,
    pub normalization: f64,
    pub critical_factor: Option<f64>,
}

impl ChaosMeasureSample {
    /// β = 2 without the √(log log N) factor degenerates as N grows.
    pub fn sub_normalized(&self) -> bool {
        self.beta == BETA_C && self.critical_factor.is_none()
    }

    /// Trapezoid mass.
    pub fn mass(&self) -> f64 {
        self.grid.trapezoid_weights().iter().zip(&self.density).map(|(w, d)| w * d).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,density\n");
        for (x, d) in self.grid.points().iter().zip(&self.density) {
            s.push_str(&format!("{x},{d}\n"));
        }
        s
    }
}

fn check_measure_grid(grid: &GridSpec) -> Result<()> {
    if grid.x0 < 0.0 || grid.x1 > 1.0 {
        return Err(Error::invalid("chaos measures live on [0, 1]"));
    }
    Ok(())
}

/// Default measure grid: 513 points on [0, 1].
pub fn measure_grid() -> GridSpec {
    GridSpec::unit(513).expect("static grid")
}

/// As [`subcritical_measure`] with a precomputed normalization table.
pub fn subcritical_measure_with(
    phases: &RandomPhases,
    n: usize,
    grid: &GridSpec,
    table: &PrimeTable,
    norm: &NormalizationTable,
) -> Result<ChaosMeasureSample> {
    check_measure_grid(grid)?;
    let beta = norm.beta;
    if !(beta > 0.0) {
        return Err(Error::invalid("beta must be positive"));
    }
    let z = norm.at(n)?;
    let logs = log_field(phases, n, table, grid)?;
    let density = logs.iter().map(|l| (beta * l.re).exp() / z).collect();
    Ok(ChaosMeasureSample { beta, n, grid: *grid, density, normalization: z, critical_factor: None })
}

pub fn subcritical_measure(phases: &RandomPhases, n: usize, beta: f64, grid: &GridSpec, table: &PrimeTable) -> Result<ChaosMeasureSample> {
    let norm = NormalizationTable::new(beta, n, table)?;
    subcritical_measure_with(phases, n, grid, table, &norm)
}

/// √(log log N).
pub fn critical_factor(n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::invalid(format!("critical scaling needs N ≥ 16, got {n}")));
    }
    Ok((n as f64).ln().ln().sqrt())
}

pub fn critical_measure_with(
    phases: &RandomPhases,
    n: usize,
    grid: &GridSpec,
    table: &PrimeTable,
    norm: &NormalizationTable,
) -> Result<ChaosMeasureSample> {
    if norm.beta != BETA_C {
        return Err(Error::invalid("critical measure needs a β = 2 normalization table"));
    }
    let c = critical_factor(n)?;
    let mut s = subcritical_measure_with(phases, n, grid, table, norm)?;
    s.density.iter_mut().for_each(|d| *d *= c);
    s.critical_factor = Some(c);
    Ok(s)
}

pub fn critical_measure(phases: &RandomPhases, n: usize, grid: &GridSpec, table: &PrimeTable) -> Result<ChaosMeasureSample> {
    critical_factor(n)?;
    let norm = NormalizationTable::new(BETA_C, n, table)?;
    critical_measure_with(phases, n, grid, table, &norm)
}

/// e^{βG_N(x) − β²Var/2} with G_N = Re 𝒢_N and Var = Σ 1/(2p_k).
pub fn gaussian_reference_measure(draws: &GaussianDraws, n: usize, beta: f64, grid: &GridSpec, table: &PrimeTable) -> Result<ChaosMeasureSample> {
    check_measure_grid(grid)?;
    if !(beta > 0.0) {
        return Err(Error::invalid("beta must be positive"));
    }
    let var = selberg_variance(n, table)?;
    let g = gauss_field_on_grid(draws, n, table, grid)?;
    let shift = 0.5 * beta * beta * var;
    let density = g.iter().map(|v| (beta * v.re - shift).exp()).collect();
    Ok(ChaosMeasureSample { beta, n, grid: *grid, density, normalization: shift.exp(), critical_factor: None })
}

/// ν_N(x) = exp 𝒢_N(x).
pub fn complex_chaos_field(draws: &GaussianDraws, n: usize, grid: &GridSpec, table: &PrimeTable) -> Result<GridField> {
    let g = gauss_field_on_grid(draws, n, table, grid)?;
    GridField::new(*grid, g.into_iter().map(|v| v.exp()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    /// |ζ_{N,rand}|^β normalized exactly.
    EulerProduct,
    /// The Gaussian reference e^{βG_N − β²Var/2}.
    GaussianReference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassMoment {
    pub estimate: Estimate,
    /// p_order ≥ 4/β²: the limiting moment is infinite.
    pub heavy_tail: bool,
    /// SE from all draws over SE from the first quarter; ≈ ½ for finite variance.
    pub se_shrink: f64,
}

/// Total masses of independent draws on the default grid; draw i uses stream i.
pub fn sample_masses(kind: MeasureKind, beta: f64, n: usize, n_draws: usize, seed: u64, table: &PrimeTable) -> Result<Vec<f64>> {
    let grid = measure_grid();
    match kind {
        MeasureKind::EulerProduct => {
            let norm = NormalizationTable::new(beta, n, table)?;
            (0..n_draws as u64)
                .into_par_iter()
                .map(|i| Ok(subcritical_measure_with(&sample_phases(n, seed, i), n, &grid, table, &norm)?.mass()))
                .collect()
        }
        MeasureKind::GaussianReference => (0..n_draws as u64)
            .into_par_iter()
            .map(|i| Ok(gaussian_reference_measure(&sample_gaussian_draws(n, seed, i), n, beta, &grid, table)?.mass()))
            .collect(),
    }
}

/// Monte Carlo E[mass^p].
pub fn mass_moment(kind: MeasureKind, beta: f64, n: usize, p_order: f64, n_draws: usize, seed: u64, table: &PrimeTable) -> Result<MassMoment> {
    if !(p_order >= 1.0) {
        return Err(Error::invalid("p_order must be ≥ 1"));
    }
    if n_draws < 8 {
        return Err(Error::invalid("need at least 8 draws"));
    }
    let powers: Vec<f64> = sample_masses(kind, beta, n, n_draws, seed, table)?.into_iter().map(|m| m.powf(p_order)).collect();
    let estimate = mean_se(&powers);
    let quarter = mean_se(&powers[..n_draws / 4]);
    Ok(MassMoment {
        estimate,
        heavy_tail: p_order >= 4.0 / (beta * beta),
        se_shrink: estimate.se / quarter.se,
    })
}

/// Per-draw masses at each level of `levels` from one nested phase sequence per draw.
pub fn nested_masses(beta: f64, levels: &[usize], n_draws: usize, seed: u64, table: &PrimeTable) -> Result<Vec<Vec<f64>>> {
    let top = *levels.iter().max().ok_or_else(|| Error::invalid("no levels"))?;
    let norm = NormalizationTable::new(beta, top, table)?;
    let grid = measure_grid();
    let per_draw: Vec<Vec<f64>> = (0..n_draws as u64)
        .into_par_iter()
        .map(|i| {
            let ph = sample_phases(top, seed, i);
            levels.iter().map(|&n| Ok(subcritical_measure_with(&ph, n, &grid, table, &norm)?.mass())).collect()
        })
        .collect::<Result<_>>()?;
    Ok((0..levels.len()).map(|l| per_draw.iter().map(|d| d[l]).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::euler_field::zeta_n_eval;
    use crate::gauss_field::psi_covariance;
    use crate::prime_tools::build_prime_table;
    use crate::quad::composite_gl;
    use crate::stats::{complex_mean_se, correlation, mean, median};
    use std::sync::OnceLock;

    fn table() -> &'static PrimeTable {
        static T: OnceLock<PrimeTable> = OnceLock::new();
        T.get_or_init(|| build_prime_table(100_000).unwrap())
    }

    /// ₂F₁(β/2, β/2; 1; 1/p), the binomial-series value of the factor.
    fn hypergeometric_oracle(p: u64, beta: f64) -> f64 {
        let z = 1.0 / p as f64;
        let a = 0.5 * beta;
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 0..400 {
            let k = k as f64;
            term *= (a + k) * (a + k) / ((k + 1.0) * (k + 1.0)) * z;
            sum += term;
        }
        sum
    }

    #[test]
    fn moment_factors() {
        assert_eq!(moment_factor(2, 0.0).unwrap(), 1.0);
        assert!((moment_factor(2, 2.0).unwrap() - 2.0).abs() < 2e-10);
        assert!((moment_factor(5, 2.0).unwrap() - 1.25).abs() < 1.25e-10);
        for p in [2, 3, 7, 101, 7919] {
            for beta in [0.5, 1.0, 1.7, 3.0] {
                let got = moment_factor(p, beta).unwrap();
                let want = hypergeometric_oracle(p, beta);
                assert!(((got - want) / want).abs() < 1e-10, "p={p} β={beta}");
                assert!(got >= 1.0);
            }
        }
        assert!(moment_factor(1, 1.0).is_err());
    }

    #[test]
    fn normalizations() {
        let t = table();
        assert!((normalization(2, 2.0, t).unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(normalization(50, 0.0, t).unwrap(), 1.0);
        let nt = NormalizationTable::new(2.0, 1000, t).unwrap();
        assert!(nt.cumulative.windows(2).all(|w| w[1] >= w[0]));
        for n in [1, 10, 100, 1000] {
            let z = zeta_n_eval(Complex64::new(1.0, 0.0), n, t).unwrap().re;
            assert!(((nt.at(n).unwrap() - z) / z).abs() < 1e-9);
        }
        let nt = NormalizationTable::new(1.0, 100_000, t).unwrap();
        for n in [1000, 10_000, 100_000] {
            let ratio = nt.at(n).unwrap() / (t.nth(n) as f64).ln().powf(0.25);
            assert!((0.3..=3.0).contains(&ratio), "{n}: {ratio}");
        }
    }

    #[test]
    fn measure_basics() {
        let t = table();
        let g = measure_grid();
        let ph = sample_phases(100, 3, 0);
        let tiny = subcritical_measure(&ph, 100, 1e-12, &g, t).unwrap();
        assert!(tiny.density.iter().all(|d| (d - 1.0).abs() < 1e-9));
        assert!(subcritical_measure(&ph, 100, 0.0, &g, t).is_err());
        let s = subcritical_measure(&ph, 100, 2.0, &g, t).unwrap();
        assert!(s.sub_normalized() && s.density.iter().all(|&d| d >= 0.0));
        let c = critical_measure(&ph, 100, &g, t).unwrap();
        assert!(!c.sub_normalized());
        assert!((c.mass() / s.mass() - critical_factor(100).unwrap()).abs() < 1e-12);
        assert!(critical_measure(&ph, 15, &g, t).is_err());
        // e^e ≈ 15.15, so the factor sits just above 1 at N = 16
        assert!((critical_factor(16).unwrap() - 1.0).abs() < 0.02);
        let bad = GridSpec::new(-0.5, 1.0, 10).unwrap();
        assert!(subcritical_measure(&ph, 100, 1.0, &bad, t).is_err());
        assert!(s.to_csv().starts_with("x,density\n0,"));
    }

    #[test]
    fn unit_mean_mass() {
        let t = table();
        for beta in [0.5, 1.0, 2.0] {
            let m = sample_masses(MeasureKind::EulerProduct, beta, 100, 4000, 21, t).unwrap();
            assert!(mean_se(&m).within(1.0, 3.0), "β={beta}: {:?}", mean_se(&m));
        }
        let m = sample_masses(MeasureKind::GaussianReference, 1.0, 100, 4000, 22, t).unwrap();
        assert!(mean_se(&m).within(1.0, 3.0));
        let g = measure_grid();
        let c: Vec<f64> = (0..2000u64)
            .into_par_iter()
            .map(|i| critical_measure_with(&sample_phases(10_000, 23, i), 10_000, &g, t, &NormalizationTable::new(2.0, 10_000, t).unwrap()).unwrap().mass())
            .collect();
        assert!(mean_se(&c).within(critical_factor(10_000).unwrap(), 3.0));
    }

    /// E[mass²] from the per-prime pair factors E|1−re^{iφ}|^{−β}|1−re^{i(φ+u)}|^{−β}.
    fn pair_oracle(beta: f64, n: usize, t: &PrimeTable) -> f64 {
        let primes = t.prefix(n).unwrap();
        let m = 128;
        let pair = |p: u64, u: f64| -> f64 {
            let r = (p as f64).powf(-0.5);
            (0..m)
                .map(|k| {
                    let phi = 2.0 * PI * k as f64 / m as f64;
                    let a = Complex64::new(1.0, 0.0) - Complex64::from_polar(r, phi);
                    let b = Complex64::new(1.0, 0.0) - Complex64::from_polar(r, phi + u);
                    (a.norm() * b.norm()).powf(-beta)
                })
                .sum::<f64>()
                / m as f64
        };
        let (us, ws) = composite_gl(0.0, 1.0, 64, 16);
        let f: f64 = us
            .par_iter()
            .zip(&ws)
            .map(|(&u, &w)| {
                let c: f64 = primes.iter().map(|&p| pair(p, u * (p as f64).ln()) / hypergeometric_oracle(p, beta).powi(2)).product();
                2.0 * w * (1.0 - u) * c
            })
            .sum();
        f
    }

    #[test]
    fn second_moment_vs_pair_correlation() {
        let t = table();
        let m = sample_masses(MeasureKind::EulerProduct, 1.0, 100, 20_000, 31, t).unwrap();
        let sq: Vec<f64> = m.iter().map(|x| x * x).collect();
        let target = pair_oracle(1.0, 100, t);
        assert!(mean_se(&sq).within(target, 3.0), "{:?} vs {target}", mean_se(&sq));
    }

    #[test]
    fn gaussian_reference() {
        let t = table();
        let g = measure_grid();
        let z = GaussianDraws::zeros(100);
        let s = gaussian_reference_measure(&z, 100, 1.5, &g, t).unwrap();
        let want = (-0.5 * 1.5 * 1.5 * selberg_variance(100, t).unwrap()).exp();
        assert!(s.density.iter().all(|d| (d - want).abs() < 1e-15));
        let m = sample_masses(MeasureKind::GaussianReference, 1.0, 100, 20_000, 32, t).unwrap();
        let sq: Vec<f64> = m.iter().map(|x| x * x).collect();
        let (us, ws) = composite_gl(0.0, 1.0, 64, 16);
        let target: f64 = us.iter().zip(&ws).map(|(&u, &w)| 2.0 * w * (1.0 - u) * psi_covariance(u, 100, t).unwrap().exp()).sum();
        assert!(mean_se(&sq).within(target, 3.0), "{:?} vs {target}", mean_se(&sq));
    }

    #[test]
    fn complex_chaos() {
        let t = table();
        let g = GridSpec::new(0.0, 0.5, 6).unwrap();
        let one = complex_chaos_field(&GaussianDraws::zeros(20), 20, &g, t).unwrap();
        assert!(one.values.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        let fields: Vec<GridField> = (0..50_000u64)
            .into_par_iter()
            .map(|i| complex_chaos_field(&sample_gaussian_draws(20, 41, i), 20, &g, t).unwrap())
            .collect();
        let at0: Vec<Complex64> = fields.iter().map(|f| f.values[0]).collect();
        assert!(complex_mean_se(&at0).within(Complex64::new(1.0, 0.0), 3.0));
        for j in [1, 3, 5] {
            let pairs: Vec<Complex64> = fields.iter().map(|f| f.values[0] * f.values[j].conj()).collect();
            let u = -g.x(j);
            let target = t.prefix(20).unwrap().iter()
                .map(|&p| Complex64::from_polar(1.0 / p as f64, -u * (p as f64).ln()))
                .sum::<Complex64>()
                .exp();
            assert!(complex_mean_se(&pairs).within(target, 3.0), "j={j}");
        }
    }

    #[test]
    fn moments_and_tails() {
        let t = table();
        let m1 = mass_moment(MeasureKind::EulerProduct, 1.0, 200, 1.0, 4000, 51, t).unwrap();
        assert!(m1.estimate.within(1.0, 3.0) && !m1.heavy_tail);
        let a = mass_moment(MeasureKind::EulerProduct, 1.0, 200, 2.0, 4000, 52, t).unwrap();
        let b = mass_moment(MeasureKind::EulerProduct, 1.0, 400, 2.0, 4000, 53, t).unwrap();
        let diff = (a.estimate.mean - b.estimate.mean).abs();
        assert!(diff <= 3.0 * (a.estimate.se.powi(2) + b.estimate.se.powi(2)).sqrt() + 0.05 * a.estimate.mean);
        assert!((a.se_shrink - 0.5).abs() < 0.15, "{}", a.se_shrink);
        assert!(mass_moment(MeasureKind::EulerProduct, 1.8, 200, 2.0, 100, 1, t).unwrap().heavy_tail);
        assert!(mass_moment(MeasureKind::EulerProduct, 1.0, 200, 0.5, 100, 1, t).is_err());
        // the boundary p = 4/β² sits at β = 2 for p = 1 in both families
        for kind in [MeasureKind::EulerProduct, MeasureKind::GaussianReference] {
            assert!(!mass_moment(kind, 1.9, 50, 1.0, 16, 1, t).unwrap().heavy_tail);
            assert!(mass_moment(kind, 2.1, 50, 1.0, 16, 1, t).unwrap().heavy_tail);
        }
    }

    /// E[mass²] of the Gaussian reference: ∫_0^1 2(1 − u) e^{β²Ψ_N(u)} du.
    fn gaussian_second_moment(beta: f64, n: usize, t: &PrimeTable) -> f64 {
        let (us, ws) = composite_gl(0.0, 1.0, 64, 64);
        us.par_iter().zip(&ws).map(|(&u, &w)| 2.0 * w * (1.0 - u) * (beta * beta * psi_covariance(u, n, t).unwrap()).exp()).sum()
    }

    #[test]
    fn heavy_tail_signature() {
        let t = table();
        assert!(mass_moment(MeasureKind::GaussianReference, 1.8, 100, 2.0, 8, 1, t).unwrap().heavy_tail);
        assert!(!mass_moment(MeasureKind::GaussianReference, 1.0, 100, 2.0, 8, 1, t).unwrap().heavy_tail);
        // light side: the second moment settles and Monte Carlo finds it
        let light: Vec<f64> = [100, 1000, 10_000].iter().map(|&n| gaussian_second_moment(1.0, n, t)).collect();
        let heavy: Vec<f64> = [100, 1000, 10_000].iter().map(|&n| gaussian_second_moment(1.8, n, t)).collect();
        let step = |v: &[f64]| (v[2] - v[1]) / (v[1] - v[0]);
        assert!(light[2] / light[1] < 1.05 && step(&light) < 0.75, "{light:?}");
        // heavy side: growth per decade of N barely slows
        assert!(heavy[2] / heavy[1] > 1.15 && step(&heavy) > 0.8, "{heavy:?}");
        assert!(heavy[2] / heavy[0] > 1.5 * light[2] / light[0]);
        let m = mass_moment(MeasureKind::GaussianReference, 1.0, 1000, 2.0, 4000, 61, t).unwrap();
        assert!(m.estimate.within(light[1], 3.0), "{:?} vs {}", m.estimate, light[1]);
    }

    #[test]
    fn martingale_stability() {
        let t = table();
        let levels = [50, 100, 200, 400, 800];
        let masses = nested_masses(1.0, &levels[..4], 2000, 71, t).unwrap();
        let gaps: Vec<f64> = (0..3)
            .map(|l| {
                assert!(correlation(&masses[l], &masses[l + 1]) > 0.9);
                mean(&masses[l].iter().zip(&masses[l + 1]).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>())
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        // at β = ½ the increments are not monotone in N: E(M_2N − M_N)² = E M_2N² − E M_N²
        // oscillates with the prime sums, so compare against those differences instead
        let masses = nested_masses(0.5, &levels, 4000, 72, t).unwrap();
        let second: Vec<f64> = levels.iter().map(|&n| pair_oracle(0.5, n, t)).collect();
        for l in 0..4 {
            assert!(correlation(&masses[l], &masses[l + 1]) > 0.9);
            let d2: Vec<f64> = masses[l].iter().zip(&masses[l + 1]).map(|(a, b)| (a - b).powi(2)).collect();
            let target = second[l + 1] - second[l];
            assert!(mean_se(&d2).within(target, 3.0), "level {l}: {:?} vs {target}", mean_se(&d2));
        }
    }

    #[test]
    fn critical_degeneracy() {
        let t = table();
        let ladder = [1000, 10_000, 100_000];
        let g = measure_grid();
        let mut raw = Vec::new();
        let mut med = Vec::new();
        for &n in &ladder {
            let norm = NormalizationTable::new(2.0, n, t).unwrap();
            let m: Vec<f64> = (0..300u64)
                .into_par_iter()
                .map(|i| subcritical_measure_with(&sample_phases(n, 81, i), n, &g, t, &norm).unwrap().mass())
                .collect();
            raw.push(median(&m));
            med.push(median(&m) * critical_factor(n).unwrap());
        }
        assert!(raw.windows(2).all(|w| w[1] < w[0]), "{raw:?}");
        let spread = med.iter().cloned().fold(0.0, f64::max) / med.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 3.0, "{med:?}");
    }
}
