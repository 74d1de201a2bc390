use super::{shared_table, Ctx, Outcome, Row};
use crate::chaos_measures::{critical_factor, measure_grid, sample_masses, subcritical_measure_with, MeasureKind, NormalizationTable};
use crate::error::Result;
use crate::euler_field::{sample_phases, DEFAULT_J_MAX, truncated_two_point, zeta_n_eval, zeta_rand_eval};
use crate::gauss_field::{coupling_w1_against, planar_gaussian_samples, psi_covariance, psi_limit_via_zeta};
use crate::grid::GridSpec;
use crate::meso_chaos::{
    eta_exponent, eta_exponent_variance, meso_cross_covariance, meso_cross_covariance_quadrature, meso_scaling_check,
    sample_brownian, stochastic_field, y_delta_sample, MesoWindow, Weight,
};
use crate::quad::{integrate_complex, QuadOptions};
use crate::rmt_cue::{char_poly, char_sobolev_norm_sq, cue_draws, ds_trace_variances, rmt_meso_compare, sobolev_moment_target, toeplitz_second_moment};
use crate::rmt_cue::composition_identity_check;
use crate::rng;
use crate::spectral_norms::wasserstein_planar;
use crate::stats::{complex_mean_se, decrease_violations, mean_se, median, trend_tau, ComplexEstimate};
use crate::zeta_numeric::{divisor_asymptotics_check, mean_square, mean_square_target, mean_value};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_4, PI, TAU};

/// A scalar parameter with its accepted range; `default = None` means the
/// experiment runs its built-in ladder unless the parameter is given.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub integer: bool,
}

const fn real(name: &'static str, default: f64, min: f64, max: f64) -> ParamSpec {
    ParamSpec { name, default: Some(default), min, max, integer: false }
}

const fn int(name: &'static str, default: f64, min: f64, max: f64) -> ParamSpec {
    ParamSpec { name, default: Some(default), min, max, integer: true }
}

const fn optional(name: &'static str, min: f64, max: f64) -> ParamSpec {
    ParamSpec { name, default: None, min, max, integer: false }
}

pub struct Experiment {
    pub name: &'static str,
    /// Acceptance criterion this experiment decides.
    pub criterion: u8,
    pub summary: &'static str,
    pub params: &'static [ParamSpec],
    pub run: fn(&Ctx) -> Result<Outcome>,
}

pub fn registry() -> &'static [Experiment] {
    &REGISTRY
}

static REGISTRY: [Experiment; 14] = [
    Experiment {
        name: "divisor-asymptotics",
        criterion: 1,
        summary: "D_{ia}(T)/T against its main term within 5(T^{-1/3}+T^{-5/12}|a|^{1/6})",
        params: &[optional("T", 1.5, 1e6), optional("a", -1e3, 1e3), real("budget_factor", 5.0, 0.0, 1e6)],
        run: divisor_asymptotics,
    },
    Experiment {
        name: "zeta-mean-square",
        criterion: 2,
        summary: "(1/T)∫|ζ(½+it)|² against log(T/2π)+2γ−1",
        params: &[optional("T", 10.0, 1e5), real("rel_tol", 0.05, 0.0, 1.0)],
        run: zeta_mean_square,
    },
    Experiment {
        name: "zeta-mean-value",
        criterion: 3,
        summary: "average of ζ(½+it) over [A, B] against 1",
        params: &[real("A", 0.0, 0.0, 1e5), real("B", 2000.0, 1.0, 1e5), real("tol", 0.15, 0.0, 10.0)],
        run: zeta_mean_value,
    },
    Experiment {
        name: "two-point",
        criterion: 4,
        summary: "E ζ_{N,rand}(½+ix) conj ζ_{N,rand}(½+iy) against ζ_N(1+i(x−y))",
        params: &[int("N", 20.0, 1.0, 1e5), int("draws", 1e5, 16.0, 1e7)],
        run: two_point,
    },
    Experiment {
        name: "chaos-normalization",
        criterion: 5,
        summary: "unit mean mass at β ∈ {½,1,2}; normalization(N,2) = ζ_N(1)",
        params: &[int("N", 100.0, 1.0, 1e5), int("draws", 1e4, 16.0, 1e6), int("N_exact", 1000.0, 1.0, 1e5)],
        run: chaos_normalization,
    },
    Experiment {
        name: "covariance-law",
        criterion: 6,
        summary: "sup |Ψ_N(u) − ½log min(1/|u|, log N)| < 3; Ψ_{10⁶}(1) against its limit",
        params: &[real("C", 3.0, 0.0, 100.0), int("u_points", 4001.0, 11.0, 1e6), int("N_limit", 1e6, 1e3, 1e6)],
        run: covariance_law,
    },
    Experiment {
        name: "coupling-decay",
        criterion: 7,
        summary: "calibrated W₁(block sums, Gaussian) decreasing over blocks 2..6",
        params: &[int("n", 512.0, 64.0, 2048.0), int("repetitions", 10.0, 1.0, 1000.0), int("m_min", 2.0, 1.0, 6.0), int("m_max", 6.0, 2.0, 6.0)],
        run: coupling_decay,
    },
    Experiment {
        name: "critical-scaling",
        criterion: 8,
        summary: "β=2 masses: scaled medians within a factor 3, unscaled means decreasing",
        params: &[int("draws", 1000.0, 16.0, 1e5)],
        run: critical_scaling,
    },
    Experiment {
        name: "toeplitz-moment",
        criterion: 9,
        summary: "CUE E υ_N(θ)conj υ_N(θ′) and E‖υ_N‖²_{H^{-1}} against their exact sums",
        params: &[
            int("N", 20.0, 1.0, 512.0),
            int("draws", 1e5, 16.0, 1e7),
            int("N_sobolev", 50.0, 1.0, 512.0),
            int("draws_sobolev", 2000.0, 16.0, 1e6),
        ],
        run: toeplitz_moment,
    },
    Experiment {
        name: "trace-variances",
        criterion: 10,
        summary: "Var Tr U^k within 5% of k",
        params: &[int("N", 30.0, 1.0, 512.0), int("k_max", 5.0, 1.0, 512.0), int("draws", 1e5, 16.0, 1e7), real("rel_tol", 0.05, 0.0, 1.0)],
        run: trace_variances,
    },
    Experiment {
        name: "ito-isometry",
        criterion: 11,
        summary: "Var Y_δ within 2% of log(1/δ); Brownian-integral covariances against quadrature",
        params: &[
            real("delta", 0.01, 1e-4, 1.0),
            real("step", 1e-5, 1e-7, 0.1),
            int("draws", 1e5, 16.0, 1e7),
            int("field_draws", 1e5, 16.0, 1e7),
        ],
        run: ito_isometry,
    },
    Experiment {
        name: "meso-cross-covariance",
        criterion: 12,
        summary: "wide-window E[Re E(x) Im E(y)] against −π/4·sgn(x−y)",
        params: &[real("x", 0.55, 0.0, 1.0), real("y", 0.45, 0.0, 1.0), real("a", 1e-6, 1e-12, 1.0), real("A", 1e6, 1.0, 1e9)],
        run: meso_cross,
    },
    Experiment {
        name: "composition-identity",
        criterion: 13,
        summary: "Σ over compositions of l against e^{−εl} for l ≤ 12",
        params: &[int("l_max", 12.0, 1.0, 20.0)],
        run: composition_identity,
    },
    Experiment {
        name: "meso-scaling",
        criterion: 14,
        summary: "median mult_distance to η decreasing over δ (ζ side and CUE side)",
        params: &[
            int("N_zeta", 1e5, 100.0, 1e6),
            int("draws_zeta", 64.0, 2.0, 1e5),
            int("N_cue", 256.0, 16.0, 512.0),
            int("draws_cue", 32.0, 2.0, 1e5),
            real("alpha", 1.0, 0.51, 10.0),
        ],
        run: meso_scaling,
    },
];

fn complex_rows(rows: &mut Vec<Row>, label: &str, e: ComplexEstimate, target: Complex64, k: f64) {
    rows.push(Row::within_se(format!("{label} re"), e.re(), target.re, k));
    rows.push(Row::within_se(format!("{label} im"), e.im(), target.im, k));
}

fn divisor_asymptotics(ctx: &Ctx) -> Result<Outcome> {
    let ts = ctx.get("T").map(|t| vec![t]).unwrap_or_else(|| vec![1000.5, 10_000.5, 100_000.5]);
    let as_ = ctx.get("a").map(|a| vec![a]).unwrap_or_else(|| vec![0.5, 2.0, 10.0]);
    let k = ctx.f("budget_factor");
    let mut out = Outcome::default();
    for &t in &ts {
        for &a in &as_ {
            let c = divisor_asymptotics_check(t, a, None, k)?;
            out.rows.push(Row::new(format!("|D/T - main| T={t} a={a}"), c.abs_error, None, 0.0, k * c.budget));
        }
    }
    Ok(out)
}

fn zeta_mean_square(ctx: &Ctx) -> Result<Outcome> {
    let ladder = match ctx.get("T") {
        Some(t) => vec![(t, ctx.f("rel_tol"))],
        None => vec![(500.0, 0.05), (2000.0, 0.03)],
    };
    let mut out = Outcome::default();
    for (t, rel) in ladder {
        out.rows.push(Row::relative(format!("mean square T={t}"), mean_square(t, 1.0)?, mean_square_target(t), rel));
    }
    Ok(out)
}

fn zeta_mean_value(ctx: &Ctx) -> Result<Outcome> {
    let v = mean_value(ctx.f("A"), ctx.f("B"))?;
    let mut out = Outcome::default();
    out.rows.push(Row::new("|mean value - 1|", (v - 1.0).norm(), None, 0.0, ctx.f("tol")));
    out.details.insert("mean_value".into(), vec![v.re, v.im]);
    Ok(out)
}

const TWO_POINT_PAIRS: [(f64, f64); 5] = [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (0.3, -0.7), (2.0, 0.5)];

fn two_point(ctx: &Ctx) -> Result<Outcome> {
    let (n, draws) = (ctx.n("N"), ctx.n("draws"));
    let t = shared_table()?;
    let seed = ctx.seed_for("phases");
    let vals: Vec<Vec<Complex64>> = (0..draws as u64)
        .into_par_iter()
        .map(|i| {
            let ph = sample_phases(n, seed, i);
            TWO_POINT_PAIRS.iter().map(|&(x, y)| Ok(zeta_rand_eval(x, &ph, n, t)? * zeta_rand_eval(y, &ph, n, t)?.conj())).collect()
        })
        .collect::<Result<_>>()?;
    let mut out = Outcome::default();
    for (j, &(x, y)) in TWO_POINT_PAIRS.iter().enumerate() {
        let col: Vec<Complex64> = vals.iter().map(|v| v[j]).collect();
        complex_rows(&mut out.rows, &format!("two-point x={x} y={y}"), complex_mean_se(&col), truncated_two_point(x, y, n, t)?, 3.0);
    }
    Ok(out)
}

fn chaos_normalization(ctx: &Ctx) -> Result<Outcome> {
    let t = shared_table()?;
    let mut out = Outcome::default();
    for (i, beta) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let m = sample_masses(MeasureKind::EulerProduct, beta, ctx.n("N"), ctx.n("draws"), rng::derive(ctx.seed_for("masses"), i as u64), t)?;
        out.rows.push(Row::within_se(format!("mean mass beta={beta}"), mean_se(&m), 1.0, 3.0));
    }
    let n_exact = ctx.n("N_exact");
    let norm = NormalizationTable::new(2.0, n_exact, t)?;
    let mut worst: f64 = 0.0;
    for n in 1..=n_exact {
        let z = zeta_n_eval(Complex64::new(1.0, 0.0), n, t)?.re;
        worst = worst.max((norm.at(n)? / z - 1.0).abs());
    }
    out.rows.push(Row::new(format!("max rel |normalization(N,2)/zeta_N(1) - 1|, N<={n_exact}"), worst, None, 0.0, 1e-9));
    Ok(out)
}

fn covariance_law(ctx: &Ctx) -> Result<Outcome> {
    let t = shared_table()?;
    let m = ctx.n("u_points");
    let mut us: Vec<f64> = (0..m).map(|i| -1.0 + 2.0 * i as f64 / (m - 1) as f64).collect();
    // the law has its kink at |u| = 1/log N, well inside the uniform spacing for large N
    for k in 1..=40 {
        let u = 10f64.powf(-(k as f64) * 0.2);
        us.push(u);
        us.push(-u);
    }
    let mut out = Outcome::default();
    let mut sup = Vec::new();
    for n in [1000usize, 10_000, 100_000] {
        let ln = (n as f64).ln();
        let dev = us
            .par_iter()
            .map(|&u| {
                let law = 0.5 * if u == 0.0 { ln.ln() } else { (1.0 / u.abs()).min(ln).ln() };
                Ok((psi_covariance(u, n, t)? - law).abs())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        sup.push(dev);
    }
    let c = sup.iter().cloned().fold(0.0, f64::max);
    out.rows.push(Row::new("sup_u,N |Psi_N(u) - law|", c, None, 0.0, ctx.f("C")));
    out.details.insert("sup_by_N".into(), sup);
    let nl = ctx.n("N_limit");
    let psi = psi_covariance(1.0, nl, t)?;
    let lim = psi_limit_via_zeta(1.0, DEFAULT_J_MAX, t, nl)?;
    out.rows.push(Row::new(format!("|Psi_{nl}(1) - limit|"), (psi - lim.value).abs(), None, 0.0, 0.05));
    out.details.insert("psi_1".into(), vec![psi, lim.value, lim.tail_bound]);
    Ok(out)
}

fn coupling_decay(ctx: &Ctx) -> Result<Outcome> {
    let t = shared_table()?;
    let (n, reps) = (ctx.n("n"), ctx.n("repetitions"));
    let ms: Vec<usize> = (ctx.n("m_min")..=ctx.n("m_max")).collect();
    let mut out = Outcome::default();
    let mut negative = 0;
    for r in 0..reps as u64 {
        let seed = rng::derive(ctx.seed_for("coupling"), r);
        let reference = planar_gaussian_samples(n, seed, rng::name_tag("reference"));
        let calibration = wasserstein_planar(&planar_gaussian_samples(n, seed, rng::name_tag("calibration")), &reference)?;
        let w: Vec<f64> = ms.iter().map(|&m| Ok(coupling_w1_against(m, n, seed, &reference, t)? - calibration)).collect::<Result<_>>()?;
        let tau = trend_tau(&w);
        if tau < 0.0 {
            negative += 1;
        }
        // tau over five points moves in steps of 0.2, so |tau + 1| ≤ 0.8 is tau < 0
        let step = 2.0 / (ms.len() * (ms.len() - 1) / 2) as f64;
        out.rows.push(Row::new(format!("kendall tau rep={r}"), tau, None, -1.0, 1.0 - step));
        out.details.insert(format!("calibrated_w1_rep{r}"), w);
    }
    let need = reps / 2 + 1;
    out.rows.push(Row::new("repetitions with tau < 0", negative as f64, None, reps as f64, (reps - need) as f64));
    Ok(out)
}

fn critical_scaling(ctx: &Ctx) -> Result<Outcome> {
    let t = shared_table()?;
    let draws = ctx.n("draws");
    let ladder = [1000usize, 10_000, 100_000];
    let grid = measure_grid();
    let norm = NormalizationTable::new(2.0, *ladder.last().unwrap(), t)?;
    let seed = ctx.seed_for("critical");
    let (mut means, mut medians, mut scaled) = (Vec::new(), Vec::new(), Vec::new());
    for &n in &ladder {
        let m: Vec<f64> = (0..draws as u64)
            .into_par_iter()
            .map(|i| Ok(subcritical_measure_with(&sample_phases(n, seed, i), n, &grid, t, &norm)?.mass()))
            .collect::<Result<_>>()?;
        means.push(mean_se(&m).mean);
        medians.push(median(&m));
        scaled.push(median(&m) * critical_factor(n)?);
    }
    let hi = scaled.iter().cloned().fold(0.0, f64::max);
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut out = Outcome::default();
    out.rows.push(Row::new("max/min scaled median mass", hi / lo, None, 1.0, 2.0));
    out.rows.push(Row::violations("unscaled mean mass decrease violations", decrease_violations(&means)));
    out.details.insert("unscaled_mean".into(), means);
    out.details.insert("unscaled_median".into(), medians);
    out.details.insert("scaled_median".into(), scaled);
    Ok(out)
}

const THETA_PAIRS: [(f64, f64); 4] = [(0.0, 0.0), (0.3, 0.1), (1.0, -2.0), (PI / 2.0, 0.0)];

fn toeplitz_moment(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.n("N");
    let draws = cue_draws(n, ctx.n("draws"), ctx.seed_for("cue"))?;
    let mut out = Outcome::default();
    for &(a, b) in &THETA_PAIRS {
        let z: Vec<Complex64> = draws.iter().map(|e| char_poly(a, e) * char_poly(b, e).conj()).collect();
        complex_rows(&mut out.rows, &format!("E u(theta)conj u(theta') theta={a:.4} theta'={b:.4}"), complex_mean_se(&z), toeplitz_second_moment(a, b, n), 3.0);
    }
    let ns = ctx.n("N_sobolev");
    let norms: Vec<f64> = cue_draws(ns, ctx.n("draws_sobolev"), ctx.seed_for("cue-sobolev"))?.iter().map(|e| char_sobolev_norm_sq(e, 1.0)).collect();
    out.rows.push(Row::within_se(format!("E |u_N|^2 H^-1 N={ns}"), mean_se(&norms), sobolev_moment_target(ns, 1.0)?, 3.0));
    Ok(out)
}

fn trace_variances(ctx: &Ctx) -> Result<Outcome> {
    let v = ds_trace_variances(ctx.n("N"), ctx.n("k_max"), ctx.n("draws"), ctx.seed_for("cue"))?;
    let mut out = Outcome::default();
    for (k, e) in v.iter().enumerate() {
        let mut row = Row::relative(format!("Var Tr U^{}", k + 1), e.mean, (k + 1) as f64, ctx.f("rel_tol"));
        row.se = Some(e.se);
        out.rows.push(row);
    }
    Ok(out)
}

fn ito_isometry(ctx: &Ctx) -> Result<Outcome> {
    let (delta, h) = (ctx.f("delta"), ctx.f("step"));
    let seed = ctx.seed_for("brownian");
    let ys: Vec<f64> = (0..ctx.n("draws") as u64)
        .into_par_iter()
        .map(|i| Ok(y_delta_sample(delta, &sample_brownian(1.0, h, rng::derive(seed, i))?)?.norm_sqr()))
        .collect::<Result<_>>()?;
    let mut out = Outcome::default();
    let mut row = Row::relative(format!("Var Y_delta delta={delta}"), mean_se(&ys).mean, (1.0 / delta).ln(), 0.02);
    row.se = Some(mean_se(&ys).se);
    out.rows.push(row);

    // Brownian integrals of a few weights and windows against their quadrature covariances
    let fd = ctx.n("field_draws");
    let fseed = ctx.seed_for("fields");
    let opts = QuadOptions::default();
    let cases: [(&str, Weight, (f64, f64)); 2] = [("u^-1/2 on [1,4]", Weight::InvSqrt, (1.0, 4.0)), ("sqrt(2 C^) on [0.5,3]", Weight::TwoCHatSqrt, (0.5, 3.0))];
    let grid = GridSpec::new(0.0, 0.3, 4)?;
    for (ci, (label, w, win)) in cases.iter().enumerate() {
        let fields = (0..fd as u64)
            .into_par_iter()
            .map(|i| stochastic_field(&grid, w, *win, &sample_brownian(win.1, 0.005, rng::derive(fseed, (ci as u64) << 32 | i))?))
            .collect::<Result<Vec<_>>>()?;
        for j in 0..grid.n_points {
            let d = grid.x(0) - grid.x(j);
            let target = integrate_complex(|u| Complex64::from_polar(w.eval(u).powi(2), -TAU * d * u), win.0, win.1, opts)?;
            let c: Vec<Complex64> = fields.iter().map(|f| f.values[0] * f.values[j].conj()).collect();
            complex_rows(&mut out.rows, &format!("{label} E G(0)conj G({:.1})", grid.x(j)), complex_mean_se(&c), target, 3.0);
            let p: Vec<Complex64> = fields.iter().map(|f| f.values[0] * f.values[j]).collect();
            complex_rows(&mut out.rows, &format!("{label} E G(0)G({:.1})", grid.x(j)), complex_mean_se(&p), Complex64::new(0.0, 0.0), 3.0);
        }
    }
    let win = MesoWindow::new(0.05, 20.0)?;
    let x = 0.4;
    let gx = GridSpec::new(x, x, 1)?;
    let v: Vec<f64> = (0..fd as u64)
        .into_par_iter()
        .map(|i| Ok(eta_exponent(&gx, &win, &sample_brownian(20.0, 0.005, rng::derive(fseed, 2 << 32 | i))?)?.values[0].norm_sqr()))
        .collect::<Result<_>>()?;
    out.rows.push(Row::within_se("eta exponent E|E(0.4)|^2 window [0.05,20]", mean_se(&v), eta_exponent_variance(x, &win)?, 3.0));
    Ok(out)
}

fn meso_cross(ctx: &Ctx) -> Result<Outcome> {
    let (x, y) = (ctx.f("x"), ctx.f("y"));
    let win = MesoWindow::new(ctx.f("a"), ctx.f("A"))?;
    let (rr, ri) = meso_cross_covariance(x, y, &win)?;
    let mut out = Outcome::default();
    out.rows.push(Row::new(format!("E[Re E(x) Im E(y)] x={x} y={y}"), ri, None, -FRAC_PI_4 * (x - y).signum(), 0.05));
    let (_, ri_swap) = meso_cross_covariance(y, x, &win)?;
    out.rows.push(Row::new(format!("E[Re E(x) Im E(y)] x={y} y={x}"), ri_swap, None, -FRAC_PI_4 * (y - x).signum(), 0.05));
    // the closed form against direct quadrature on a moderate window
    let small = MesoWindow::new(1e-3, 200.0)?;
    let a = meso_cross_covariance(x, y, &small)?;
    let q = meso_cross_covariance_quadrature(x, y, &small, QuadOptions::default())?;
    out.rows.push(Row::new("closed form vs quadrature, window [1e-3, 200]", (a.1 - q.1).abs().max((a.0 - q.0).abs()), None, 0.0, 1e-6));
    out.details.insert("re_re_re_im".into(), vec![rr, ri]);
    Ok(out)
}

fn composition_identity(ctx: &Ctx) -> Result<Outcome> {
    let mut out = Outcome::default();
    for l in 1..=ctx.n("l_max") as u32 {
        for eps in [0.0, 0.3, 1.0] {
            let r = composition_identity_check(l, eps, 20)?;
            out.rows.push(Row::new(format!("l={l} eps={eps}"), r.brute, None, r.target, 1e-10));
        }
    }
    Ok(out)
}

fn meso_scaling(ctx: &Ctx) -> Result<Outcome> {
    let t = shared_table()?;
    let alpha = ctx.f("alpha");
    let mut out = Outcome::default();
    let zeta: Vec<f64> = [0.25, 1.0 / 16.0, 1.0 / 64.0]
        .iter()
        .map(|&d| Ok(meso_scaling_check(d, ctx.n("N_zeta"), ctx.n("draws_zeta"), alpha, t, ctx.seed_for("meso-zeta"))?.median_mult_distance))
        .collect::<Result<_>>()?;
    let cue: Vec<f64> = [0.25, 1.0 / 16.0]
        .iter()
        .map(|&d| Ok(rmt_meso_compare(ctx.n("N_cue"), d, ctx.n("draws_cue"), alpha, ctx.seed_for("meso-cue"))?.median_mult_distance))
        .collect::<Result<_>>()?;
    out.rows.push(Row::violations("zeta side median distance decrease violations", decrease_violations(&zeta)));
    out.rows.push(Row::violations("CUE side median distance decrease violations", decrease_violations(&cue)));
    out.details.insert("zeta_median_by_delta".into(), zeta);
    out.details.insert("cue_median_by_delta".into(), cue);
    Ok(out)
}
