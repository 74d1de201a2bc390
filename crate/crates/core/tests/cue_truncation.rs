//! Second moment of the truncated characteristic polynomial in ℋ^{−1}.

use chaoslab::rmt_cue::{cue_draws, truncated_sobolev_norm_sq};
use chaoslab::stats::mean_se;
use std::f64::consts::PI;

/// E|b_l|² for l ≤ N: the probability that a uniform permutation of l points
/// has every cycle of length ≤ M, from l·c_l = Σ_{k≤M} c_{l−k}.
fn short_cycle_probabilities(m: usize, degree: usize) -> Vec<f64> {
    let mut c = vec![0.0; degree + 1];
    c[0] = 1.0;
    for l in 1..=degree {
        c[l] = (1..=l.min(m)).map(|k| c[l - k]).sum::<f64>() / l as f64;
    }
    c
}

fn oracle(n: usize, m: usize) -> f64 {
    short_cycle_probabilities(m, n).iter().enumerate().map(|(l, p)| p / (1.0 + (l * l) as f64)).sum()
}

#[test]
fn truncated_norm_approaches_full_sum() {
    let limit = 0.5 * (1.0 + PI / PI.tanh());
    let ladder = [(50, 5, 400), (100, 10, 200), (200, 20, 100)];
    let mut gaps = Vec::new();
    for (i, &(n, m, draws)) in ladder.iter().enumerate() {
        let target = oracle(n, m);
        let v: Vec<f64> = cue_draws(n, draws, 14 + i as u64).unwrap().iter().map(|e| truncated_sobolev_norm_sq(e, m, 1.0).unwrap()).collect();
        let e = mean_se(&v);
        assert!(e.within(target, 3.0), "N={n} M={m}: {e:?} vs {target}");
        gaps.push(limit - target);
    }
    assert!(gaps.iter().all(|&g| g > 0.0) && gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn cycle_probabilities_sum_check() {
    // with M ≥ l every permutation qualifies
    let c = short_cycle_probabilities(30, 30);
    assert!(c.iter().all(|p| (p - 1.0).abs() < 1e-12));
    // involutions: c_4 for M = 2 is 10/24
    assert!((short_cycle_probabilities(2, 4)[4] - 10.0 / 24.0).abs() < 1e-15);
}
