// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::pvalue::TestResult;

/// Power and detection probability of one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepMetrics {
    pub power: f64,
    pub detection: f64,
}

/// Aggregated metrics of one simulation cell.
#[derive(Debug, Clone)]
pub struct MetricsRow {
    pub delta: f64,
    pub approach: u8,
    pub power: f64,
    pub detection_probability: f64,
    /// Pooled per-changepoint p-values across replicates.
    pub p_values: Vec<f64>,
}

/// Fraction of true changepoints detected within `±m`, and the fraction
/// whose nearest estimated changepoint both lies within `±m` and was
/// rejected at level `alpha`. Untested estimated changepoints count for
/// detection but never for power. With no estimates, both are zero.
pub fn power_and_detection(
    tests: &[TestResult],
    locations: &[usize],
    truth: &[usize],
    alpha: f64,
    m: usize,
) -> RepMetrics {
    if truth.is_empty() || locations.is_empty() {
        return RepMetrics {
            power: 0.0,
            detection: 0.0,
        };
    }
    let k = truth.len() as f64;
    let mut detected = 0usize;
    let mut rejected = 0usize;
    for &t in truth {
        // nearest estimated changepoint, ties to the smaller index
        let (mut best_l, mut best_d) = (0usize, usize::MAX);
        for (l, &loc) in locations.iter().enumerate() {
            let d = loc.abs_diff(t);
            if d < best_d {
                best_d = d;
                best_l = l;
            }
        }
        if best_d <= m {
            detected += 1;
            let tau = locations[best_l];
            if let Some(tr) = tests.iter().find(|tr| tr.tau == tau) {
                if tr.p <= alpha {
                    rejected += 1;
                }
            }
        }
    }
    RepMetrics {
        power: rejected as f64 / k,
        detection: detected as f64 / k,
    }
}

/// One-sample Kolmogorov–Smirnov statistic against Unif(0, 1).
pub fn ks_statistic(p_values: &[f64]) -> f64 {
    debug_assert!(!p_values.is_empty());
    let mut xs = p_values.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let hi = (i as f64 + 1.0) / n - x;
        let lo = x - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// Asymptotic p-value of the one-sample KS test (Stephens' small-sample
/// correction of the Kolmogorov distribution).
pub fn ks_test_pvalue(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
