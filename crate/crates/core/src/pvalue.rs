// SPDX-License-Identifier: MIT OR Apache-2.0

//! Truncated-Gaussian selective p-values, naive z-tests, and the
//! median-absolute-deviation noise estimator.

use crate::gauss::{ln_interval_mass, ln_sum_exp, norm_sf};
use crate::{Error, IntervalUnion, Result, TimeSeries};

/// How the conditioning set for a selective test was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditioning {
    /// Locations, orders, and signs of a fixed-step binary segmentation run
    /// (a single regime interval).
    StepSign,
    /// The full set of estimated changepoint locations.
    Locations,
    /// Only the presence of the tested changepoint.
    FixedTau,
}

impl Conditioning {
    pub fn as_str(&self) -> &'static str {
        match self {
            Conditioning::StepSign => "step-sign",
            Conditioning::Locations => "locations",
            Conditioning::FixedTau => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Selective,
    NaiveZ,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Selective => "selective",
            Method::NaiveZ => "naive-z",
        }
    }
}

/// Outcome of testing one estimated changepoint.
#[derive(Debug, Clone)]
pub struct TestResult {
    /// Tested changepoint location (1-based).
    pub tau: usize,
    /// Index of the changepoint within the fit (1-based).
    pub j: usize,
    /// Observed statistic `ν⊤y`.
    pub nu_dot_y: f64,
    /// `‖ν‖²`.
    pub norm_sq: f64,
    /// Null scale `σ‖ν‖₂`.
    pub scale: f64,
    /// Conditioning set in φ (the full line for naive tests).
    pub s: IntervalUnion,
    /// Two-sided p-value.
    pub p: f64,
    pub method: Method,
    pub conditioning: Conditioning,
    /// The denominator mass underflowed double precision; `p` was formed
    /// from log-mass ratios and is still well defined.
    pub denom_underflow: bool,
}

/// A selective p-value with its numerical-health flags.
#[derive(Debug, Clone, Copy)]
pub struct SelectivePValue {
    pub p: f64,
    /// Denominator mass underflowed `f64`; the returned ratio came from
    /// log-space arithmetic.
    pub denom_underflow: bool,
    /// The raw ratio fell outside `[0, 1]` by more than 1e-12 before
    /// clamping, indicating a numerical fault upstream.
    pub clamp_warning: bool,
}

/// `Pr(|φ| >= c | φ ∈ S)` under `φ ~ N(0, scale²)`.
///
/// Masses are accumulated interval-by-interval in log space, so sets deep in
/// the Gaussian tail keep full relative accuracy.
pub fn selective_p(s: &IntervalUnion, c: f64, scale: f64) -> Result<SelectivePValue> {
    if s.is_empty() {
        return Err(Error::domain("conditioning set is empty"));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::invalid(format!("scale must be positive; got {scale}")));
    }
    if !(c >= 0.0) {
        return Err(Error::invalid(format!("threshold must be nonnegative; got {c}")));
    }
    let numerator = s.intersect_abs_ge(c);
    let ln_num = ln_union_mass(&numerator, scale);
    let ln_den = ln_union_mass(s, scale);
    if ln_den == f64::NEG_INFINITY {
        return Err(Error::domain(
            "conditioning set has zero Gaussian mass even in log space",
        ));
    }
    let denom_underflow = ln_den < f64::MIN_POSITIVE.ln();
    let raw = (ln_num - ln_den).exp();
    let p = raw.clamp(0.0, 1.0);
    let clamp_warning = (raw - p).abs() > 1e-12;
    Ok(SelectivePValue {
        p,
        denom_underflow,
        clamp_warning,
    })
}

/// Log Gaussian mass of an interval union under `N(0, scale²)`.
pub fn ln_union_mass(s: &IntervalUnion, scale: f64) -> f64 {
    let ls: Vec<f64> = s
        .intervals()
        .iter()
        .map(|&(lo, hi)| ln_interval_mass(lo, hi, scale))
        .collect();
    ln_sum_exp(&ls)
}

/// Two-sided z-test p-value `2(1 - Φ(c/scale))` with no conditioning.
pub fn naive_p(c: f64, scale: f64) -> f64 {
    debug_assert!(c >= 0.0 && scale > 0.0);
    (2.0 * norm_sf(c / scale)).min(1.0)
}

/// Result of the noise-scale estimator.
#[derive(Debug, Clone, Copy)]
pub struct SigmaEstimate {
    pub sigma: f64,
    /// The estimate collapsed to zero (constant or degenerate differences);
    /// callers must not run inference with it.
    pub degenerate: bool,
}

const NORMAL_QUANTILE_3_4: f64 = 0.6744897501960817;

/// Median-absolute-deviation estimator of σ from first differences:
/// `median |z_t - median z| / (Φ⁻¹(3/4) √2)` with `z_t = y_t - y_{t-1}`.
pub fn estimate_sigma(y: &TimeSeries) -> Result<SigmaEstimate> {
    if y.len() < 3 {
        return Err(Error::data("sigma estimation needs at least 3 observations"));
    }
    let v = y.values();
    let z: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let med = median(&z);
    let dev: Vec<f64> = z.iter().map(|zi| (zi - med).abs()).collect();
    let mad = median(&dev);
    let sigma = mad / (NORMAL_QUANTILE_3_4 * std::f64::consts::SQRT_2);
    // estimates at rounding-noise level of the differences are as unusable
    // as an exact zero (e.g. quantized or perfectly periodic data)
    let z_scale = z.iter().fold(0.0f64, |m, zi| m.max(zi.abs()));
    Ok(SigmaEstimate {
        sigma,
        degenerate: sigma <= 1e-12 * z_scale.max(1e-300),
    })
}

/// Median with midpoint averaging for even lengths.
fn median(xs: &[f64]) -> f64 {
    debug_assert!(!xs.is_empty());
    let mut s = xs.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
