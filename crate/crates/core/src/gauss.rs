// SPDX-License-Identifier: MIT OR Apache-2.0

//! Error-function family and Gaussian tail probabilities with log-space
//! variants that stay accurate arbitrarily deep in the tails.
//!
//! `erf` uses its Maclaurin series on `|x| < 2`; `erfcx` uses the Laplace
//! continued fraction (modified Lentz) on `x >= 2`. Tail masses of intervals
//! are assembled from the smaller of the two tails so that no catastrophic
//! cancellation occurs, and log-masses never underflow.

const FRAC_2_SQRT_PI: f64 = 1.1283791670955126; // 2/sqrt(pi)
const FRAC_1_SQRT_PI: f64 = 0.5641895835477563; // 1/sqrt(pi)
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Maclaurin series for erf, accurate for |x| < 2.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        let nf = n as f64;
        term *= -x2 / nf;
        let contrib = term / (2.0 * nf + 1.0);
        sum += contrib;
        if contrib.abs() <= 1e-18 * sum.abs() || n > 200 {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// Laplace continued fraction for `erfcx(x) = exp(x^2) erfc(x)`, `x >= 2`.
fn erfcx_cf(x: f64) -> f64 {
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let tiny = 1e-300;
    let mut f = x.max(tiny);
    let mut c = f;
    let mut d = 0.0;
    for n in 1..200 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    FRAC_1_SQRT_PI / f
}

/// The error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax < 2.0 {
        erf_series(x)
    } else {
        let e = 1.0 - erfcx_cf(ax) * (-ax * ax).exp();
        if x >= 0.0 {
            e
        } else {
            -e
        }
    }
}

/// The complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        1.0 - erf_series(x)
    } else {
        erfcx_cf(x) * (-x * x).exp()
    }
}

/// The scaled complementary error function `exp(x^2) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 2.0 {
        erfcx_cf(x)
    } else {
        // x^2 < 4, no overflow
        (x * x).exp() * erfc(x)
    }
}

/// Standard normal upper-tail probability `Pr(Z >= x)`.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// `ln Pr(Z >= x)`, accurate for arbitrarily large `x`.
pub fn ln_norm_sf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x >= 0.0 {
        // ln(0.5 erfcx(x/sqrt2)) - x^2/2
        (0.5 * erfcx(x / SQRT_2)).ln() - 0.5 * x * x
    } else {
        // Pr(Z >= x) = 1 - Pr(Z >= -x)
        let l = ln_norm_sf(-x);
        (-l.exp()).ln_1p()
    }
}

/// `ln Pr(lo <= scale*Z <= hi)` for a closed interval; `-inf` for an empty
/// mass. Endpoints may be infinite.
pub fn ln_interval_mass(lo: f64, hi: f64, scale: f64) -> f64 {
    debug_assert!(scale > 0.0);
    if !(lo <= hi) {
        return f64::NEG_INFINITY;
    }
    let a = lo / scale;
    let b = hi / scale;
    if a == b {
        return f64::NEG_INFINITY;
    }
    if a >= 0.0 {
        // difference of upper tails
        let la = ln_norm_sf(a);
        let lb = ln_norm_sf(b);
        ln_diff_exp(la, lb)
    } else if b <= 0.0 {
        // mirror to the positive side
        let la = ln_norm_sf(-b);
        let lb = ln_norm_sf(-a);
        ln_diff_exp(la, lb)
    } else {
        // straddles zero: mass = (erf(b/sqrt2) + erf(-a/sqrt2))/2, both
        // terms positive so no cancellation
        let m = 0.5 * (erf_clipped(b / SQRT_2) + erf_clipped(-a / SQRT_2));
        m.ln()
    }
}

fn erf_clipped(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else {
        erf(x)
    }
}

/// `ln(exp(la) - exp(lb))` for `la >= lb`.
fn ln_diff_exp(la: f64, lb: f64) -> f64 {
    if lb == f64::NEG_INFINITY {
        return la;
    }
    debug_assert!(la >= lb - 1e-12);
    let d = lb - la;
    la + (-d.exp()).ln_1p()
}

/// `ln(sum exp(ls))` over a slice of log-values.
pub fn ln_sum_exp(ls: &[f64]) -> f64 {
    let m = ls.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = ls.iter().map(|l| (l - m).exp()).sum();
    m + s.ln()
}
