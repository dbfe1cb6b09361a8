// SPDX-License-Identifier: MIT OR Apache-2.0

use super::run::{gen_data, run_approach, Approach, DetectorParams, SimConfig, TruncPolicy};
use crate::detect::l0_lambda_for_k;
use crate::infer::{l0_s, L0Mode};
use crate::{window_contrast, Error, Result};
use std::time::Instant;

/// Which quantity the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimingMode {
    /// Window half-width `h` of the ℓ0 fixed-changepoint set on a long
    /// single-changepoint series.
    WindowH,
    /// Series length × approach for the first four approaches.
    Approaches,
}

/// One measured grid point.
#[derive(Debug, Clone)]
pub struct TimingRow {
    pub label: String,
    pub value: f64,
    pub seconds: f64,
}

fn median_time(runs: usize, mut f: impl FnMut() -> Result<()>) -> Result<f64> {
    let mut times = Vec::with_capacity(runs);
    for _ in 0..runs {
        let t0 = Instant::now();
        f()?;
        times.push(t0.elapsed().as_secs_f64());
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(times[times.len() / 2])
}

/// Wall-clock medians over `runs` (>= 5 recommended) per grid point.
pub fn timing_sweep(mode: TimingMode, runs: usize) -> Result<Vec<TimingRow>> {
    if runs < 1 {
        return Err(Error::invalid("need at least one timing run"));
    }
    match mode {
        TimingMode::WindowH => window_h_sweep(runs, &[25, 50, 100, 200, 400]),
        TimingMode::Approaches => approaches_sweep(runs),
    }
}

/// Timing of the window-mode conditioning set as a function of `h` on a
/// 2000-point series with one changepoint at midpoint.
pub fn window_h_sweep(runs: usize, grid: &[usize]) -> Result<Vec<TimingRow>> {
    let t_len = 2000usize;
    let cfg = SimConfig {
        t_len,
        k_true: 0,
        delta: 0.0,
        sigma: 1.0,
        reps: 1,
        seed: 20_25,
        approach: Approach::A4,
        detector: DetectorParams::L0TargetCount(1),
        h: 50,
        alpha: 0.05,
        m: 2,
        trunc: TruncPolicy::Auto,
        estimate_sigma: false,
    };
    // single changepoint at the midpoint, gap 3
    let (noise, _) = gen_data(&cfg, 0)?;
    let values: Vec<f64> = noise
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v + if i >= t_len / 2 { 3.0 } else { 0.0 })
        .collect();
    let y = crate::TimeSeries::new(values)?.with_sigma(1.0)?;
    let search = l0_lambda_for_k(&y, 1, (1e-3, 2000.0))?;
    let fit = search.fit;
    if fit.num_changepoints() == 0 {
        return Err(Error::invariant("timing series lost its changepoint"));
    }
    // tested changepoint: the one nearest the midpoint
    let (j, tau) = fit
        .locations()
        .iter()
        .enumerate()
        .min_by_key(|(_, &l)| l.abs_diff(t_len / 2))
        .map(|(i, &l)| (i + 1, l))
        .unwrap();
    let mut rows = Vec::new();
    for &h in grid {
        if tau < h || tau + h > t_len {
            return Err(Error::invalid(format!(
                "window h={h} around tau={tau} exits the series"
            )));
        }
        let nu = window_contrast(tau, h, &y)?;
        let seconds = median_time(runs, || {
            let s = l0_s(&y, search.lambda, j, &nu, L0Mode::Window)?;
            std::hint::black_box(&s);
            Ok(())
        })?;
        rows.push(TimingRow {
            label: format!("h={h}"),
            value: h as f64,
            seconds,
        });
    }
    Ok(rows)
}

fn approaches_sweep(runs: usize) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::new();
    for &t_len in &[500usize, 1000] {
        let k = 10 * ((t_len as f64).log10().floor() as usize);
        for (approach, detector) in [
            (Approach::A1, DetectorParams::BsSteps(k)),
            (Approach::A2, DetectorParams::BsSteps(k)),
            (Approach::A3, DetectorParams::BsSteps(k)),
            (Approach::A4, DetectorParams::L0TargetCount(k)),
        ] {
            let cfg = SimConfig {
                t_len,
                k_true: k,
                delta: 1.5,
                sigma: 1.0,
                reps: 1,
                seed: 99,
                approach,
                detector,
                h: 50.min(t_len / 20),
                alpha: 0.05,
                m: 2,
                trunc: TruncPolicy::Auto,
                estimate_sigma: false,
            };
            let (y, _) = gen_data(&cfg, 0)?;
            let seconds = median_time(runs, || {
                let out = run_approach(&cfg, &y)?;
                std::hint::black_box(&out);
                Ok(())
            })?;
            rows.push(TimingRow {
                label: format!("t={t_len},approach={}", approach.number()),
                value: t_len as f64,
                seconds,
            });
        }
    }
    Ok(rows)
}

/// Ordinary least-squares slope of `ln y` on `ln x`; used to check the
/// empirical order of growth of sweeps.
pub fn log_log_slope(rows: &[TimingRow]) -> f64 {
    let n = rows.len() as f64;
    let xs: Vec<f64> = rows.iter().map(|r| r.value.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.seconds.max(1e-12).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
