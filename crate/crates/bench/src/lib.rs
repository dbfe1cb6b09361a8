// SPDX-License-Identifier: MIT OR Apache-2.0

//! Shared fixtures for the criterion benches.

use cpi_core::sim::{gen_data, Approach, DetectorParams, SimConfig, TruncPolicy};
use cpi_core::TimeSeries;

/// A reproducible noisy series with `k` changepoints of gap `delta`.
pub fn bench_series(t_len: usize, k: usize, delta: f64, seed: u64) -> TimeSeries {
    let cfg = SimConfig {
        t_len,
        k_true: k,
        delta,
        sigma: 1.0,
        reps: 1,
        seed,
        approach: Approach::A1,
        detector: DetectorParams::BsSteps(k.max(1)),
        h: 10,
        alpha: 0.05,
        m: 2,
        trunc: TruncPolicy::Auto,
        estimate_sigma: false,
    };
    gen_data(&cfg, 0).expect("bench data generation").0
}
