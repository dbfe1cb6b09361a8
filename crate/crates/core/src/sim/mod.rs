// SPDX-License-Identifier: MIT OR Apache-2.0

//! Simulation harness: data generation, the eight inference approaches,
//! power/detection metrics, and timing sweeps.

mod metrics;
mod rng;
mod run;
mod timing;

pub use metrics::{ks_statistic, ks_test_pvalue, power_and_detection, MetricsRow, RepMetrics};
pub use rng::stream_rng;
pub use run::{
    gen_data, run_approach, simulate, Approach, ApproachOutput, DetectorParams, RepRecord,
    SimConfig, TruncPolicy, Truth,
};
pub use timing::{log_log_slope, timing_sweep, window_h_sweep, TimingMode, TimingRow};
