// SPDX-License-Identifier: MIT OR Apache-2.0

//! Changepoint detection and selective inference for the univariate
//! Gaussian change-in-mean model.
//!
//! The crate provides two detectors (`detect::binseg`, `detect::l0_segment`),
//! exact characterizations of the data perturbations that preserve a
//! detection outcome (`infer`), and truncated-Gaussian p-values for the null
//! hypothesis of no change in mean near an estimated changepoint (`pvalue`).
//! A simulation harness (`sim`) drives the eight inference approaches used
//! by the CLI and benchmark suites.

#![forbid(unsafe_code)]

mod contrast;
mod error;
mod fit;
mod interval;
mod path;
mod series;

pub mod detect;
pub mod gauss;
pub mod infer;
pub mod pvalue;
pub mod pwq;
pub mod sim;

pub use contrast::{spanning_contrast, window_contrast, Contrast, ContrastKind};
pub use error::Error;
pub use fit::ChangepointFit;
pub use interval::IntervalUnion;
pub use path::{perturbation_path, PerturbationPath};
pub use series::TimeSeries;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
