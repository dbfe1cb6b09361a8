// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::{Error, Result};

/// An observed univariate series `y_1, ..., y_T` with an optional known noise
/// standard deviation.
///
/// Timepoints are 1-based everywhere in the public API of this crate; only
/// raw slice access is 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    sigma: Option<f64>,
}

impl TimeSeries {
    /// Builds a series, validating length and finiteness.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::data(format!(
                "series must have at least 2 observations; got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::data(format!("series contains non-finite value {v}")));
        }
        Ok(TimeSeries {
            values,
            sigma: None,
        })
    }

    /// Attaches a known noise standard deviation.
    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::data(format!(
                "noise standard deviation must be positive and finite; got {sigma}"
            )));
        }
        self.sigma = Some(sigma);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of timepoints `T`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // T >= 2 by construction
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    /// Noise scale, required for inference.
    pub fn sigma_required(&self) -> Result<f64> {
        self.sigma
            .ok_or_else(|| Error::data("noise standard deviation is required but not set"))
    }

}
