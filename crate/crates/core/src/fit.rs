// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::{Error, Result, TimeSeries};

/// The outcome of a changepoint detector.
///
/// `locations` holds the estimated changepoints in increasing order, each a
/// 1-based index `τ̂` with the convention that the segment boundary lies
/// between `τ̂` and `τ̂ + 1`. For binary segmentation, `orders[i]` is the step
/// (1-based) at which `locations[i]` entered, and `signs[i]` is the sign of
/// the CUSUM statistic of the chosen split at that step; both are empty for
/// ℓ0 segmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangepointFit {
    locations: Vec<usize>,
    orders: Vec<usize>,
    signs: Vec<i8>,
    means: Vec<f64>,
    objective: f64,
}

impl ChangepointFit {
    pub(crate) fn new(
        locations: Vec<usize>,
        orders: Vec<usize>,
        signs: Vec<i8>,
        means: Vec<f64>,
        objective: f64,
    ) -> Self {
        debug_assert!(locations.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(orders.is_empty() || orders.len() == locations.len());
        debug_assert!(signs.is_empty() || signs.len() == locations.len());
        debug_assert_eq!(means.len(), locations.len() + 1);
        ChangepointFit {
            locations,
            orders,
            signs,
            means,
            objective,
        }
    }

    /// Builds a fit with the given locations, segment means taken from the
    /// data, and objective equal to half the residual sum of squares.
    pub fn for_locations(locations: Vec<usize>, y: &TimeSeries) -> Result<Self> {
        let t_len = y.len();
        if locations.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("changepoint locations must be increasing"));
        }
        if locations.iter().any(|&l| l < 1 || l > t_len - 1) {
            return Err(Error::invalid(format!(
                "changepoint locations must lie in 1..={}",
                t_len - 1
            )));
        }
        let (means, half_sse) = segment_means_and_cost(y.values(), &locations);
        Ok(ChangepointFit::new(
            locations,
            Vec::new(),
            Vec::new(),
            means,
            half_sse,
        ))
    }

    pub fn locations(&self) -> &[usize] {
        &self.locations
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn num_changepoints(&self) -> usize {
        self.locations.len()
    }

    pub fn has_step_info(&self) -> bool {
        !self.orders.is_empty() && self.orders.len() == self.locations.len()
    }

    /// Changepoints in the order they entered, with their signs.
    ///
    /// Errors unless the fit carries step information (binary segmentation).
    pub fn entry_sequence(&self) -> Result<Vec<(usize, i8)>> {
        if !self.has_step_info() {
            return Err(Error::invalid(
                "fit has no entry orders/signs (not produced by binary segmentation)",
            ));
        }
        let mut seq = vec![(0usize, 0i8); self.locations.len()];
        for (i, &rank) in self.orders.iter().enumerate() {
            seq[rank - 1] = (self.locations[i], self.signs[i]);
        }
        Ok(seq)
    }

    /// 1-based inclusive segment bounds `(start, end)` implied by the fit.
    pub fn segments(&self, t_len: usize) -> Vec<(usize, usize)> {
        segment_bounds(&self.locations, t_len)
    }

    /// Entry rank (1-based) of the changepoint at `tau`, if present.
    pub fn entry_rank_of(&self, tau: usize) -> Option<usize> {
        let i = self.locations.iter().position(|&l| l == tau)?;
        self.orders.get(i).copied()
    }
}

/// Segment bounds for sorted changepoints over `1..=t_len`.
pub(crate) fn segment_bounds(locations: &[usize], t_len: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(locations.len() + 1);
    let mut start = 1usize;
    for &loc in locations {
        out.push((start, loc));
        start = loc + 1;
    }
    out.push((start, t_len));
    out
}

/// Sample mean per segment and half the residual sum of squares.
pub(crate) fn segment_means_and_cost(values: &[f64], locations: &[usize]) -> (Vec<f64>, f64) {
    let bounds = segment_bounds(locations, values.len());
    let mut means = Vec::with_capacity(bounds.len());
    let mut half_sse = 0.0;
    for (s, e) in bounds {
        let seg = &values[s - 1..e];
        let m = seg.iter().sum::<f64>() / seg.len() as f64;
        half_sse += 0.5 * seg.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
        means.push(m);
    }
    (means, half_sse)
}
