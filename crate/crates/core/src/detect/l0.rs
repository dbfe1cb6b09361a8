// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::fit::segment_means_and_cost;
use crate::pwq::{pw_min_with_source, MinSource, PiecewiseQuadratic, Quadratic1D};
use crate::{ChangepointFit, Error, Result, TimeSeries};

/// The running value function of the ℓ0 dynamic program at one timepoint:
/// the optimal partial cost as a piecewise quadratic in the current segment
/// mean `u`, with one "most recent changepoint" tag per piece for O(T)
/// backtracking.
#[derive(Debug, Clone)]
pub struct CostColumn {
    pub cost: PiecewiseQuadratic,
    pub last_cp: Vec<usize>,
}

impl CostColumn {
    fn first_point(y1: f64) -> Self {
        CostColumn {
            cost: PiecewiseQuadratic::from_quadratic(data_quad(y1)),
            last_cp: vec![0],
        }
    }

    /// Advances the column by one observation: take the cheaper of
    /// continuing the current segment or opening a new one at a cost of
    /// `best + λ`, then absorb the new data point.
    fn step(&self, y_s: f64, prev_index: usize, best_prev: f64, lambda: f64) -> Self {
        let change_branch = PiecewiseQuadratic::constant(best_prev + lambda);
        let (merged, sources) = pw_min_with_source(&self.cost, &change_branch);
        let mut tags = Vec::with_capacity(sources.len());
        for (i, src) in sources.iter().enumerate() {
            match src {
                MinSource::Second => tags.push(prev_index),
                MinSource::First => {
                    let (lo, hi) = merged.cell(i);
                    let rep = crate::pwq::interior_point(lo, hi);
                    tags.push(self.last_cp[self.cost.piece_index_at(rep)]);
                }
            }
        }
        CostColumn {
            cost: merged.add_quadratic(&data_quad(y_s)),
            last_cp: tags,
        }
    }

    /// Number of distinct "last changepoint" candidates still alive.
    pub fn candidate_count(&self) -> usize {
        let mut tags = self.last_cp.clone();
        tags.sort_unstable();
        tags.dedup();
        tags.len()
    }
}

/// `½ (y - u)²` as a quadratic in `u`.
fn data_quad(y: f64) -> Quadratic1D {
    Quadratic1D::new(0.5, -y, 0.5 * y * y)
}

/// Exact ℓ0 segmentation: minimizes half the residual sum of squares plus
/// `λ` per changepoint, by functional pruning over the segment mean.
///
/// Ties between equal-cost segmentations resolve toward continuing the
/// current segment (fewer changepoints) and toward smaller segment means.
pub fn l0_segment(y: &TimeSeries, lambda: f64) -> Result<ChangepointFit> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!(
            "penalty must be positive and finite; got {lambda}"
        )));
    }
    l0_segment_values(y.values(), lambda)
}

/// [`l0_segment`] on a raw slice; used for reruns on perturbed data.
pub fn l0_segment_values(values: &[f64], lambda: f64) -> Result<ChangepointFit> {
    let t_len = values.len();
    debug_assert!(t_len >= 2);
    let mut col = CostColumn::first_point(values[0]);
    // best_tag[s] = last changepoint of an optimal segmentation of y[..s]
    let mut best_tag = vec![0usize; t_len + 1];
    let mut best_val = f64::NAN;
    for s in 1..=t_len {
        if s > 1 {
            col = col.step(values[s - 1], s - 1, best_val, lambda);
        }
        let (v, _x, piece) = crate::pwq::pw_min_value_with_piece(&col.cost)?;
        best_val = v;
        best_tag[s] = col.last_cp[piece];
    }
    let mut locations = Vec::new();
    let mut tau = best_tag[t_len];
    while tau > 0 {
        locations.push(tau);
        tau = best_tag[tau];
    }
    locations.reverse();
    let (means, _half_sse) = segment_means_and_cost(values, &locations);
    Ok(ChangepointFit::new(
        locations,
        Vec::new(),
        Vec::new(),
        means,
        best_val,
    ))
}

/// Forward partial cost `Cost(y[1..=upto]; u)` of the unperturbed data, or
/// `None` when the prefix is empty.
pub fn l0_cost_forward(values: &[f64], lambda: f64, upto: usize) -> Option<PiecewiseQuadratic> {
    if upto == 0 {
        return None;
    }
    let mut col = CostColumn::first_point(values[0]);
    let mut best_val = f64::NAN;
    for s in 1..=upto {
        if s > 1 {
            col = col.step(values[s - 1], s - 1, best_val, lambda);
        }
        if s < upto {
            best_val = crate::pwq::pw_min_value(&col.cost)
                .expect("partial cost is bounded below")
                .0;
        }
    }
    Some(col.cost)
}

/// Reverse partial cost `Cost(y[T..=downto]; u)` (processing from the end),
/// or `None` when `downto > T`.
pub fn l0_cost_reverse(values: &[f64], lambda: f64, downto: usize) -> Option<PiecewiseQuadratic> {
    let t_len = values.len();
    if downto > t_len {
        return None;
    }
    let rev: Vec<f64> = values[downto - 1..].iter().rev().cloned().collect();
    l0_cost_forward(&rev, lambda, rev.len())
}

/// Result of searching for a penalty that yields a target changepoint count.
#[derive(Debug, Clone)]
pub struct LambdaSearch {
    pub lambda: f64,
    pub fit: ChangepointFit,
}

impl LambdaSearch {
    pub fn achieved(&self) -> usize {
        self.fit.num_changepoints()
    }
}

const LAMBDA_BISECTION_CAP: usize = 60;

/// Bisection on `λ` targeting `k_target` changepoints (the count is
/// non-increasing in `λ` in practice). Prefers an exact match; otherwise
/// returns the evaluated `λ` whose count came closest.
pub fn l0_lambda_for_k(
    y: &TimeSeries,
    k_target: usize,
    lambda_bounds: (f64, f64),
) -> Result<LambdaSearch> {
    let (mut lo, mut hi) = lambda_bounds;
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
        return Err(Error::invalid(format!(
            "penalty bounds must satisfy 0 < lo < hi < inf; got ({lo}, {hi})"
        )));
    }
    if k_target > y.len() - 1 {
        return Err(Error::invalid(format!(
            "target count {k_target} exceeds maximum {}",
            y.len() - 1
        )));
    }
    let eval = |lambda: f64| -> Result<LambdaSearch> {
        Ok(LambdaSearch {
            lambda,
            fit: l0_segment(y, lambda)?,
        })
    };
    let mut best: Option<LambdaSearch> = None;
    let consider = |cand: LambdaSearch, best: &mut Option<LambdaSearch>| {
        let dist = cand.achieved().abs_diff(k_target);
        match best {
            Some(b) if b.achieved().abs_diff(k_target) <= dist => {}
            _ => *best = Some(cand),
        }
    };
    let at_lo = eval(lo)?;
    if at_lo.achieved() == k_target {
        return Ok(at_lo);
    }
    let at_hi = eval(hi)?;
    if at_hi.achieved() == k_target {
        return Ok(at_hi);
    }
    consider(at_lo, &mut best);
    consider(at_hi, &mut best);
    for _ in 0..LAMBDA_BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let at_mid = eval(mid)?;
        let count = at_mid.achieved();
        if count == k_target {
            return Ok(at_mid);
        }
        consider(at_mid, &mut best);
        if count > k_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.expect("at least the endpoints were evaluated"))
}
