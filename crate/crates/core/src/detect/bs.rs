// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::fit::segment_means_and_cost;
use crate::{ChangepointFit, Error, Result, TimeSeries};

/// A candidate split: segment `[s, e]` split after `tau` (all 1-based,
/// `s <= tau < e`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CusumTriple {
    pub s: usize,
    pub tau: usize,
    pub e: usize,
}

impl CusumTriple {
    pub fn new(s: usize, tau: usize, e: usize) -> Self {
        CusumTriple { s, tau, e }
    }

    pub fn validate(&self, t_len: usize) -> Result<()> {
        if self.s >= 1 && self.s <= self.tau && self.tau < self.e && self.e <= t_len {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "invalid CUSUM triple (s={}, tau={}, e={}) for length {t_len}",
                self.s, self.tau, self.e
            )))
        }
    }
}

/// Cumulative sums enabling O(1) range means and CUSUM evaluations.
#[derive(Debug, Clone)]
pub struct PrefixSums {
    cum: Vec<f64>,
}

impl PrefixSums {
    pub fn new(values: &[f64]) -> Self {
        let mut cum = Vec::with_capacity(values.len() + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for v in values {
            acc += v;
            cum.push(acc);
        }
        PrefixSums { cum }
    }

    pub fn len(&self) -> usize {
        self.cum.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sum of the 1-based inclusive range `a..=b`.
    pub fn range_sum(&self, a: usize, b: usize) -> f64 {
        self.cum[b] - self.cum[a - 1]
    }

    pub fn range_mean(&self, a: usize, b: usize) -> f64 {
        self.range_sum(a, b) / (b - a + 1) as f64
    }

    /// CUSUM statistic `g⊤_(s,τ,e) v`: the normalized difference of the
    /// sample means after and before the split.
    pub fn cusum(&self, t: CusumTriple) -> f64 {
        let n_left = (t.tau + 1 - t.s) as f64;
        let n_right = (t.e - t.tau) as f64;
        let w = (1.0 / (1.0 / n_right + 1.0 / n_left)).sqrt();
        w * (self.range_mean(t.tau + 1, t.e) - self.range_mean(t.s, t.tau))
    }
}

/// CUSUM statistic of a split of `y`.
pub fn cusum(y: &TimeSeries, t: CusumTriple) -> Result<f64> {
    t.validate(y.len())?;
    Ok(PrefixSums::new(y.values()).cusum(t))
}

/// `k`-step binary segmentation.
///
/// At each step the `(segment, τ)` pair maximizing `|CUSUM|` over all
/// current segments is split; ties break toward the smallest `τ`. The fit
/// records entry orders and the sign of each chosen statistic (a zero
/// statistic gets sign `+1`). The objective is half the residual sum of
/// squares of the final segmentation.
pub fn binseg(y: &TimeSeries, k: usize) -> Result<ChangepointFit> {
    if k < 1 || k > y.len() - 1 {
        return Err(Error::invalid(format!(
            "step count k={k} out of range 1..={}",
            y.len() - 1
        )));
    }
    binseg_values(y.values(), k)
}

/// [`binseg`] on a raw slice; used for reruns on perturbed data.
pub fn binseg_values(values: &[f64], k: usize) -> Result<ChangepointFit> {
    let t_len = values.len();
    let ps = PrefixSums::new(values);
    let mut segments: Vec<(usize, usize)> = vec![(1, t_len)];
    let mut entries: Vec<(usize, i8)> = Vec::with_capacity(k);
    for step in 0..k {
        let mut best: Option<(f64, usize, f64)> = None; // (|g|, tau, g)
        for &(s, e) in &segments {
            if e - s < 1 {
                continue;
            }
            for tau in s..e {
                let g = ps.cusum(CusumTriple::new(s, tau, e));
                let a = g.abs();
                let better = match best {
                    None => true,
                    Some((ba, btau, _)) => a > ba || (a == ba && tau < btau),
                };
                if better {
                    best = Some((a, tau, g));
                }
            }
        }
        let (_, tau, g) = best.ok_or(Error::SegmentationExhausted {
            found: step,
            requested: k,
        })?;
        let sign = if g < 0.0 { -1 } else { 1 };
        entries.push((tau, sign));
        // split the segment containing tau
        let idx = segments
            .iter()
            .position(|&(s, e)| s <= tau && tau < e)
            .expect("chosen split lies in a segment");
        let (s, e) = segments[idx];
        segments.splice(idx..=idx, [(s, tau), (tau + 1, e)]);
    }
    // assemble sorted locations with entry ranks and signs
    let mut order_ix: Vec<usize> = (0..entries.len()).collect();
    order_ix.sort_by_key(|&i| entries[i].0);
    let locations: Vec<usize> = order_ix.iter().map(|&i| entries[i].0).collect();
    let orders: Vec<usize> = order_ix.iter().map(|&i| i + 1).collect();
    let signs: Vec<i8> = order_ix.iter().map(|&i| entries[i].1).collect();
    let (means, objective) = segment_means_and_cost(values, &locations);
    Ok(ChangepointFit::new(
        locations, orders, signs, means, objective,
    ))
}
