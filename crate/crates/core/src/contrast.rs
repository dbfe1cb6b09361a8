// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::{ChangepointFit, Error, Result, TimeSeries};

/// Shape of a contrast vector ν used to test for a change in mean.
///
/// All indices are 1-based. `Spanning` puts weight `+1/(at-prev)` on
/// `(prev, at]` and `-1/(next-at)` on `(at, next]`, so `ν⊤y` is the mean of
/// the left segment minus the mean of the right segment. `Window` does the
/// same with a fixed half-width `h` on each side of `at`.
///
/// `Raw` carries explicit weights and exists only as a test fixture for the
/// simplified unit-weight perturbation; it is never produced by the public
/// detection → inference pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum ContrastKind {
    Spanning { prev: usize, at: usize, next: usize },
    Window { at: usize, h: usize },
    Raw { weights: Vec<(usize, f64)> },
}

/// A sparse contrast vector with cached `ν⊤y` and `‖ν‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contrast {
    kind: ContrastKind,
    len: usize,
    dot: f64,
    norm_sq: f64,
}

impl Contrast {
    pub fn kind(&self) -> &ContrastKind {
        &self.kind
    }

    /// Length `T` of the series the contrast was built against.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cached `ν⊤y`.
    pub fn dot(&self) -> f64 {
        self.dot
    }

    /// Cached `‖ν‖²`.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// `‖ν‖₂`.
    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }

    /// Weight at 1-based timepoint `t`.
    pub fn weight(&self, t: usize) -> f64 {
        match &self.kind {
            ContrastKind::Spanning { prev, at, next } => {
                if t > *prev && t <= *at {
                    1.0 / (*at - *prev) as f64
                } else if t > *at && t <= *next {
                    -1.0 / (*next - *at) as f64
                } else {
                    0.0
                }
            }
            ContrastKind::Window { at, h } => {
                if t + *h > *at && t <= *at {
                    1.0 / *h as f64
                } else if t > *at && t <= *at + *h {
                    -1.0 / *h as f64
                } else {
                    0.0
                }
            }
            ContrastKind::Raw { weights } => weights
                .iter()
                .find(|(i, _)| *i == t)
                .map(|(_, w)| *w)
                .unwrap_or(0.0),
        }
    }

    /// 1-based inclusive range of timepoints with nonzero weight.
    pub fn support(&self) -> (usize, usize) {
        match &self.kind {
            ContrastKind::Spanning { prev, next, .. } => (*prev + 1, *next),
            ContrastKind::Window { at, h } => (*at - *h + 1, *at + *h),
            ContrastKind::Raw { weights } => {
                let lo = weights.iter().map(|(i, _)| *i).min().unwrap();
                let hi = weights.iter().map(|(i, _)| *i).max().unwrap();
                (lo, hi)
            }
        }
    }

    /// The changepoint the contrast is centered on.
    pub fn at(&self) -> usize {
        match &self.kind {
            ContrastKind::Spanning { at, .. } | ContrastKind::Window { at, .. } => *at,
            ContrastKind::Raw { weights } => {
                // last positive-weight index; the fixture splits +/- at the
                // tested changepoint
                weights
                    .iter()
                    .filter(|(_, w)| *w > 0.0)
                    .map(|(i, _)| *i)
                    .max()
                    .unwrap_or(1)
            }
        }
    }

    /// `ν⊤v` for an arbitrary vector of length `T`.
    pub fn dot_with(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.len);
        let (lo, hi) = self.support();
        (lo..=hi).map(|t| self.weight(t) * v[t - 1]).sum()
    }

    /// Raw-weight fixture constructor. Test support only.
    pub fn raw(weights: Vec<(usize, f64)>, y: &TimeSeries) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("raw contrast needs at least one weight"));
        }
        if weights.iter().any(|(i, _)| *i < 1 || *i > y.len()) {
            return Err(Error::invalid("raw contrast weight index out of range"));
        }
        let norm_sq: f64 = weights.iter().map(|(_, w)| w * w).sum();
        if norm_sq <= 0.0 {
            return Err(Error::invalid("raw contrast has zero norm"));
        }
        let mut c = Contrast {
            kind: ContrastKind::Raw { weights },
            len: y.len(),
            dot: 0.0,
            norm_sq,
        };
        c.dot = c.dot_with(y.values());
        Ok(c)
    }
}

/// Builds the contrast spanning the neighbors of the `j`th estimated
/// changepoint (1-based `j`), with the conventions `τ̂_0 = 0` and
/// `τ̂_{K̂+1} = T`.
pub fn spanning_contrast(fit: &ChangepointFit, j: usize, y: &TimeSeries) -> Result<Contrast> {
    let locs = fit.locations();
    if j < 1 || j > locs.len() {
        return Err(Error::invalid(format!(
            "changepoint index j={j} out of range 1..={}",
            locs.len()
        )));
    }
    let t_len = y.len();
    let at = locs[j - 1];
    let prev = if j >= 2 { locs[j - 2] } else { 0 };
    let next = if j < locs.len() { locs[j] } else { t_len };
    debug_assert!(prev < at && at < next && next <= t_len);
    let norm_sq = 1.0 / (at - prev) as f64 + 1.0 / (next - at) as f64;
    let mut c = Contrast {
        kind: ContrastKind::Spanning { prev, at, next },
        len: t_len,
        dot: 0.0,
        norm_sq,
    };
    c.dot = c.dot_with(y.values());
    Ok(c)
}

/// Builds the fixed-window contrast of half-width `h` around `tau`.
///
/// Errors if the window exits the data range; there is no silent clipping.
pub fn window_contrast(tau: usize, h: usize, y: &TimeSeries) -> Result<Contrast> {
    let t_len = y.len();
    if h < 1 {
        return Err(Error::invalid("window half-width h must be >= 1"));
    }
    if tau < h || tau + h > t_len {
        return Err(Error::invalid(format!(
            "window [tau-h, tau+h] = [{}, {}] exits data range 0..={t_len} (tau={tau}, h={h})",
            tau as i64 - h as i64,
            tau + h
        )));
    }
    let mut c = Contrast {
        kind: ContrastKind::Window { at: tau, h },
        len: t_len,
        dot: 0.0,
        norm_sq: 2.0 / h as f64,
    };
    c.dot = c.dot_with(y.values());
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn fit_at(locs: &[usize], y: &TimeSeries) -> ChangepointFit {
        ChangepointFit::for_locations(locs.to_vec(), y).unwrap()
    }

    fn dense(c: &Contrast) -> Vec<f64> {
        (1..=c.len()).map(|t| c.weight(t)).collect()
    }

    #[test]
    fn spanning_single_changepoint_midpoint() {
        let y = series(&[0.0, 0.0, 1.0, 1.0]);
        let fit = fit_at(&[2], &y);
        let c = spanning_contrast(&fit, 1, &y).unwrap();
        assert_eq!(dense(&c), vec![0.5, 0.5, -0.5, -0.5]);
        assert!((c.norm_sq() - 1.0).abs() < 1e-15);
        assert!((c.dot() - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn spanning_thirds() {
        let y = series(&[1.0; 6]);
        let fit = fit_at(&[3], &y);
        let c = spanning_contrast(&fit, 1, &y).unwrap();
        let third = 1.0 / 3.0;
        assert_eq!(dense(&c), vec![third, third, third, -third, -third, -third]);
        assert!((c.norm_sq() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn spanning_uses_neighbor_changepoint() {
        let y = series(&[0.0; 8]);
        let fit = fit_at(&[2, 5], &y);
        let c = spanning_contrast(&fit, 1, &y).unwrap();
        let third = 1.0 / 3.0;
        assert_eq!(
            dense(&c),
            vec![0.5, 0.5, -third, -third, -third, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn spanning_rejects_out_of_range_j() {
        let y = series(&[0.0; 4]);
        let fit = fit_at(&[2], &y);
        assert!(matches!(
            spanning_contrast(&fit, 2, &y),
            Err(Error::InvalidArgument(_))
        ));
        assert!(spanning_contrast(&fit, 0, &y).is_err());
    }

    #[test]
    fn window_inside_range() {
        let y = series(&[0.0; 6]);
        let c = window_contrast(3, 2, &y).unwrap();
        assert_eq!(dense(&c), vec![0.0, 0.5, 0.5, -0.5, -0.5, 0.0]);
        assert!((c.norm_sq() - 1.0).abs() < 1e-15);

        let y4 = series(&[0.0; 4]);
        let c = window_contrast(2, 2, &y4).unwrap();
        assert_eq!(dense(&c), vec![0.5, 0.5, -0.5, -0.5]);
    }

    #[test]
    fn window_out_of_range_is_an_error() {
        let y = series(&[0.0; 6]);
        assert!(matches!(
            window_contrast(1, 2, &y),
            Err(Error::InvalidArgument(_))
        ));
        assert!(window_contrast(5, 2, &y).is_err());
        assert!(window_contrast(4, 2, &y).is_ok());
    }

    #[test]
    fn weights_sum_to_zero() {
        let y = series(&[0.3, -0.4, 2.0, 1.0, 0.0, 5.0, 1.5, 2.5]);
        let fit = fit_at(&[2, 5], &y);
        for j in 1..=2 {
            let c = spanning_contrast(&fit, j, &y).unwrap();
            let s: f64 = dense(&c).iter().sum();
            assert!(s.abs() < 1e-12);
        }
        let c = window_contrast(4, 3, &y).unwrap();
        let s: f64 = dense(&c).iter().sum();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn raw_fixture_weights() {
        let y = series(&[1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        let c = Contrast::raw(
            vec![(2, 1.0), (3, 1.0), (4, -1.0), (5, -1.0)],
            &y,
        )
        .unwrap();
        assert_eq!(c.support(), (2, 5));
        assert_eq!(c.at(), 3);
        assert!((c.norm_sq() - 4.0).abs() < 1e-15);
        assert!((c.dot() - (1.0 + 1.0 - 2.0 - 2.0)).abs() < 1e-15);
    }
}
