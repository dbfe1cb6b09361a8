// SPDX-License-Identifier: MIT OR Apache-2.0

/// Merge tolerance for touching endpoints: gaps smaller than this are closed.
fn merge_tol(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(1.0);
    if scale.is_finite() {
        1e-10 * scale
    } else {
        0.0
    }
}

/// A sorted union of disjoint closed intervals of the real line.
///
/// Endpoints may be `-inf`/`+inf` (represented explicitly, never by large
/// sentinels). `truncated` records that far regimes were replaced by full
/// tails during an early-stopped conditioning-set walk, which makes p-values
/// computed from the set conservative.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
    truncated: bool,
}

impl IntervalUnion {
    /// Normalizes a list of closed intervals: drops empty ones, sorts, and
    /// merges overlapping or nearly-touching neighbors.
    pub fn from_intervals(raw: Vec<(f64, f64)>) -> Self {
        let mut iv: Vec<(f64, f64)> = raw
            .into_iter()
            .filter(|(lo, hi)| lo <= hi && !lo.is_nan() && !hi.is_nan())
            .collect();
        iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
        for (lo, hi) in iv {
            match out.last_mut() {
                Some((_, prev_hi)) if lo <= *prev_hi + merge_tol(lo, *prev_hi) => {
                    *prev_hi = prev_hi.max(hi);
                }
                _ => out.push((lo, hi)),
            }
        }
        IntervalUnion {
            intervals: out,
            truncated: false,
        }
    }

    pub fn empty() -> Self {
        IntervalUnion {
            intervals: Vec::new(),
            truncated: false,
        }
    }

    /// The whole real line.
    pub fn full() -> Self {
        IntervalUnion {
            intervals: vec![(f64::NEG_INFINITY, f64::INFINITY)],
            truncated: false,
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn set_truncated(&mut self, truncated: bool) {
        self.truncated = truncated;
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Union with another set; `truncated` is inherited if either side is.
    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        let mut u = IntervalUnion::from_intervals(all);
        u.truncated = self.truncated || other.truncated;
        u
    }

    /// Intersection with the two-sided tail region `{x : |x| >= c}`.
    pub fn intersect_abs_ge(&self, c: f64) -> IntervalUnion {
        debug_assert!(c >= 0.0);
        let mut out = Vec::new();
        for &(lo, hi) in &self.intervals {
            // negative tail piece
            if lo <= -c {
                out.push((lo, hi.min(-c)));
            }
            // positive tail piece
            if hi >= c {
                out.push((lo.max(c), hi));
            }
        }
        let mut u = IntervalUnion::from_intervals(out);
        u.truncated = self.truncated;
        u
    }

    /// Total length that lies within `[lo, hi]`; used by grid oracles.
    pub fn clipped_length(&self, lo: f64, hi: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| (b.min(hi) - a.max(lo)).max(0.0))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn normalizes_and_merges_touching() {
        let u = IntervalUnion::from_intervals(vec![(1.0, 2.0), (-1.0, 0.5), (0.5, 1.2)]);
        assert_eq!(u.intervals(), &[(-1.0, 2.0)]);

        // gap below tolerance is merged
        let u = IntervalUnion::from_intervals(vec![(0.0, 1.0), (1.0 + 1e-12, 2.0)]);
        assert_eq!(u.intervals().len(), 1);

        // real gap survives
        let u = IntervalUnion::from_intervals(vec![(0.0, 1.0), (1.1, 2.0)]);
        assert_eq!(u.intervals().len(), 2);
    }

    #[test]
    fn handles_unbounded_ends() {
        let u = IntervalUnion::from_intervals(vec![(0.0, INF), (-INF, -1.0)]);
        assert_eq!(u.intervals(), &[(-INF, -1.0), (0.0, INF)]);
        assert!(u.contains(-5.0));
        assert!(!u.contains(-0.5));
        assert!(u.contains(1e300));
    }

    #[test]
    fn two_sided_tail_intersection() {
        let u = IntervalUnion::from_intervals(vec![(-3.0, -0.5), (0.2, 4.0)]);
        let t = u.intersect_abs_ge(1.0);
        assert_eq!(t.intervals(), &[(-3.0, -1.0), (1.0, 4.0)]);

        let full = IntervalUnion::full().intersect_abs_ge(2.0);
        assert_eq!(full.intervals(), &[(-INF, -2.0), (2.0, INF)]);

        // interval entirely inside (-c, c) disappears
        let u = IntervalUnion::from_intervals(vec![(-0.5, 0.5)]);
        assert!(u.intersect_abs_ge(1.0).is_empty());

        // c = 0 keeps everything
        let u = IntervalUnion::from_intervals(vec![(-2.0, 3.0)]);
        assert_eq!(u.intersect_abs_ge(0.0).intervals(), &[(-2.0, 3.0)]);
    }

    #[test]
    fn union_inherits_truncation() {
        let mut a = IntervalUnion::from_intervals(vec![(0.0, 1.0)]);
        a.set_truncated(true);
        let b = IntervalUnion::from_intervals(vec![(2.0, 3.0)]);
        let u = a.union(&b);
        assert!(u.truncated());
        assert_eq!(u.intervals().len(), 2);
    }

    #[test]
    fn grid_oracle_union_and_intersection_agree() {
        // randomized check against a dense grid of membership tests
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let mut iv_a = Vec::new();
            let mut iv_b = Vec::new();
            for _ in 0..4 {
                let lo = next() * 20.0 - 10.0;
                iv_a.push((lo, lo + next() * 5.0));
                let lo = next() * 20.0 - 10.0;
                iv_b.push((lo, lo + next() * 5.0));
            }
            let a = IntervalUnion::from_intervals(iv_a);
            let b = IntervalUnion::from_intervals(iv_b);
            let u = a.union(&b);
            let c = 2.0 * next();
            let t = a.intersect_abs_ge(c);
            for i in 0..2000 {
                let x = -12.0 + 24.0 * (i as f64) / 1999.0;
                // skip points within tolerance of any endpoint
                let near = a
                    .intervals()
                    .iter()
                    .chain(b.intervals())
                    .any(|&(lo, hi)| (x - lo).abs() < 1e-6 || (x - hi).abs() < 1e-6)
                    || (x.abs() - c).abs() < 1e-6;
                if near {
                    continue;
                }
                assert_eq!(u.contains(x), a.contains(x) || b.contains(x));
                assert_eq!(t.contains(x), a.contains(x) && x.abs() >= c);
            }
        }
    }
}
