// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::{Error, IntervalUnion, Result};
use std::fmt;

/// A single quadratic `a x² + b x + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic1D {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Quadratic1D {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        debug_assert!(a.is_finite() && b.is_finite() && c.is_finite());
        Quadratic1D { a, b, c }
    }

    pub fn constant(c: f64) -> Self {
        Quadratic1D::new(0.0, 0.0, c)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }

    pub fn add(&self, other: &Quadratic1D) -> Quadratic1D {
        let snap = |v: f64, x: f64, y: f64| {
            if v.abs() <= 1e-12 * x.abs().max(y.abs()) {
                0.0
            } else {
                v
            }
        };
        Quadratic1D::new(
            snap(self.a + other.a, self.a, other.a),
            snap(self.b + other.b, self.b, other.b),
            snap(self.c + other.c, self.c, other.c),
        )
    }

    pub fn sub(&self, other: &Quadratic1D) -> Quadratic1D {
        Quadratic1D::new(self.a - other.a, self.b - other.b, self.c - other.c)
    }

    pub fn add_const(&self, c: f64) -> Quadratic1D {
        Quadratic1D::new(self.a, self.b, self.c + c)
    }

    fn coeff_scale(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs())
    }

    fn approx_eq(&self, other: &Quadratic1D, rel: f64) -> bool {
        let scale = self.coeff_scale().max(other.coeff_scale()).max(1.0);
        (self.a - other.a).abs() <= rel * scale
            && (self.b - other.b).abs() <= rel * scale
            && (self.c - other.c).abs() <= rel * scale
    }
}

/// Real roots of a quadratic, computed with the numerically stable form
/// `q = -(b + sign(b)·√disc)/2`. Discriminants within `1e-12` of zero
/// (relative to the coefficient scale) are treated as tangencies and report
/// no crossing, which suppresses spurious micro-intervals.
fn quad_roots(q: &Quadratic1D) -> Option<(f64, f64)> {
    let (a, b, c) = (q.a, q.b, q.c);
    if a == 0.0 {
        if b == 0.0 {
            return None;
        }
        let r = -c / b;
        return Some((r, r));
    }
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs()).max(f64::MIN_POSITIVE);
    if disc <= 1e-12 * scale {
        return None; // no crossing (negative or tangent)
    }
    let sq = disc.sqrt();
    let qq = -0.5 * (b + b.signum() * sq);
    let (r1, r2) = if qq == 0.0 {
        // b == 0: symmetric roots
        let r = (-c / a).sqrt();
        (-r, r)
    } else {
        (qq / a, c / qq)
    };
    Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

/// Which argument of a pointwise minimum produced a piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinSource {
    First,
    Second,
}

/// A piecewise quadratic function covering all of ℝ.
///
/// `breakpoints` are strictly increasing and finite; cell `i` spans
/// `[breakpoints[i-1], breakpoints[i]]` with the first cell extending to
/// `-inf` and the last to `+inf`. There is one `Quadratic1D` per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseQuadratic {
    breakpoints: Vec<f64>,
    pieces: Vec<Quadratic1D>,
}

impl PiecewiseQuadratic {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Quadratic1D>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::invalid(format!(
                "need {} pieces for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("breakpoints must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        Ok(PiecewiseQuadratic {
            breakpoints,
            pieces,
        })
    }

    pub fn constant(c: f64) -> Self {
        PiecewiseQuadratic {
            breakpoints: Vec::new(),
            pieces: vec![Quadratic1D::constant(c)],
        }
    }

    pub fn from_quadratic(q: Quadratic1D) -> Self {
        PiecewiseQuadratic {
            breakpoints: Vec::new(),
            pieces: vec![q],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Quadratic1D] {
        &self.pieces
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// Bounds of cell `i` (may be infinite).
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            self.breakpoints[i - 1]
        };
        let hi = if i == self.breakpoints.len() {
            f64::INFINITY
        } else {
            self.breakpoints[i]
        };
        (lo, hi)
    }

    fn cell_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < x)
    }

    /// Index of the piece whose cell contains `x` (points on a breakpoint
    /// resolve to the right cell).
    pub fn piece_index_at(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.cell_index(x);
        let mut v = self.pieces[i].eval(x);
        // at a shared breakpoint the function takes the min of both cells
        if i < self.breakpoints.len() && self.breakpoints[i] == x {
            v = v.min(self.pieces[i + 1].eval(x));
        }
        v
    }

    /// Adds a single quadratic to every piece.
    pub fn add_quadratic(&self, q: &Quadratic1D) -> PiecewiseQuadratic {
        PiecewiseQuadratic {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.add(q)).collect(),
        }
    }

    pub fn add_const(&self, c: f64) -> PiecewiseQuadratic {
        self.add_quadratic(&Quadratic1D::constant(c))
    }

    /// Pointwise sum.
    pub fn add(&self, other: &PiecewiseQuadratic) -> PiecewiseQuadratic {
        let bps = merge_breakpoints(&self.breakpoints, &other.breakpoints);
        let mut pieces = Vec::with_capacity(bps.len() + 1);
        for i in 0..=bps.len() {
            let rep = cell_representative(&bps, i);
            let qa = self.pieces[self.cell_index_for_rep(rep)];
            let qb = other.pieces[other.cell_index_for_rep(rep)];
            pieces.push(qa.add(&qb));
        }
        PiecewiseQuadratic {
            breakpoints: bps,
            pieces,
        }
        .coalesced()
    }

    fn cell_index_for_rep(&self, rep: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= rep)
    }

    /// Merges adjacent cells whose quadratics agree to relative tolerance
    /// `1e-10`; bounds the growth in piece count under repeated operations.
    pub fn coalesced(&self) -> PiecewiseQuadratic {
        if self.pieces.len() <= 1 {
            return self.clone();
        }
        let mut bps = Vec::with_capacity(self.breakpoints.len());
        let mut pieces = vec![self.pieces[0]];
        for i in 1..self.pieces.len() {
            let prev = pieces.last().unwrap();
            if self.pieces[i].approx_eq(prev, 1e-10) {
                continue;
            }
            bps.push(self.breakpoints[i - 1]);
            pieces.push(self.pieces[i]);
        }
        PiecewiseQuadratic {
            breakpoints: bps,
            pieces,
        }
    }

    /// Plain-text dump: one `cell_lo cell_hi a b c` line per piece.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let (lo, hi) = self.cell(i);
            out.push_str(&format!("{lo} {hi} {} {} {}\n", p.a, p.b, p.c));
        }
        out
    }
}

impl fmt::Display for PiecewiseQuadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dump())
    }
}

fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => {
                if x <= y {
                    i += 1;
                    if x == y {
                        j += 1;
                    }
                    x
                } else {
                    j += 1;
                    y
                }
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.last().map_or(true, |&l| next > l) {
            out.push(next);
        }
    }
    out
}

/// A point strictly inside cell `i` of the given breakpoint list.
fn cell_representative(bps: &[f64], i: usize) -> f64 {
    let lo = if i == 0 {
        f64::NEG_INFINITY
    } else {
        bps[i - 1]
    };
    let hi = if i == bps.len() { f64::INFINITY } else { bps[i] };
    interior_point(lo, hi)
}

pub(crate) fn interior_point(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 0.0,
    }
}

/// Splits `[lo, hi]` at the crossings of `qa - qb` and reports the winner of
/// the pointwise minimum on each sub-cell.
/// Difference of two quadratics with cancellation noise snapped to zero, so
/// that near-identical coefficients never fabricate crossings at huge
/// arguments where the noise would dominate the evaluation.
pub(crate) fn stable_diff(qa: &Quadratic1D, qb: &Quadratic1D) -> Quadratic1D {
    let snap = |v: f64, x: f64, y: f64| {
        if v.abs() <= 1e-12 * x.abs().max(y.abs()) {
            0.0
        } else {
            v
        }
    };
    Quadratic1D::new(
        snap(qa.a - qb.a, qa.a, qb.a),
        snap(qa.b - qb.b, qa.b, qb.b),
        snap(qa.c - qb.c, qa.c, qb.c),
    )
}

pub(crate) fn min_two_on_window(
    lo: f64,
    hi: f64,
    qa: &Quadratic1D,
    qb: &Quadratic1D,
) -> Vec<(f64, f64, MinSource)> {
    let d = stable_diff(qa, qb);
    let mut cuts: Vec<f64> = Vec::new();
    if let Some((r1, r2)) = quad_roots(&d) {
        for r in [r1, r2] {
            if r > lo && r < hi && cuts.last().map_or(true, |&l| r > l) {
                // drop cuts indistinguishable from the cell edges
                let span_tol = 1e-13 * (r.abs().max(1.0));
                if (r - lo).abs() > span_tol && (hi - r).abs() > span_tol {
                    cuts.push(r);
                }
            }
        }
    }
    let mut edges = vec![lo];
    edges.extend(cuts);
    edges.push(hi);
    let mut out = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let rep = interior_point(w[0], w[1]);
        // decide by the sign of the (noise-snapped) difference; ties prefer
        // the first argument
        let src = if d.eval(rep) <= 0.0 {
            MinSource::First
        } else {
            MinSource::Second
        };
        out.push((w[0], w[1], src));
    }
    out
}

/// Pointwise minimum, reporting per-piece which input produced it. Exact
/// ties prefer the first argument.
pub fn pw_min_with_source(
    f: &PiecewiseQuadratic,
    g: &PiecewiseQuadratic,
) -> (PiecewiseQuadratic, Vec<MinSource>) {
    let bps = merge_breakpoints(&f.breakpoints, &g.breakpoints);
    let mut out_bps: Vec<f64> = Vec::new();
    let mut out_pieces: Vec<Quadratic1D> = Vec::new();
    let mut out_src: Vec<MinSource> = Vec::new();
    for i in 0..=bps.len() {
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            bps[i - 1]
        };
        let hi = if i == bps.len() { f64::INFINITY } else { bps[i] };
        let rep = interior_point(lo, hi);
        let qa = f.pieces[f.cell_index_for_rep(rep)];
        let qb = g.pieces[g.cell_index_for_rep(rep)];
        for (sub_lo, sub_hi, src) in min_two_on_window(lo, hi, &qa, &qb) {
            let q = match src {
                MinSource::First => qa,
                MinSource::Second => qb,
            };
            // merge with previous piece when coefficients and source agree
            if let (Some(last_q), Some(&last_src)) = (out_pieces.last(), out_src.last()) {
                if last_src == src && last_q.approx_eq(&q, 1e-14) {
                    continue; // extend previous cell: skip adding breakpoint
                }
            }
            if sub_lo.is_finite() && !out_pieces.is_empty() {
                out_bps.push(sub_lo);
            }
            out_pieces.push(q);
            out_src.push(src);
            let _ = sub_hi;
        }
    }
    (
        PiecewiseQuadratic {
            breakpoints: out_bps,
            pieces: out_pieces,
        },
        out_src,
    )
}

/// Pointwise minimum of two piecewise quadratics.
pub fn pw_min(f: &PiecewiseQuadratic, g: &PiecewiseQuadratic) -> PiecewiseQuadratic {
    pw_min_with_source(f, g).0.coalesced()
}

/// Global minimum and one attaining point, ties broken toward the smaller
/// argument. Errors if the function is unbounded below.
pub fn pw_min_value(f: &PiecewiseQuadratic) -> Result<(f64, f64)> {
    pw_min_value_with_piece(f).map(|(v, x, _)| (v, x))
}

/// As [`pw_min_value`] but also reports the index of the attaining piece.
pub fn pw_min_value_with_piece(f: &PiecewiseQuadratic) -> Result<(f64, f64, usize)> {
    let mut best: Option<(f64, f64, usize)> = None;
    for (i, q) in f.pieces.iter().enumerate() {
        let (lo, hi) = f.cell(i);
        let cand = cell_min(q, lo, hi)?;
        match best {
            Some((bv, bx, _)) if bv < cand.0 || (bv == cand.0 && bx <= cand.1) => {}
            _ => best = Some((cand.0, cand.1, i)),
        }
    }
    best.ok_or_else(|| Error::invariant("piecewise function has no pieces"))
}

/// Minimum of one quadratic over a closed (possibly unbounded) cell.
fn cell_min(q: &Quadratic1D, lo: f64, hi: f64) -> Result<(f64, f64)> {
    if q.a > 0.0 {
        let v = -q.b / (2.0 * q.a);
        if v >= lo && v <= hi {
            return Ok((q.eval(v), v));
        }
        // fall through to endpoint comparison
    } else if q.a < 0.0 {
        if lo == f64::NEG_INFINITY || hi == f64::INFINITY {
            return Err(Error::domain("piece is unbounded below (negative curvature)"));
        }
    } else if q.b != 0.0 {
        if (q.b > 0.0 && lo == f64::NEG_INFINITY) || (q.b < 0.0 && hi == f64::INFINITY) {
            return Err(Error::domain("piece is unbounded below (linear drift)"));
        }
    } else {
        // constant piece: any point attains; report the leftmost finite spot
        let x = if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        };
        return Ok((q.c, x));
    }
    // compare finite endpoints (an infinite endpoint cannot be the min here)
    let mut best: Option<(f64, f64)> = None;
    for x in [lo, hi] {
        if x.is_finite() {
            let v = q.eval(x);
            match best {
                Some((bv, bx)) if bv < v || (bv == v && bx <= x) => {}
                _ => best = Some((v, x)),
            }
        }
    }
    best.ok_or_else(|| Error::domain("cell has no finite endpoint"))
}

/// The closed region `{x : f(x) <= g(x) + tol}` as an interval union, with
/// `tol` scaled per cell by the magnitudes of `f` and `g`.
pub fn pw_sublevel(f: &PiecewiseQuadratic, g: &PiecewiseQuadratic) -> IntervalUnion {
    pw_sublevel_with_tol(f, g, 1e-9)
}

/// As [`pw_sublevel`] with an explicit relative tolerance.
pub fn pw_sublevel_with_tol(
    f: &PiecewiseQuadratic,
    g: &PiecewiseQuadratic,
    rel_tol: f64,
) -> IntervalUnion {
    let bps = merge_breakpoints(&f.breakpoints, &g.breakpoints);
    let mut regions: Vec<(f64, f64)> = Vec::new();
    for i in 0..=bps.len() {
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            bps[i - 1]
        };
        let hi = if i == bps.len() { f64::INFINITY } else { bps[i] };
        let rep = interior_point(lo, hi);
        let qa = f.pieces[f.cell_index_for_rep(rep)];
        let qb = g.pieces[g.cell_index_for_rep(rep)];
        let tol = rel_tol * (1.0 + qa.eval(rep).abs() + qb.eval(rep).abs());
        let d = stable_diff(&qa, &qb).add_const(-tol);
        regions.extend(nonpositive_region(&d, lo, hi));
    }
    IntervalUnion::from_intervals(regions)
}

/// Sub-intervals of `[lo, hi]` where the quadratic is `<= 0`.
fn nonpositive_region(d: &Quadratic1D, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let scale = d.coeff_scale();
    // effectively constant
    if d.a.abs() <= 1e-300 && d.b.abs() <= 1e-300 {
        return if d.c <= 0.0 { vec![(lo, hi)] } else { vec![] };
    }
    match quad_roots(d) {
        None => {
            // no sign change: decide by the interior value
            let rep = interior_point(lo, hi);
            if d.eval(rep) <= 1e-12 * scale.max(1.0) {
                vec![(lo, hi)]
            } else {
                vec![]
            }
        }
        Some((r1, r2)) => {
            if d.a == 0.0 {
                // linear: single crossing at r1
                if d.b > 0.0 {
                    vec![(lo, r1.min(hi))]
                } else {
                    vec![(r1.max(lo), hi)]
                }
            } else if d.a > 0.0 {
                // nonpositive between the roots
                vec![(r1.max(lo), r2.min(hi))]
            } else {
                // nonpositive outside the roots
                vec![(lo, r1.min(hi)), (r2.max(lo), hi)]
            }
        }
    }
}
