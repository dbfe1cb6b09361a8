// SPDX-License-Identifier: MIT OR Apache-2.0

use super::uni::{min_two_on_window, MinSource, PiecewiseQuadratic, Quadratic1D};
use crate::{Error, Result};

/// A bivariate quadratic
/// `a_uu u² + a_uphi uφ + a_phiphi φ² + b_u u + b_phi φ + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivQuad {
    pub a_uu: f64,
    pub a_uphi: f64,
    pub a_phiphi: f64,
    pub b_u: f64,
    pub b_phi: f64,
    pub c: f64,
}

impl BivQuad {
    pub fn zero() -> Self {
        BivQuad {
            a_uu: 0.0,
            a_uphi: 0.0,
            a_phiphi: 0.0,
            b_u: 0.0,
            b_phi: 0.0,
            c: 0.0,
        }
    }

    pub fn from_u_quad(q: &Quadratic1D) -> Self {
        BivQuad {
            a_uu: q.a,
            a_uphi: 0.0,
            a_phiphi: 0.0,
            b_u: q.b,
            b_phi: 0.0,
            c: q.c,
        }
    }

    pub fn from_phi_quad(q: &Quadratic1D) -> Self {
        BivQuad {
            a_uu: 0.0,
            a_uphi: 0.0,
            a_phiphi: q.a,
            b_u: 0.0,
            b_phi: q.b,
            c: q.c,
        }
    }

    /// The expansion of `½ (c_t + s_t φ - u)²`: the squared-error term of one
    /// data point on the perturbation path.
    pub fn data_term(c_t: f64, s_t: f64) -> Self {
        BivQuad {
            a_uu: 0.5,
            a_uphi: -s_t,
            a_phiphi: 0.5 * s_t * s_t,
            b_u: -c_t,
            b_phi: c_t * s_t,
            c: 0.5 * c_t * c_t,
        }
    }

    /// Coefficient-wise sum. Sums that cancel to within rounding noise of
    /// their operands are snapped to exact zero: the forward and reverse
    /// slopes of a balanced contrast cancel exactly in theory, and leftover
    /// noise in the `uφ` coupling would otherwise place spurious vertex
    /// thresholds at astronomically large φ.
    pub fn add(&self, o: &BivQuad) -> BivQuad {
        BivQuad {
            a_uu: snap_diff(self.a_uu + o.a_uu, self.a_uu, o.a_uu),
            a_uphi: snap_diff(self.a_uphi + o.a_uphi, self.a_uphi, o.a_uphi),
            a_phiphi: snap_diff(self.a_phiphi + o.a_phiphi, self.a_phiphi, o.a_phiphi),
            b_u: snap_diff(self.b_u + o.b_u, self.b_u, o.b_u),
            b_phi: snap_diff(self.b_phi + o.b_phi, self.b_phi, o.b_phi),
            c: snap_diff(self.c + o.c, self.c, o.c),
        }
    }

    pub fn eval(&self, u: f64, phi: f64) -> f64 {
        self.a_uu * u * u
            + self.a_uphi * u * phi
            + self.a_phiphi * phi * phi
            + self.b_u * u
            + self.b_phi * phi
            + self.c
    }

    /// The quadratic in φ obtained by fixing `u`.
    pub fn at_u(&self, u: f64) -> Quadratic1D {
        Quadratic1D::new(
            self.a_phiphi,
            self.a_uphi * u + self.b_phi,
            (self.a_uu * u + self.b_u) * u + self.c,
        )
    }

    /// Coefficients `(alpha, beta)` of the minimizing `u*(φ) = alpha + beta φ`.
    fn u_vertex(&self) -> (f64, f64) {
        debug_assert!(self.a_uu > 0.0);
        (-self.b_u / (2.0 * self.a_uu), -self.a_uphi / (2.0 * self.a_uu))
    }

    /// `min_u` of the quadratic, eliminating `u` at its vertex.
    ///
    /// The eliminations cancel exactly for flat directions; leftover noise
    /// is snapped to zero relative to the contributing terms so that no
    /// spurious curvature survives (it would otherwise fabricate crossings
    /// at astronomically large φ).
    pub fn min_over_u_unclamped(&self) -> Result<Quadratic1D> {
        if self.a_uu <= 0.0 {
            return Err(Error::invariant(format!(
                "min over u requires positive u-curvature; got {}",
                self.a_uu
            )));
        }
        let inv = 1.0 / (4.0 * self.a_uu);
        let a_sub = self.a_uphi * self.a_uphi * inv;
        let b_sub = self.a_uphi * self.b_u * (2.0 * inv);
        let c_sub = self.b_u * self.b_u * inv;
        Ok(Quadratic1D::new(
            snap_diff(self.a_phiphi - a_sub, self.a_phiphi, a_sub),
            snap_diff(self.b_phi - b_sub, self.b_phi, b_sub),
            snap_diff(self.c - c_sub, self.c, c_sub),
        ))
    }

}

/// A quadratic of `(u, φ)` laid out piecewise on a product grid of u-cells
/// and φ-cells covering the plane.
///
/// Most functions arising in the cost recursions have a single u-cell; u
/// breakpoints enter only through the seed cost of an unperturbed stretch,
/// which is piecewise in `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePW {
    u_breaks: Vec<f64>,
    phi_breaks: Vec<f64>,
    cells: Vec<BivQuad>, // row-major: u-cell index major, φ-cell index minor
}

impl BivariatePW {
    pub fn constant(c: f64) -> Self {
        BivariatePW {
            u_breaks: Vec::new(),
            phi_breaks: Vec::new(),
            cells: vec![BivQuad {
                c,
                ..BivQuad::zero()
            }],
        }
    }

    /// Lifts a piecewise quadratic in `u` (e.g. a 1-D partial cost).
    pub fn from_u_pwq(f: &PiecewiseQuadratic) -> Self {
        BivariatePW {
            u_breaks: f.breakpoints().to_vec(),
            phi_breaks: Vec::new(),
            cells: f.pieces().iter().map(BivQuad::from_u_quad).collect(),
        }
    }

    /// Lifts a piecewise quadratic in `φ` (e.g. a changepoint branch value).
    pub fn from_phi_pwq(f: &PiecewiseQuadratic) -> Self {
        BivariatePW {
            u_breaks: Vec::new(),
            phi_breaks: f.breakpoints().to_vec(),
            cells: f.pieces().iter().map(BivQuad::from_phi_quad).collect(),
        }
    }

    pub fn num_u_cells(&self) -> usize {
        self.u_breaks.len() + 1
    }

    pub fn num_phi_cells(&self) -> usize {
        self.phi_breaks.len() + 1
    }

    pub fn phi_breaks(&self) -> &[f64] {
        &self.phi_breaks
    }

    fn cell(&self, iu: usize, ip: usize) -> &BivQuad {
        &self.cells[iu * self.num_phi_cells() + ip]
    }

    fn u_cell_bounds(&self, iu: usize) -> (f64, f64) {
        let lo = if iu == 0 {
            f64::NEG_INFINITY
        } else {
            self.u_breaks[iu - 1]
        };
        let hi = if iu == self.u_breaks.len() {
            f64::INFINITY
        } else {
            self.u_breaks[iu]
        };
        (lo, hi)
    }

    fn phi_cell_bounds(&self, ip: usize) -> (f64, f64) {
        let lo = if ip == 0 {
            f64::NEG_INFINITY
        } else {
            self.phi_breaks[ip - 1]
        };
        let hi = if ip == self.phi_breaks.len() {
            f64::INFINITY
        } else {
            self.phi_breaks[ip]
        };
        (lo, hi)
    }

    pub fn eval(&self, u: f64, phi: f64) -> f64 {
        let iu = self.u_breaks.partition_point(|&b| b < u);
        let ip = self.phi_breaks.partition_point(|&b| b < phi);
        self.cell(iu, ip).eval(u, phi)
    }

    /// Adds `½ (y_t + offset_t + slope_t φ - u)²` to every cell.
    pub fn add_data_term(&self, y_plus_offset: f64, slope: f64) -> Self {
        let term = BivQuad::data_term(y_plus_offset, slope);
        BivariatePW {
            u_breaks: self.u_breaks.clone(),
            phi_breaks: self.phi_breaks.clone(),
            cells: self.cells.iter().map(|q| q.add(&term)).collect(),
        }
    }

    pub fn add_const(&self, c: f64) -> Self {
        let term = BivQuad {
            c,
            ..BivQuad::zero()
        };
        BivariatePW {
            u_breaks: self.u_breaks.clone(),
            phi_breaks: self.phi_breaks.clone(),
            cells: self.cells.iter().map(|q| q.add(&term)).collect(),
        }
    }

    /// Pointwise sum on the refined common grid.
    pub fn add(&self, other: &BivariatePW) -> Self {
        let u_breaks = merge_sorted(&self.u_breaks, &other.u_breaks);
        let phi_breaks = merge_sorted(&self.phi_breaks, &other.phi_breaks);
        let nu = u_breaks.len() + 1;
        let np = phi_breaks.len() + 1;
        let mut cells = Vec::with_capacity(nu * np);
        for iu in 0..nu {
            let u_rep = cell_rep(&u_breaks, iu);
            let su = self.u_breaks.partition_point(|&b| b <= u_rep);
            let ou = other.u_breaks.partition_point(|&b| b <= u_rep);
            for ip in 0..np {
                let p_rep = cell_rep(&phi_breaks, ip);
                let sp = self.phi_breaks.partition_point(|&b| b <= p_rep);
                let op = other.phi_breaks.partition_point(|&b| b <= p_rep);
                cells.push(self.cell(su, sp).add(other.cell(ou, op)));
            }
        }
        BivariatePW {
            u_breaks,
            phi_breaks,
            cells,
        }
    }

    /// Eliminates `u` by minimization, honoring u-cell bounds: within each
    /// φ-cell the minimizer either sits at the vertex `u*(φ)` (affine in φ)
    /// or clamps to a u-cell edge, and the winner across u-cells is taken
    /// pointwise. Errors if any contributing cell has `a_uu <= 0`.
    pub fn min_over_u(&self) -> Result<PiecewiseQuadratic> {
        let mut global_bps: Vec<f64> = Vec::new();
        let mut global_pieces: Vec<Quadratic1D> = Vec::new();
        for ip in 0..self.num_phi_cells() {
            let (p_lo, p_hi) = self.phi_cell_bounds(ip);
            let mut acc: Option<Vec<(f64, f64, Quadratic1D)>> = None;
            for iu in 0..self.num_u_cells() {
                let (u_lo, u_hi) = self.u_cell_bounds(iu);
                let local = clamped_u_min(self.cell(iu, ip), u_lo, u_hi, p_lo, p_hi)?;
                acc = Some(match acc {
                    None => local,
                    Some(prev) => window_min(p_lo, p_hi, &prev, &local),
                });
            }
            for (lo, _hi, q) in acc.expect("at least one u-cell") {
                if lo.is_finite() && !global_pieces.is_empty() {
                    global_bps.push(lo);
                } else if lo.is_finite() && global_pieces.is_empty() {
                    // first φ-cell starts at -inf by construction
                    global_bps.push(lo);
                }
                global_pieces.push(q);
            }
        }
        // first piece must start at -inf: drop a leading breakpoint if the
        // first φ-cell was bounded (cannot happen: cells cover the line)
        debug_assert_eq!(global_pieces.len(), global_bps.len() + 1);
        Ok(PiecewiseQuadratic::new(global_bps, global_pieces)?.coalesced())
    }

    /// Plain-text dump, one cell per line:
    /// `u_lo u_hi phi_lo phi_hi a_uu a_uphi a_phiphi b_u b_phi c`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for iu in 0..self.num_u_cells() {
            let (u_lo, u_hi) = self.u_cell_bounds(iu);
            for ip in 0..self.num_phi_cells() {
                let (p_lo, p_hi) = self.phi_cell_bounds(ip);
                let q = self.cell(iu, ip);
                out.push_str(&format!(
                    "{u_lo} {u_hi} {p_lo} {p_hi} {} {} {} {} {} {}\n",
                    q.a_uu, q.a_uphi, q.a_phiphi, q.b_u, q.b_phi, q.c
                ));
            }
        }
        out
    }

    /// True if `other` is everywhere ≤ `self` (so `self` never attains the
    /// pointwise minimum strictly). Conservative: only certifies domination
    /// when the difference is globally nonnegative over the whole plane.
    pub fn dominated_by(&self, other: &BivariatePW, tol: f64) -> bool {
        let u_breaks = merge_sorted(&self.u_breaks, &other.u_breaks);
        let phi_breaks = merge_sorted(&self.phi_breaks, &other.phi_breaks);
        for iu in 0..=u_breaks.len() {
            let u_rep = cell_rep(&u_breaks, iu);
            let su = self.u_breaks.partition_point(|&b| b <= u_rep);
            let ou = other.u_breaks.partition_point(|&b| b <= u_rep);
            for ip in 0..=phi_breaks.len() {
                let p_rep = cell_rep(&phi_breaks, ip);
                let sp = self.phi_breaks.partition_point(|&b| b <= p_rep);
                let op = other.phi_breaks.partition_point(|&b| b <= p_rep);
                // need d = self - other >= -tol on the whole plane
                let d = self.cell(su, sp).add(&other.cell(ou, op).neg());
                if !biv_globally_nonneg(&d, tol) {
                    return false;
                }
            }
        }
        true
    }
}

impl BivQuad {
    fn neg(&self) -> BivQuad {
        BivQuad {
            a_uu: -self.a_uu,
            a_uphi: -self.a_uphi,
            a_phiphi: -self.a_phiphi,
            b_u: -self.b_u,
            b_phi: -self.b_phi,
            c: -self.c,
        }
    }
}

/// Whether the bivariate quadratic is `>= -tol` on the whole plane.
fn biv_globally_nonneg(d: &BivQuad, tol: f64) -> bool {
    if d.a_uu > 0.0 {
        // eliminate u at its vertex, then check the φ-quadratic
        match d.min_over_u_unclamped() {
            Ok(q) => quad_globally_nonneg(&q, tol),
            Err(_) => false,
        }
    } else if d.a_uu.abs() <= 1e-14 && d.a_uphi.abs() <= 1e-14 && d.b_u.abs() <= 1e-14 {
        quad_globally_nonneg(&Quadratic1D::new(d.a_phiphi, d.b_phi, d.c), tol)
    } else {
        false
    }
}

fn quad_globally_nonneg(q: &Quadratic1D, tol: f64) -> bool {
    if q.a > 0.0 {
        q.c - q.b * q.b / (4.0 * q.a) >= -tol
    } else if q.a.abs() <= 1e-14 && q.b.abs() <= 1e-14 {
        q.c >= -tol
    } else {
        false
    }
}

/// Zero out a difference that is pure cancellation noise of its operands.
fn snap_diff(value: f64, x: f64, y: f64) -> f64 {
    if value.abs() <= 1e-11 * x.abs().max(y.abs()) {
        0.0
    } else {
        value
    }
}

fn merge_sorted(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b.iter()).cloned().collect();
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup();
    out
}

fn cell_rep(breaks: &[f64], i: usize) -> f64 {
    let lo = if i == 0 {
        f64::NEG_INFINITY
    } else {
        breaks[i - 1]
    };
    let hi = if i == breaks.len() {
        f64::INFINITY
    } else {
        breaks[i]
    };
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 0.0,
    }
}

/// `min_u q(u, φ)` over `u ∈ [u_lo, u_hi]` restricted to φ in
/// `[p_lo, p_hi]`, as a list of φ-pieces covering that window.
fn clamped_u_min(
    q: &BivQuad,
    u_lo: f64,
    u_hi: f64,
    p_lo: f64,
    p_hi: f64,
) -> Result<Vec<(f64, f64, Quadratic1D)>> {
    if q.a_uu <= 0.0 {
        return Err(Error::invariant(format!(
            "min over u requires positive u-curvature; got {}",
            q.a_uu
        )));
    }
    let (alpha, beta) = q.u_vertex();
    let vertex_quad = q.min_over_u_unclamped()?;
    // φ-regions where u*(φ) = alpha + beta φ falls below u_lo, inside, above u_hi
    let mut pieces: Vec<(f64, f64, Quadratic1D)> = Vec::new();
    let mut push = |lo: f64, hi: f64, quad: Quadratic1D| {
        if lo < hi || (lo == hi && lo.is_finite()) {
            pieces.push((lo, hi, quad));
        }
    };
    if beta == 0.0 {
        let quad = if alpha < u_lo {
            q.at_u(u_lo)
        } else if alpha > u_hi {
            q.at_u(u_hi)
        } else {
            vertex_quad
        };
        push(p_lo, p_hi, quad);
        return Ok(pieces);
    }
    // thresholds in φ where the vertex crosses the u-cell edges
    let t_lo = if u_lo == f64::NEG_INFINITY {
        None
    } else {
        Some((u_lo - alpha) / beta)
    };
    let t_hi = if u_hi == f64::INFINITY {
        None
    } else {
        Some((u_hi - alpha) / beta)
    };
    // order regions along φ
    struct Region {
        from: f64,
        to: f64,
        quad: Quadratic1D,
    }
    let mut regions: Vec<Region> = Vec::new();
    if beta > 0.0 {
        // u* increasing in φ: clamp at u_lo for small φ, u_hi for large φ
        let a = t_lo.unwrap_or(f64::NEG_INFINITY);
        let b = t_hi.unwrap_or(f64::INFINITY);
        if let Some(t) = t_lo {
            regions.push(Region {
                from: f64::NEG_INFINITY,
                to: t,
                quad: q.at_u(u_lo),
            });
        }
        regions.push(Region {
            from: a,
            to: b,
            quad: vertex_quad,
        });
        if let Some(t) = t_hi {
            regions.push(Region {
                from: t,
                to: f64::INFINITY,
                quad: q.at_u(u_hi),
            });
        }
    } else {
        // u* decreasing in φ: clamp at u_hi for small φ, u_lo for large φ
        let a = t_hi.unwrap_or(f64::NEG_INFINITY);
        let b = t_lo.unwrap_or(f64::INFINITY);
        if let Some(t) = t_hi {
            regions.push(Region {
                from: f64::NEG_INFINITY,
                to: t,
                quad: q.at_u(u_hi),
            });
        }
        regions.push(Region {
            from: a,
            to: b,
            quad: vertex_quad,
        });
        if let Some(t) = t_lo {
            regions.push(Region {
                from: t,
                to: f64::INFINITY,
                quad: q.at_u(u_lo),
            });
        }
    }
    for r in regions {
        let lo = r.from.max(p_lo);
        let hi = r.to.min(p_hi);
        if lo < hi {
            push(lo, hi, r.quad);
        }
    }
    if pieces.is_empty() {
        // the window collapsed into one region numerically
        pieces.push((p_lo, p_hi, vertex_quad));
    }
    Ok(pieces)
}

/// Pointwise min of two piece lists covering the same window `[lo, hi]`.
fn window_min(
    lo: f64,
    hi: f64,
    a: &[(f64, f64, Quadratic1D)],
    b: &[(f64, f64, Quadratic1D)],
) -> Vec<(f64, f64, Quadratic1D)> {
    let mut edges: Vec<f64> = Vec::new();
    edges.push(lo);
    for &(s, e, _) in a.iter().chain(b.iter()) {
        for v in [s, e] {
            if v > lo && v < hi {
                edges.push(v);
            }
        }
    }
    edges.push(hi);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    let find = |list: &[(f64, f64, Quadratic1D)], rep: f64| -> Quadratic1D {
        for &(s, e, q) in list {
            if rep >= s && rep <= e {
                return q;
            }
        }
        list.last().expect("nonempty piece list").2
    };
    let mut out: Vec<(f64, f64, Quadratic1D)> = Vec::new();
    for w in edges.windows(2) {
        let rep = match (w[0].is_finite(), w[1].is_finite()) {
            (true, true) => 0.5 * (w[0] + w[1]),
            (true, false) => w[0] + 1.0,
            (false, true) => w[1] - 1.0,
            (false, false) => 0.0,
        };
        let qa = find(a, rep);
        let qb = find(b, rep);
        for (s, e, src) in min_two_on_window(w[0], w[1], &qa, &qb) {
            let q = match src {
                MinSource::First => qa,
                MinSource::Second => qb,
            };
            match out.last_mut() {
                Some(last) if last.2 == q && last.1 == s => last.1 = e,
                _ => out.push((s, e, q)),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_term_expansion() {
        // ½(1 + φ - u)² -> (½, -1, ½, -1, 1, ½)
        let t = BivQuad::data_term(1.0, 1.0);
        assert_eq!(
            (t.a_uu, t.a_uphi, t.a_phiphi, t.b_u, t.b_phi, t.c),
            (0.5, -1.0, 0.5, -1.0, 1.0, 0.5)
        );
        // zero slope adds a u-only quadratic
        let t = BivQuad::data_term(2.0, 0.0);
        assert_eq!(t.a_uphi, 0.0);
        assert_eq!(t.a_phiphi, 0.0);
        assert_eq!(t.b_phi, 0.0);
        assert_eq!((t.a_uu, t.b_u, t.c), (0.5, -2.0, 2.0));
    }

    #[test]
    fn doubling_a_data_term() {
        let f = BivariatePW::constant(0.0).add_data_term(1.0, 1.0);
        let g = f.add_data_term(1.0, 1.0);
        let q = g.cell(0, 0);
        assert_eq!(
            (q.a_uu, q.a_uphi, q.a_phiphi, q.b_u, q.b_phi, q.c),
            (1.0, -2.0, 1.0, -2.0, 2.0, 1.0)
        );
    }

    #[test]
    fn min_over_u_of_perfect_square_is_zero() {
        let f = BivariatePW::constant(0.0).add_data_term(1.0, 1.0);
        let m = f.min_over_u().unwrap();
        for phi in [-3.0, 0.0, 1.7] {
            assert!(m.eval(phi).abs() < 1e-12);
        }
    }

    #[test]
    fn min_over_u_two_data_terms() {
        // ½(1-u)² + ½(1+φ-u)² -> φ²/4 at u* = 1 + φ/2
        let f = BivariatePW::constant(0.0)
            .add_data_term(1.0, 0.0)
            .add_data_term(1.0, 1.0);
        let m = f.min_over_u().unwrap();
        for phi in [-2.0, -0.3, 0.0, 1.0, 4.0] {
            assert!((m.eval(phi) - 0.25 * phi * phi).abs() < 1e-12, "phi={phi}");
        }
    }

    #[test]
    fn min_over_u_explicit_coefficients() {
        // u² - 2u - uφ + ½φ² + φ + 1 -> ¼φ² at u* = (2+φ)/2
        let q = BivQuad {
            a_uu: 1.0,
            a_uphi: -1.0,
            a_phiphi: 0.5,
            b_u: -2.0,
            b_phi: 1.0,
            c: 1.0,
        };
        let m = q.min_over_u_unclamped().unwrap();
        assert!((m.a - 0.25).abs() < 1e-14);
        assert!(m.b.abs() < 1e-14);
        assert!(m.c.abs() < 1e-14);
    }

    #[test]
    fn min_over_u_rejects_flat_curvature() {
        let f = BivariatePW::constant(1.0);
        assert!(matches!(
            f.min_over_u(),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn clamped_min_respects_u_cells() {
        // seed ½(0-u)² on u <= 0 and ½(0-u)² + 1 on u > 0, plus a data term
        // pulling toward u = 2: for φ on the right the clamp at u = 0 binds.
        let seed = PiecewiseQuadratic::new(
            vec![0.0],
            vec![
                Quadratic1D::new(0.5, 0.0, 0.0),
                Quadratic1D::new(0.5, 0.0, 1.0),
            ],
        )
        .unwrap();
        let f = BivariatePW::from_u_pwq(&seed).add_data_term(2.0, 1.0);
        let m = f.min_over_u().unwrap();
        // dense-grid oracle over u
        for i in 0..60 {
            let phi = -6.0 + 0.2 * i as f64;
            let mut best = f64::INFINITY;
            let mut u = -12.0;
            while u <= 12.0 {
                best = best.min(f.eval(u, phi));
                u += 1e-3;
            }
            assert!(
                (m.eval(phi) - best).abs() < 1e-5,
                "phi={phi}: analytic {} vs grid {best}",
                m.eval(phi)
            );
        }
    }

    #[test]
    fn add_refines_both_grids() {
        let a = BivariatePW::from_phi_pwq(
            &PiecewiseQuadratic::new(
                vec![0.0],
                vec![Quadratic1D::constant(1.0), Quadratic1D::constant(2.0)],
            )
            .unwrap(),
        );
        let b = BivariatePW::from_u_pwq(
            &PiecewiseQuadratic::new(
                vec![1.0],
                vec![Quadratic1D::new(1.0, 0.0, 0.0), Quadratic1D::new(1.0, 0.0, 5.0)],
            )
            .unwrap(),
        );
        let s = a.add(&b);
        assert_eq!(s.num_u_cells(), 2);
        assert_eq!(s.num_phi_cells(), 2);
        assert_eq!(s.eval(0.0, -1.0), 1.0);
        assert_eq!(s.eval(0.0, 1.0), 2.0);
        assert_eq!(s.eval(2.0, 1.0), 2.0 + 4.0 + 5.0);
    }

    #[test]
    fn min_over_u_grid_oracle_random() {
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        for _ in 0..20 {
            let mut f = BivariatePW::constant(next().abs());
            for _ in 0..4 {
                f = f.add_data_term(next(), next());
            }
            let m = f.min_over_u().unwrap();
            for i in 0..40 {
                let phi = -4.0 + 0.2 * i as f64;
                // coarse scan then refine near the best point
                let mut best = f64::INFINITY;
                let mut best_u = 0.0;
                let mut u = -30.0;
                while u <= 30.0 {
                    let v = f.eval(u, phi);
                    if v < best {
                        best = v;
                        best_u = u;
                    }
                    u += 1e-2;
                }
                let mut u = best_u - 2e-2;
                while u <= best_u + 2e-2 {
                    best = best.min(f.eval(u, phi));
                    u += 1e-5;
                }
                assert!(
                    (m.eval(phi) - best).abs() < 1e-6 * (1.0 + best.abs()),
                    "phi={phi}: analytic {} vs grid {best}",
                    m.eval(phi)
                );
            }
        }
    }

    #[test]
    fn domination_check_is_sound() {
        let f = BivariatePW::constant(1.0).add_data_term(0.0, 1.0);
        let g = f.add_const(0.5);
        assert!(g.dominated_by(&f, 1e-12));
        assert!(!f.dominated_by(&g, 1e-12));
        // crossing functions: neither dominates
        let h = BivariatePW::constant(0.0).add_data_term(3.0, -1.0);
        assert!(!f.dominated_by(&h, 1e-12));
        assert!(!h.dominated_by(&f, 1e-12));
    }
}
