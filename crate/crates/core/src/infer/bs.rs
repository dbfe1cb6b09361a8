// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::detect::{binseg, binseg_values, CusumTriple, PrefixSums};
use crate::path::{perturbation_path, PerturbationPath};
use crate::{ChangepointFit, Contrast, ContrastKind, Error, IntervalUnion, Result, TimeSeries};

/// Conditioning flavor for binary segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsMode {
    /// Keep φ whenever the perturbed fit has the same changepoint locations.
    Full,
    /// Keep φ whenever the tested changepoint is still estimated.
    Fixed,
}

/// Tuning knobs for the regime walk.
#[derive(Debug, Clone, Copy)]
pub struct BsOptions {
    /// In `Fixed` mode, build member-regime intervals from only the steps up
    /// to the tested changepoint's entry, which yields wider intervals and a
    /// faster walk. Equality of the resulting set with the full-constraint
    /// walk is exercised by tests.
    pub step_shortcut: bool,
}

impl Default for BsOptions {
    fn default() -> Self {
        BsOptions {
            step_shortcut: true,
        }
    }
}

/// One linear inequality `γ⊤v <= 0` of the selection event, stored
/// symbolically through the CUSUM triples that define it:
/// `cand_coeff · g_cand⊤v - d · g_chosen⊤v <= 0`.
#[derive(Debug, Clone, Copy)]
struct PolyRow {
    cand: CusumTriple,
    cand_coeff: f64, // ±1 for dominance rows, 0 for the sign row
    chosen: CusumTriple,
    chosen_sign: i8,
}

impl PolyRow {
    fn value(&self, ps: &PrefixSums) -> f64 {
        let chosen_part = self.chosen_sign as f64 * ps.cusum(self.chosen);
        if self.cand_coeff == 0.0 {
            -chosen_part
        } else {
            self.cand_coeff * ps.cusum(self.cand) - chosen_part
        }
    }
}

/// The polyhedral selection event of a k-step binary segmentation run: the
/// set of data vectors on which the detector reproduces given locations,
/// entry orders, and signs.
#[derive(Debug, Clone)]
pub struct SelectionPolyhedron {
    rows: Vec<PolyRow>,
    t_len: usize,
}

impl SelectionPolyhedron {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Membership test `Γv <= tol` (componentwise).
    pub fn satisfied_by(&self, values: &[f64], tol: f64) -> bool {
        debug_assert_eq!(values.len(), self.t_len);
        let ps = PrefixSums::new(values);
        self.rows.iter().all(|r| r.value(&ps) <= tol)
    }

    /// Materializes row `i` as a dense functional γ with `γ⊤v <= 0`.
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        let r = &self.rows[i];
        let mut g = vec![0.0; self.t_len];
        add_cusum_weights(&mut g, r.chosen, -(r.chosen_sign as f64));
        if r.cand_coeff != 0.0 {
            add_cusum_weights(&mut g, r.cand, r.cand_coeff);
        }
        g
    }
}

fn add_cusum_weights(g: &mut [f64], t: CusumTriple, coeff: f64) {
    let n_left = (t.tau + 1 - t.s) as f64;
    let n_right = (t.e - t.tau) as f64;
    let w = (1.0 / (1.0 / n_right + 1.0 / n_left)).sqrt();
    for x in &mut g[t.s - 1..t.tau] {
        *x -= coeff * w / n_left;
    }
    for x in &mut g[t.tau..t.e] {
        *x += coeff * w / n_right;
    }
}

/// Builds the selection polyhedron from the first `steps` entries of a fit.
fn polyhedron_from_entries(
    entries: &[(usize, i8)],
    steps: usize,
    t_len: usize,
) -> SelectionPolyhedron {
    let mut rows = Vec::new();
    let mut segments: Vec<(usize, usize)> = vec![(1, t_len)];
    for &(tau_l, d_l) in entries.iter().take(steps) {
        let idx = segments
            .iter()
            .position(|&(s, e)| s <= tau_l && tau_l < e)
            .expect("entry splits an existing segment");
        let (s_l, e_l) = segments[idx];
        let chosen = CusumTriple::new(s_l, tau_l, e_l);
        rows.push(PolyRow {
            cand: chosen,
            cand_coeff: 0.0,
            chosen,
            chosen_sign: d_l,
        });
        for &(s, e) in &segments {
            for tau in s..e {
                if tau == tau_l {
                    continue;
                }
                let cand = CusumTriple::new(s, tau, e);
                for coeff in [1.0, -1.0] {
                    rows.push(PolyRow {
                        cand,
                        cand_coeff: coeff,
                        chosen,
                        chosen_sign: d_l,
                    });
                }
            }
        }
        segments.splice(idx..=idx, [(s_l, tau_l), (tau_l + 1, e_l)]);
    }
    SelectionPolyhedron { rows, t_len }
}

/// The polyhedron of the full `k`-step run that produced `fit`.
pub fn bs_polyhedron(fit: &ChangepointFit, k: usize, t_len: usize) -> Result<SelectionPolyhedron> {
    let entries = fit.entry_sequence()?;
    if entries.len() != k {
        return Err(Error::invalid(format!(
            "fit has {} steps but k={k} was requested",
            entries.len()
        )));
    }
    Ok(polyhedron_from_entries(&entries, k, t_len))
}

/// Substitutes the perturbation path into every row of the polyhedron and
/// intersects the resulting half-lines. Returns the (closed) interval of φ
/// where all rows hold, or `None` when the system is infeasible.
pub fn bs_phi_interval(
    path: &PerturbationPath,
    poly: &SelectionPolyhedron,
) -> Option<(f64, f64)> {
    let t_len = path.base().len();
    let mut shifted = path.base().values().to_vec();
    let mut slope = vec![0.0; t_len];
    let (lo_s, hi_s) = path.support();
    for t in lo_s..=hi_s {
        shifted[t - 1] += path.offset_at(t);
        slope[t - 1] = path.slope_at(t);
    }
    let ps0 = PrefixSums::new(&shifted);
    let ps1 = PrefixSums::new(&slope);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for row in &poly.rows {
        let c0 = row.value(&ps0);
        let c1 = row.value(&ps1);
        if c1.abs() <= 1e-11 * (1.0 + c0.abs()) {
            // φ-independent row: a feasibility check
            if c0 > 1e-9 * (1.0 + c0.abs()) {
                return None;
            }
        } else if c1 > 0.0 {
            hi = hi.min(-c0 / c1);
        } else {
            lo = lo.max(-c0 / c1);
        }
    }
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// The single observed-regime interval: values of φ for which the detector
/// reproduces the observed locations, orders, and signs. This is the
/// conditioning set of the step-and-sign approach.
pub fn bs_observed_interval(
    y: &TimeSeries,
    k: usize,
    nu: &Contrast,
) -> Result<IntervalUnion> {
    let fit = binseg(y, k)?;
    let poly = bs_polyhedron(&fit, k, y.len())?;
    let path = perturbation_path(y, nu)?;
    let (lo, hi) = bs_phi_interval(&path, &poly).ok_or_else(|| {
        Error::invariant("observed data violates its own selection polyhedron")
    })?;
    Ok(IntervalUnion::from_intervals(vec![(lo, hi)]))
}

/// The conditioning set for binary segmentation with default options.
pub fn bs_s(
    y: &TimeSeries,
    k: usize,
    j: usize,
    nu: &Contrast,
    mode: BsMode,
    trunc: Option<f64>,
) -> Result<IntervalUnion> {
    bs_s_with_options(y, k, j, nu, mode, trunc, BsOptions::default())
}

const ETA_HALVINGS: usize = 40;

/// The conditioning set `S` for binary segmentation: walks the φ-regimes
/// rightward then leftward from the observed interval, including each regime
/// iff the mode's condition holds for the refit on perturbed data. With
/// `trunc = Some(M)` the walk stops at ±M and full tails are appended,
/// which is conservative.
pub fn bs_s_with_options(
    y: &TimeSeries,
    k: usize,
    j: usize,
    nu: &Contrast,
    mode: BsMode,
    trunc: Option<f64>,
    options: BsOptions,
) -> Result<IntervalUnion> {
    if matches!(nu.kind(), ContrastKind::Raw { .. }) {
        return Err(Error::invalid(
            "raw contrasts are a test fixture and not valid for the detection pipeline",
        ));
    }
    let fit = binseg(y, k)?;
    if j < 1 || j > fit.num_changepoints() {
        return Err(Error::invalid(format!(
            "changepoint index j={j} out of range 1..={}",
            fit.num_changepoints()
        )));
    }
    let tau_j = fit.locations()[j - 1];
    if nu.at() != tau_j {
        return Err(Error::invalid(format!(
            "contrast is centered at {} but the tested changepoint is {tau_j}",
            nu.at()
        )));
    }
    let path = perturbation_path(y, nu)?;
    let phi_obs = path.nu_dot_y();
    if let Some(m) = trunc {
        if !(m >= phi_obs.abs()) {
            return Err(Error::invalid(format!(
                "truncation bound {m} must be at least |ν⊤y| = {}",
                phi_obs.abs()
            )));
        }
    }
    let walker = Walker {
        path: &path,
        k,
        mode,
        tau_j,
        baseline: fit.locations().to_vec(),
        shortcut: options.step_shortcut,
    };

    // observed regime: membership holds by construction
    let poly = walker.polyhedron_for(&fit, true)?;
    let (a0, a1) = bs_phi_interval(&path, &poly).ok_or_else(|| {
        Error::invariant("observed data violates its own selection polyhedron")
    })?;
    let mut members: Vec<(f64, f64)> = vec![(a0, a1)];
    let mut truncated = false;

    let eta0 = initial_eta(y, nu);
    // rightward then leftward
    for dir in [Direction::Right, Direction::Left] {
        let mut cur = match dir {
            Direction::Right => a1,
            Direction::Left => a0,
        };
        loop {
            match dir {
                Direction::Right => {
                    if cur == f64::INFINITY {
                        break;
                    }
                    if let Some(m) = trunc {
                        if cur >= m {
                            members.push((m, f64::INFINITY));
                            truncated = true;
                            break;
                        }
                    }
                }
                Direction::Left => {
                    if cur == f64::NEG_INFINITY {
                        break;
                    }
                    if let Some(m) = trunc {
                        if cur <= -m {
                            members.push((f64::NEG_INFINITY, -m));
                            truncated = true;
                            break;
                        }
                    }
                }
            }
            let (lo, hi, member) = walker.next_regime(cur, dir, eta0)?;
            if member {
                members.push((lo, hi));
            }
            cur = match dir {
                Direction::Right => hi,
                Direction::Left => lo,
            };
        }
    }
    let mut s = IntervalUnion::from_intervals(members);
    s.set_truncated(truncated);
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Right,
    Left,
}

fn initial_eta(y: &TimeSeries, nu: &Contrast) -> f64 {
    // scale-aware probe step; falls back to the observed statistic scale
    // when no noise level is attached
    let sigma = y.sigma().unwrap_or_else(|| {
        crate::pvalue::estimate_sigma(y)
            .map(|e| e.sigma)
            .unwrap_or(0.0)
    });
    1e-6 * (sigma * nu.norm()).max(1.0)
}

struct Walker<'a> {
    path: &'a PerturbationPath,
    k: usize,
    mode: BsMode,
    tau_j: usize,
    baseline: Vec<usize>,
    shortcut: bool,
}

impl Walker<'_> {
    fn membership(&self, refit: &ChangepointFit) -> bool {
        match self.mode {
            BsMode::Full => refit.locations() == &self.baseline[..],
            BsMode::Fixed => refit.locations().contains(&self.tau_j),
        }
    }

    /// The polyhedron whose φ-interval defines the regime of `refit`. In
    /// `Fixed` mode, member regimes may use only the steps up to the tested
    /// changepoint's entry.
    fn polyhedron_for(&self, refit: &ChangepointFit, member: bool) -> Result<SelectionPolyhedron> {
        let entries = refit.entry_sequence()?;
        let steps = if self.shortcut && self.mode == BsMode::Fixed && member {
            match refit.entry_rank_of(self.tau_j) {
                Some(rank) if rank < self.k => rank,
                _ => self.k,
            }
        } else {
            self.k
        };
        Ok(polyhedron_from_entries(
            &entries,
            steps,
            self.path.base().len(),
        ))
    }

    /// Finds the regime adjacent to the boundary `cur` in direction `dir`,
    /// halving the probe step until the regime's near endpoint aligns with
    /// the boundary.
    fn next_regime(&self, cur: f64, dir: Direction, eta0: f64) -> Result<(f64, f64, bool)> {
        let mut eta = eta0;
        for _ in 0..ETA_HALVINGS {
            let probe = match dir {
                Direction::Right => cur + eta,
                Direction::Left => cur - eta,
            };
            let values = self.path.evaluate(probe);
            let refit = binseg_values(&values, self.k)?;
            let member = self.membership(&refit);
            let poly = self.polyhedron_for(&refit, member)?;
            let Some((lo, hi)) = bs_phi_interval(self.path, &poly) else {
                eta *= 0.5;
                continue;
            };
            let tol = 1e-7 * cur.abs().max(1.0);
            match dir {
                Direction::Right => {
                    if lo > cur + tol || hi <= cur {
                        eta *= 0.5;
                        continue;
                    }
                    return Ok((cur, hi, member));
                }
                Direction::Left => {
                    if hi < cur - tol || lo >= cur {
                        eta *= 0.5;
                        continue;
                    }
                    return Ok((lo, cur, member));
                }
            }
        }
        Err(Error::DegenerateBoundary { boundary: cur })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spanning_contrast;

    const INF: f64 = f64::INFINITY;

    fn series(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    fn step_series() -> TimeSeries {
        series(&[0.0, 0.0, 1.0, 1.0])
    }

    #[test]
    fn row_count_for_one_step() {
        // one step on T=4: 2 dominated candidates x 2 rows + 1 sign row
        let y = step_series();
        let fit = binseg(&y, 1).unwrap();
        let poly = bs_polyhedron(&fit, 1, 4).unwrap();
        assert_eq!(poly.num_rows(), 5);
    }

    #[test]
    fn row_count_general_formula() {
        // k(2T - k - 2) rows including sign constraints
        let y = series(&[0.1, 1.2, -0.4, 2.0, 0.0, 3.0, 3.1, -0.9]);
        for k in 1..=3 {
            let fit = binseg(&y, k).unwrap();
            let poly = bs_polyhedron(&fit, k, 8).unwrap();
            assert_eq!(poly.num_rows(), k * (2 * 8 - k - 2), "k={k}");
        }
    }

    #[test]
    fn generating_data_satisfies_own_polyhedron() {
        let y = series(&[0.3, 1.4, 1.5, -0.2, 0.0, 2.2]);
        let fit = binseg(&y, 2).unwrap();
        let poly = bs_polyhedron(&fit, 2, 6).unwrap();
        assert!(poly.satisfied_by(y.values(), 1e-9));
    }

    #[test]
    fn membership_agrees_with_rerun_oracle() {
        let mut state = 11u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) * 2.0 - 1.0
        };
        let base: Vec<f64> = (0..20).map(|i| if i < 10 { 0.0 } else { 1.0 }).collect();
        let y: Vec<f64> = base.iter().map(|b| b + 0.3 * next()).collect();
        let k = 3;
        let fit = binseg_values(&y, k).unwrap();
        let poly = bs_polyhedron(&fit, k, 20).unwrap();
        for _ in 0..200 {
            let z: Vec<f64> = y.iter().map(|v| v + 0.4 * next()).collect();
            let refit = binseg_values(&z, k).unwrap();
            let same = refit.locations() == fit.locations()
                && refit.orders() == fit.orders()
                && refit.signs() == fit.signs();
            assert_eq!(
                poly.satisfied_by(&z, 1e-9),
                same,
                "membership mismatch on {z:?}"
            );
        }
    }

    #[test]
    fn dense_rows_match_symbolic_values() {
        let y = series(&[0.3, 1.4, 1.5, -0.2, 0.0, 2.2]);
        let fit = binseg(&y, 2).unwrap();
        let poly = bs_polyhedron(&fit, 2, 6).unwrap();
        let ps = PrefixSums::new(y.values());
        for i in 0..poly.num_rows() {
            let dense = poly.row_dense(i);
            let dot: f64 = dense.iter().zip(y.values()).map(|(a, b)| a * b).sum();
            let sym = poly.rows[i].value(&ps);
            assert!((dot - sym).abs() < 1e-12, "row {i}: {dot} vs {sym}");
        }
    }

    #[test]
    fn phi_interval_step_example() {
        // observed regime of the unit step: (-inf, 0]
        let y = step_series();
        let fit = binseg(&y, 1).unwrap();
        let nu = spanning_contrast(&fit, 1, &y).unwrap();
        let path = perturbation_path(&y, &nu).unwrap();
        let poly = bs_polyhedron(&fit, 1, 4).unwrap();
        let (lo, hi) = bs_phi_interval(&path, &poly).unwrap();
        assert_eq!(lo, -INF);
        assert!(hi.abs() < 1e-9, "hi = {hi}");
    }

    #[test]
    fn phi_interval_contains_observed_statistic() {
        let y = series(&[0.4, -0.1, 2.0, 2.2, 1.9, 0.0, 0.3, 0.1]);
        for k in 1..=3 {
            let fit = binseg(&y, k).unwrap();
            for j in 1..=fit.num_changepoints() {
                let nu = spanning_contrast(&fit, j, &y).unwrap();
                let path = perturbation_path(&y, &nu).unwrap();
                let poly = bs_polyhedron(&fit, k, 8).unwrap();
                let (lo, hi) = bs_phi_interval(&path, &poly).unwrap();
                let phi = nu.dot();
                assert!(lo <= phi && phi <= hi, "k={k} j={j}: {phi} not in [{lo},{hi}]");
            }
        }
    }

    #[test]
    fn phi_interval_flipped_sign_regime_mirrors() {
        // regime with d = -1 on the same data: [0, inf)
        let y = step_series();
        let (means, obj) = crate::fit::segment_means_and_cost(y.values(), &[2]);
        let flipped = ChangepointFit::new(vec![2], vec![1], vec![-1], means, obj);
        let nu = spanning_contrast(&flipped, 1, &y).unwrap();
        let path = perturbation_path(&y, &nu).unwrap();
        let poly = bs_polyhedron(&flipped, 1, 4).unwrap();
        let (lo, hi) = bs_phi_interval(&path, &poly).unwrap();
        assert!(lo.abs() < 1e-9);
        assert_eq!(hi, INF);
    }

    #[test]
    fn full_mode_step_series_gives_whole_line() {
        // both sign regimes keep the location set {2}: S merges to the line
        let y = step_series();
        let fit = binseg(&y, 1).unwrap();
        let nu = spanning_contrast(&fit, 1, &y).unwrap();
        let s = bs_s(&y, 1, 1, &nu, BsMode::Full, None).unwrap();
        assert_eq!(s.intervals(), &[(-INF, INF)]);
        assert!(!s.truncated());
    }

    #[test]
    fn truncation_appends_tails_and_is_conservative() {
        let y = series(&[0.1, -0.2, 5.0, 5.2, 0.3, -0.1, 4.8, 5.1, 0.0, 0.2])
            .with_sigma(1.0)
            .unwrap();
        let k = 3;
        let fit = binseg(&y, k).unwrap();
        let nu = spanning_contrast(&fit, 1, &y).unwrap();
        let c = nu.dot().abs();
        let full = bs_s(&y, k, 1, &nu, BsMode::Full, None).unwrap();
        assert!(!full.truncated());
        // outermost finite member endpoint beyond the observed statistic
        let outer = full
            .intervals()
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter(|e| e.is_finite() && e.abs() > c)
            .fold(0.0f64, |m, e| m.max(e.abs()));
        assert!(outer > c, "fixture needs a regime boundary beyond |ν⊤y|");
        let m = 0.5 * (c + outer);
        let trunc = bs_s(&y, k, 1, &nu, BsMode::Full, Some(m)).unwrap();
        assert!(trunc.truncated());
        // early stopping only enlarges the set beyond ±m
        let scale = nu.norm();
        let p_full = crate::pvalue::selective_p(&full, c, scale).unwrap().p;
        let p_trunc = crate::pvalue::selective_p(&trunc, c, scale).unwrap().p;
        assert!(
            p_trunc >= p_full - 1e-12,
            "truncated p {p_trunc} < untruncated {p_full}"
        );
        // when the walk finishes inside ±M nothing is appended
        let huge = bs_s(&y, k, 1, &nu, BsMode::Full, Some(outer * 50.0)).unwrap();
        assert!(!huge.truncated());
        assert_eq!(huge.intervals(), full.intervals());
    }

    #[test]
    fn grid_oracle_small_instances() {
        let mut state = 5u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) * 2.0 - 1.0
        };
        for inst in 0..6 {
            let t_len = 12 + 2 * inst;
            let v: Vec<f64> = (0..t_len)
                .map(|i| if i < t_len / 2 { 0.0 } else { 1.2 } + 0.5 * next())
                .collect();
            let y = series(&v).with_sigma(0.5).unwrap();
            let k = 2;
            let fit = binseg(&y, k).unwrap();
            let j = 1 + (inst % 2).min(fit.num_changepoints() - 1);
            let nu = spanning_contrast(&fit, j, &y).unwrap();
            let tau_j = fit.locations()[j - 1];
            for mode in [BsMode::Full, BsMode::Fixed] {
                let s = bs_s(&y, k, j, &nu, mode, None).unwrap();
                let path = perturbation_path(&y, &nu).unwrap();
                let half = 10.0 * 0.5 * nu.norm();
                for g in 0..300 {
                    let phi = -half + 2.0 * half * (g as f64) / 299.0;
                    // skip φ within tolerance of any endpoint
                    if s.intervals().iter().any(|&(a, b)| {
                        (phi - a).abs() < 1e-6 || (phi - b).abs() < 1e-6
                    }) {
                        continue;
                    }
                    let refit = binseg_values(&path.evaluate(phi), k).unwrap();
                    let want = match mode {
                        BsMode::Full => refit.locations() == fit.locations(),
                        BsMode::Fixed => refit.locations().contains(&tau_j),
                    };
                    assert_eq!(
                        s.contains(phi),
                        want,
                        "inst={inst} mode={mode:?} phi={phi}"
                    );
                }
            }
        }
    }

    #[test]
    fn fixed_mode_shortcut_matches_full_constraints() {
        let mut state = 17u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) * 2.0 - 1.0
        };
        for inst in 0..8 {
            let t_len = 24;
            let v: Vec<f64> = (0..t_len)
                .map(|i| {
                    let mean = match i {
                        0..=7 => 0.0,
                        8..=15 => 1.5,
                        _ => -0.5,
                    };
                    mean + 0.4 * next()
                })
                .collect();
            let y = series(&v).with_sigma(0.4).unwrap();
            let k = 3;
            let fit = binseg(&y, k).unwrap();
            let j = 1 + inst % fit.num_changepoints();
            let tau_j = fit.locations()[j - 1];
            let h = tau_j.min(t_len - tau_j).min(4);
            if h == 0 {
                continue;
            }
            let nu = crate::window_contrast(tau_j, h, &y).unwrap();
            let with = bs_s_with_options(
                &y,
                k,
                j,
                &nu,
                BsMode::Fixed,
                None,
                BsOptions {
                    step_shortcut: true,
                },
            )
            .unwrap();
            let without = bs_s_with_options(
                &y,
                k,
                j,
                &nu,
                BsMode::Fixed,
                None,
                BsOptions {
                    step_shortcut: false,
                },
            )
            .unwrap();
            assert_eq!(
                with.intervals().len(),
                without.intervals().len(),
                "inst={inst}"
            );
            for (a, b) in with.intervals().iter().zip(without.intervals()) {
                assert!(
                    (a.0 - b.0).abs() < 1e-6 || (a.0.is_infinite() && b.0.is_infinite()),
                    "inst={inst}: {a:?} vs {b:?}"
                );
                assert!(
                    (a.1 - b.1).abs() < 1e-6 || (a.1.is_infinite() && b.1.is_infinite()),
                    "inst={inst}: {a:?} vs {b:?}"
                );
            }
        }
    }

    #[test]
    fn observed_interval_is_single_and_contains_statistic() {
        let y = series(&[0.2, 0.1, 1.4, 1.6, 0.0, -0.1]).with_sigma(0.3).unwrap();
        let fit = binseg(&y, 2).unwrap();
        let nu = spanning_contrast(&fit, 1, &y).unwrap();
        let s = bs_observed_interval(&y, 2, &nu).unwrap();
        assert_eq!(s.intervals().len(), 1);
        assert!(s.contains(nu.dot()));
    }

    #[test]
    fn rejects_mismatched_contrast() {
        let y = series(&[0.0, 0.0, 1.0, 1.0, 3.0, 3.0]).with_sigma(1.0).unwrap();
        let fit = binseg(&y, 2).unwrap();
        let nu = spanning_contrast(&fit, 1, &y).unwrap();
        // j = 2 but contrast centered on location 1
        assert!(bs_s(&y, 2, 2, &nu, BsMode::Full, None).is_err());
        // raw contrast refused
        let raw = Contrast::raw(vec![(2, 1.0), (3, -1.0)], &y).unwrap();
        assert!(bs_s(&y, 2, 1, &raw, BsMode::Full, None).is_err());
    }

    #[test]
    fn truncation_requires_m_at_least_observed() {
        let y = step_series().with_sigma(1.0).unwrap();
        let fit = binseg(&y, 1).unwrap();
        let nu = spanning_contrast(&fit, 1, &y).unwrap();
        // |nu' y| = 1; M below that is invalid
        assert!(bs_s(&y, 1, 1, &nu, BsMode::Full, Some(0.5)).is_err());
        assert!(bs_s(&y, 1, 1, &nu, BsMode::Full, Some(1.0)).is_ok());
    }
}
