// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::detect::{l0_cost_forward, l0_cost_reverse, l0_segment};
use crate::fit::segment_means_and_cost;
use crate::path::{perturbation_path, PerturbationPath};
use crate::pwq::{pw_min, pw_sublevel_with_tol, BivariatePW, PiecewiseQuadratic};
#[cfg(test)]
use crate::pwq::pw_min_value;
use crate::{Contrast, ContrastKind, Error, IntervalUnion, Result, TimeSeries};

/// Conditioning flavor for ℓ0 segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L0Mode {
    /// Keep φ whenever the perturbed optimum has exactly the observed
    /// changepoint locations.
    Full,
    /// Keep φ whenever the tested changepoint is still estimated.
    Window,
}

/// Tuning knobs for assembling the no-changepoint alternative cost.
#[derive(Debug, Clone, Copy)]
pub struct L0Options {
    /// Drop cost-set elements that are pointwise dominated before pairing
    /// the forward and reverse sets, and skip pairs whose lower bound cannot
    /// beat the running envelope. Both reductions are exact; the flag exists
    /// so oracle tests can double-check against the unreduced computation.
    pub envelope_reduction: bool,
}

impl Default for L0Options {
    fn default() -> Self {
        L0Options {
            envelope_reduction: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

/// The set of candidate partial-cost functions of `(u, φ)` reaching one
/// timepoint: one function per admissible last-changepoint configuration,
/// with the partial cost equal to their pointwise minimum.
#[derive(Debug, Clone)]
pub struct CostSet {
    functions: Vec<BivariatePW>,
    direction: Direction,
    anchor: usize,
}

impl CostSet {
    pub fn functions(&self) -> &[BivariatePW] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// The timepoint the recursion reached.
    pub fn anchor(&self) -> usize {
        self.anchor
    }

    /// `min_f min_u f(u, φ)` as a piecewise quadratic in φ.
    pub fn min_over_all(&self) -> Result<PiecewiseQuadratic> {
        let mut acc: Option<PiecewiseQuadratic> = None;
        for f in &self.functions {
            let m = f.min_over_u()?;
            acc = Some(match acc {
                None => m,
                Some(prev) => pw_min(&prev, &m),
            });
        }
        acc.ok_or_else(|| Error::invariant("cost set is empty"))
    }

    /// Pointwise evaluation of the partial cost at `(u, φ)`.
    pub fn eval_min_at(&self, u: f64, phi: f64) -> f64 {
        self.functions
            .iter()
            .map(|f| f.eval(u, phi))
            .fold(f64::INFINITY, f64::min)
    }

    /// Plain-text dump: one function per block, blocks separated by a blank
    /// line, each line `u_lo u_hi phi_lo phi_hi a_uu a_uphi a_phiphi b_u
    /// b_phi c`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, f) in self.functions.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&f.dump());
        }
        out
    }
}

/// Runs the cost-set recursion over the perturbed stretch of the data.
///
/// `from` is the first processed timepoint and `to` the last (inclusive);
/// forward recursions have `from <= to`, reverse ones `from >= to`. `seed`
/// is the 1-D partial cost of the unperturbed stretch beyond `from` (before
/// it for forward, after it for reverse); it must be present exactly when
/// that stretch is nonempty. Each processed timepoint grows the set by one
/// function: continuing candidates absorb the new squared-error term, and a
/// fresh candidate opens a segment at the cheapest prior cost plus the
/// penalty.
pub fn l0_cost_sets(
    path: &PerturbationPath,
    lambda: f64,
    from: usize,
    to: usize,
    direction: Direction,
    seed: Option<&PiecewiseQuadratic>,
) -> Result<CostSet> {
    let t_len = path.base().len();
    let timepoints: Vec<usize> = match direction {
        Direction::Forward => {
            if from > to || from < 1 || to > t_len {
                return Err(Error::invalid(format!(
                    "forward recursion needs 1 <= from <= to <= T; got {from}..{to}"
                )));
            }
            if (from > 1) != seed.is_some() {
                return Err(Error::invalid(
                    "forward seed must be present exactly when the prefix is nonempty",
                ));
            }
            (from..=to).collect()
        }
        Direction::Reverse => {
            if from < to || to < 1 || from > t_len {
                return Err(Error::invalid(format!(
                    "reverse recursion needs T >= from >= to >= 1; got {from}..{to}"
                )));
            }
            if (from < t_len) != seed.is_some() {
                return Err(Error::invalid(
                    "reverse seed must be present exactly when the suffix is nonempty",
                ));
            }
            (to..=from).rev().collect()
        }
    };
    let mut functions: Vec<BivariatePW> = Vec::with_capacity(timepoints.len() + 1);
    if let Some(s) = seed {
        functions.push(BivariatePW::from_u_pwq(s));
    }
    for &t in &timepoints {
        let c_t = path.base().values()[t - 1] + path.offset_at(t);
        let s_t = path.slope_at(t);
        if functions.is_empty() {
            functions.push(BivariatePW::constant(0.0).add_data_term(c_t, s_t));
            continue;
        }
        let mut branch: Option<PiecewiseQuadratic> = None;
        for f in &functions {
            let m = f.min_over_u()?;
            branch = Some(match branch {
                None => m,
                Some(prev) => pw_min(&prev, &m),
            });
        }
        let branch = branch.expect("nonempty set").add_const(lambda);
        functions.push(BivariatePW::from_phi_pwq(&branch));
        for f in &mut functions {
            *f = f.add_data_term(c_t, s_t);
        }
    }
    let anchor = *timepoints.last().expect("nonempty range");
    Ok(CostSet {
        functions,
        direction,
        anchor,
    })
}

/// Cost of segmenting `values` with changepoints fixed at `locations`:
/// half the residual sum of squares around per-segment means plus `λ` per
/// changepoint.
pub fn l0_restricted_cost(values: &[f64], locations: &[usize], lambda: f64) -> f64 {
    let (_, half_sse) = segment_means_and_cost(values, locations);
    half_sse + lambda * locations.len() as f64
}

/// The restricted cost of the fit, which is constant along the perturbation
/// path and equals the fit objective.
pub fn l0_c_const(y: &TimeSeries, fit: &crate::ChangepointFit, lambda: f64) -> f64 {
    l0_restricted_cost(y.values(), fit.locations(), lambda)
}

/// The conditioning set for ℓ0 segmentation with default options.
pub fn l0_s(
    y: &TimeSeries,
    lambda: f64,
    j: usize,
    nu: &Contrast,
    mode: L0Mode,
) -> Result<IntervalUnion> {
    l0_s_with_options(y, lambda, j, nu, mode, L0Options::default())
}

const SUBLEVEL_REL_TOL: f64 = 1e-11;

/// The conditioning set `S` for ℓ0 segmentation.
///
/// Builds the forward cost set up to the tested changepoint and the reverse
/// cost set down to the following timepoint, forms the optimal costs with
/// and without a changepoint there, and compares against the relevant
/// baseline: in `Full` mode the (φ-constant) restricted cost of the observed
/// fit, in `Window` mode the with-changepoint cost itself.
pub fn l0_s_with_options(
    y: &TimeSeries,
    lambda: f64,
    j: usize,
    nu: &Contrast,
    mode: L0Mode,
    options: L0Options,
) -> Result<IntervalUnion> {
    let fit = l0_segment(y, lambda)?;
    if j < 1 || j > fit.num_changepoints() {
        return Err(Error::invalid(format!(
            "changepoint index j={j} out of range 1..={}",
            fit.num_changepoints()
        )));
    }
    let t_len = y.len();
    let locs = fit.locations();
    let tau_j = locs[j - 1];
    // recursion bounds: the perturbed stretch on each side of tau_j
    let (fwd_start, rev_start) = match (mode, nu.kind()) {
        (L0Mode::Full, ContrastKind::Spanning { prev, at, next }) => {
            let want_prev = if j >= 2 { locs[j - 2] } else { 0 };
            let want_next = if j < locs.len() { locs[j] } else { t_len };
            if *at != tau_j || *prev != want_prev || *next != want_next {
                return Err(Error::invalid(format!(
                    "spanning contrast ({prev}, {at}, {next}] does not match the fit \
                     neighborhood ({want_prev}, {tau_j}, {want_next}]"
                )));
            }
            (*prev + 1, *next)
        }
        (L0Mode::Window, ContrastKind::Window { at, h }) => {
            if *at != tau_j {
                return Err(Error::invalid(format!(
                    "window contrast is centered at {at} but the tested changepoint is {tau_j}"
                )));
            }
            (*at - *h + 1, *at + *h)
        }
        (L0Mode::Window, ContrastKind::Raw { .. }) => {
            // fixture support: perturbed range straddles the changepoint
            let (lo, hi) = nu.support();
            if nu.at() != tau_j {
                return Err(Error::invalid(format!(
                    "raw contrast splits at {} but the tested changepoint is {tau_j}",
                    nu.at()
                )));
            }
            (lo, hi)
        }
        _ => {
            return Err(Error::invalid(
                "contrast kind does not match the conditioning mode",
            ));
        }
    };
    let path = perturbation_path(y, nu)?;
    let values = y.values();
    let fwd_seed = l0_cost_forward(values, lambda, fwd_start - 1);
    let rev_seed = l0_cost_reverse(values, lambda, rev_start + 1);
    let fwd = l0_cost_sets(
        &path,
        lambda,
        fwd_start,
        tau_j,
        Direction::Forward,
        fwd_seed.as_ref(),
    )?;
    let rev = l0_cost_sets(
        &path,
        lambda,
        rev_start,
        tau_j + 1,
        Direction::Reverse,
        rev_seed.as_ref(),
    )?;
    let cost_with = fwd
        .min_over_all()?
        .add(&rev.min_over_all()?)
        .add_const(lambda);
    let cost_without = paired_min(&fwd, &rev, options)?;
    match mode {
        L0Mode::Window => Ok(pw_sublevel_with_tol(
            &cost_with,
            &cost_without,
            SUBLEVEL_REL_TOL,
        )),
        L0Mode::Full => {
            let c_const = l0_restricted_cost(values, locs, lambda);
            let optimal = pw_min(&cost_with, &cost_without);
            Ok(pw_sublevel_with_tol(
                &PiecewiseQuadratic::constant(c_const),
                &optimal,
                SUBLEVEL_REL_TOL,
            ))
        }
    }
}

/// `min_u` of the summed forward and reverse costs, minimized over all
/// pairs: the optimal cost of segmentations whose mean is continuous across
/// the tested boundary.
fn paired_min(fwd: &CostSet, rev: &CostSet, options: L0Options) -> Result<PiecewiseQuadratic> {
    let fwd_fns = if options.envelope_reduction {
        prune_dominated(fwd.functions())
    } else {
        fwd.functions().iter().collect()
    };
    let rev_fns = if options.envelope_reduction {
        prune_dominated(rev.functions())
    } else {
        rev.functions().iter().collect()
    };
    // univariate lower bounds for pair skipping
    let fwd_mu: Vec<PiecewiseQuadratic> = fwd_fns
        .iter()
        .map(|f| f.min_over_u())
        .collect::<Result<_>>()?;
    let rev_mu: Vec<PiecewiseQuadratic> = rev_fns
        .iter()
        .map(|f| f.min_over_u())
        .collect::<Result<_>>()?;
    let mut acc: Option<PiecewiseQuadratic> = None;
    for (i, f) in fwd_fns.iter().enumerate() {
        for (m, g) in rev_fns.iter().enumerate() {
            if options.envelope_reduction {
                if let Some(env) = &acc {
                    // min_u(f+g) >= min_u f + min_u g: skip pairs that cannot
                    // improve the envelope anywhere
                    let lb = fwd_mu[i].add(&rev_mu[m]);
                    if pw_sublevel_with_tol(&lb, env, 0.0).is_empty() {
                        continue;
                    }
                }
            }
            let mu = f.add(g).min_over_u()?;
            acc = Some(match acc {
                None => mu,
                Some(prev) => pw_min(&prev, &mu),
            });
        }
    }
    acc.ok_or_else(|| Error::invariant("no candidate pairs"))
}

/// Keeps only functions not pointwise dominated by an already-kept one.
fn prune_dominated(fns: &[BivariatePW]) -> Vec<&BivariatePW> {
    let mut kept: Vec<&BivariatePW> = Vec::with_capacity(fns.len());
    for f in fns {
        if !kept.iter().any(|k| f.dominated_by(k, 0.0)) {
            kept.push(f);
        }
    }
    kept
}
