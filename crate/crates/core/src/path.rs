// SPDX-License-Identifier: MIT OR Apache-2.0

use crate::{Contrast, ContrastKind, Error, Result, TimeSeries};

/// The affine family `y'(φ)` of datasets sharing the projection of `y`
/// orthogonal to a contrast `ν`, parametrized so that `ν⊤y'(φ) = φ`:
///
/// `y'_t(φ) = y_t + offset_t + slope_t · φ`, with `slope = ν/‖ν‖²` and
/// `offset = -ν ν⊤y/‖ν‖²`. Both vanish outside the contrast support.
///
/// For a `Raw` fixture contrast the weights are used directly as the slope
/// with zero offset, reproducing the simplified unit-weight perturbation; in
/// that case the identity point is `φ = 0` rather than `φ = ν⊤y`.
#[derive(Debug, Clone)]
pub struct PerturbationPath {
    base: TimeSeries,
    support_start: usize, // 1-based, inclusive
    slope: Vec<f64>,      // aligned with support
    offset: Vec<f64>,
    nu_dot_y: f64,
    raw_fixture: bool,
}

impl PerturbationPath {
    pub fn base(&self) -> &TimeSeries {
        &self.base
    }

    /// `ν⊤y` for the generating contrast.
    pub fn nu_dot_y(&self) -> f64 {
        self.nu_dot_y
    }

    /// The φ at which the path reproduces the observed data.
    pub fn identity_phi(&self) -> f64 {
        if self.raw_fixture {
            0.0
        } else {
            self.nu_dot_y
        }
    }

    /// 1-based inclusive range of perturbed timepoints.
    pub fn support(&self) -> (usize, usize) {
        (
            self.support_start,
            self.support_start + self.slope.len() - 1,
        )
    }

    pub fn slope_at(&self, t: usize) -> f64 {
        let (lo, hi) = self.support();
        if t >= lo && t <= hi {
            self.slope[t - lo]
        } else {
            0.0
        }
    }

    pub fn offset_at(&self, t: usize) -> f64 {
        let (lo, hi) = self.support();
        if t >= lo && t <= hi {
            self.offset[t - lo]
        } else {
            0.0
        }
    }

    pub fn value_at(&self, t: usize, phi: f64) -> f64 {
        self.base.values()[t - 1] + self.offset_at(t) + self.slope_at(t) * phi
    }

    /// Materializes `y'(φ)`.
    pub fn evaluate(&self, phi: f64) -> Vec<f64> {
        let mut v = self.base.values().to_vec();
        let (lo, _) = self.support();
        for (i, (s, o)) in self.slope.iter().zip(&self.offset).enumerate() {
            v[lo - 1 + i] += o + s * phi;
        }
        v
    }

    /// `y'(φ)` as a series carrying over the base noise scale.
    pub fn evaluate_series(&self, phi: f64) -> TimeSeries {
        let mut s = TimeSeries::new(self.evaluate(phi)).expect("perturbed series stays valid");
        if let Some(sigma) = self.base.sigma() {
            s = s.with_sigma(sigma).expect("sigma already validated");
        }
        s
    }
}

/// Builds the perturbation path of `y` along a contrast.
pub fn perturbation_path(y: &TimeSeries, nu: &Contrast) -> Result<PerturbationPath> {
    if nu.len() != y.len() {
        return Err(Error::invalid(format!(
            "contrast length {} does not match series length {}",
            nu.len(),
            y.len()
        )));
    }
    if !(nu.norm_sq() > 0.0) {
        return Err(Error::invalid("contrast must have positive norm"));
    }
    let (lo, hi) = nu.support();
    let raw_fixture = matches!(nu.kind(), ContrastKind::Raw { .. });
    let nu_dot_y = nu.dot_with(y.values());
    let mut slope = Vec::with_capacity(hi - lo + 1);
    let mut offset = Vec::with_capacity(hi - lo + 1);
    for t in lo..=hi {
        let w = nu.weight(t);
        if raw_fixture {
            slope.push(w);
            offset.push(0.0);
        } else {
            slope.push(w / nu.norm_sq());
            offset.push(-w * nu_dot_y / nu.norm_sq());
        }
    }
    Ok(PerturbationPath {
        base: y.clone(),
        support_start: lo,
        slope,
        offset,
        nu_dot_y,
        raw_fixture,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{spanning_contrast, window_contrast, ChangepointFit};

    fn series(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn spanning_path_matches_hand_computation() {
        let y = series(&[0.0, 0.0, 1.0, 1.0]);
        let fit = ChangepointFit::for_locations(vec![2], &y).unwrap();
        let nu = spanning_contrast(&fit, 1, &y).unwrap();
        let path = perturbation_path(&y, &nu).unwrap();
        for phi in [-2.0, -1.0, 0.0, 0.7, 3.0] {
            let v = path.evaluate(phi);
            let expect = [
                0.5 * (1.0 + phi),
                0.5 * (1.0 + phi),
                1.0 - 0.5 * (1.0 + phi),
                1.0 - 0.5 * (1.0 + phi),
            ];
            for (a, b) in v.iter().zip(expect.iter()) {
                assert!((a - b).abs() < 1e-12, "phi={phi}: {v:?}");
            }
        }
        // identity at phi = nu' y = -1
        assert_eq!(path.evaluate(-1.0), y.values());
    }

    #[test]
    fn identity_at_observed_statistic() {
        let y = series(&[0.4, -1.0, 2.0, 0.3, 0.9, -0.2, 1.4, 2.2]);
        let fit = ChangepointFit::for_locations(vec![3, 6], &y).unwrap();
        for j in 1..=2 {
            let nu = spanning_contrast(&fit, j, &y).unwrap();
            let path = perturbation_path(&y, &nu).unwrap();
            let v = path.evaluate(path.identity_phi());
            for (a, b) in v.iter().zip(y.values()) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
        let nu = window_contrast(4, 3, &y).unwrap();
        let path = perturbation_path(&y, &nu).unwrap();
        let v = path.evaluate(nu.dot());
        for (a, b) in v.iter().zip(y.values()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn path_parametrizes_the_statistic() {
        // nu' y'(phi) = phi for the standard path
        let y = series(&[1.3, 0.2, -0.5, 2.0, 1.1, 0.0]);
        let nu = window_contrast(3, 2, &y).unwrap();
        let path = perturbation_path(&y, &nu).unwrap();
        for phi in [-4.0, -0.3, 0.0, 0.9, 5.5] {
            let v = path.evaluate(phi);
            let stat = nu.dot_with(&v);
            assert!((stat - phi).abs() < 1e-10 * (1.0 + phi.abs()));
        }
    }

    #[test]
    fn raw_fixture_uses_unit_slopes() {
        let y = series(&[1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        let nu = Contrast::raw(vec![(2, 1.0), (3, 1.0), (4, -1.0), (5, -1.0)], &y).unwrap();
        let path = perturbation_path(&y, &nu).unwrap();
        let v = path.evaluate(0.25);
        assert_eq!(v, vec![1.0, 1.25, 1.25, 1.75, 1.75, 2.0]);
        assert_eq!(path.evaluate(0.0), y.values());
        assert_eq!(path.identity_phi(), 0.0);
    }

    #[test]
    fn support_is_contained_in_contrast_window() {
        let y = series(&[0.0; 10]);
        let fit = ChangepointFit::for_locations(vec![3, 7], &y).unwrap();
        let nu = spanning_contrast(&fit, 2, &y).unwrap();
        let path = perturbation_path(&y, &nu).unwrap();
        assert_eq!(path.support(), (4, 10));
        assert_eq!(path.slope_at(3), 0.0);
        assert_eq!(path.offset_at(1), 0.0);
        let nu = window_contrast(5, 2, &y).unwrap();
        let path = perturbation_path(&y, &nu).unwrap();
        assert_eq!(path.support(), (4, 7));
    }
}
