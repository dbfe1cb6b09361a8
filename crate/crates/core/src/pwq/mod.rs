// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact algebra on piecewise quadratic functions: univariate functions of
//! one real variable, and bivariate quadratics of `(u, φ)` laid out on a
//! grid of cells. These are the computational substrate of the ℓ0 cost
//! recursions and the conditioning-set characterizations.

mod biv;
mod uni;

pub use biv::{BivQuad, BivariatePW};
pub(crate) use uni::interior_point;
pub use uni::{
    pw_min, pw_min_value, pw_min_value_with_piece, pw_min_with_source, pw_sublevel,
    pw_sublevel_with_tol, MinSource, PiecewiseQuadratic, Quadratic1D,
};
