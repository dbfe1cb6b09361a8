// SPDX-License-Identifier: MIT OR Apache-2.0

//! Analytic characterization of the conditioning set `S` in φ: the values of
//! the perturbation parameter for which a detector reproduces the relevant
//! part of the observed fit.

mod bs;
mod l0;

pub use bs::{
    bs_observed_interval, bs_phi_interval, bs_polyhedron, bs_s, bs_s_with_options, BsMode,
    BsOptions, SelectionPolyhedron,
};
pub use l0::{
    l0_c_const, l0_cost_sets, l0_restricted_cost, l0_s, l0_s_with_options, CostSet, Direction,
    L0Mode, L0Options,
};
