// SPDX-License-Identifier: MIT OR Apache-2.0

//! Changepoint detectors: k-step binary segmentation and exact ℓ0
//! segmentation via functional pruning.

mod bs;
mod l0;

pub use bs::{binseg, binseg_values, cusum, CusumTriple, PrefixSums};
pub use l0::{
    l0_cost_forward, l0_cost_reverse, l0_lambda_for_k, l0_segment, l0_segment_values, CostColumn,
    LambdaSearch,
};
