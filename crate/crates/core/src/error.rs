// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Error type shared by all modules in this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument violated a precondition (bad index, bad bounds, bad λ, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input data is unusable (too short, non-finite, degenerate noise scale).
    #[error("data error: {0}")]
    Data(String),

    /// Binary segmentation ran out of admissible splits before reaching `k`.
    #[error("segmentation exhausted: found {found} of {requested} requested changepoints")]
    SegmentationExhausted { found: usize, requested: usize },

    /// A quantity that must be bounded below (or strictly positive) is not.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural invariant was violated (e.g. non-convex u-coefficient).
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// The regime walk could not align an interval endpoint with the current
    /// boundary after exhausting the step refinement budget.
    #[error("degenerate regime boundary at phi = {boundary}")]
    DegenerateBoundary { boundary: f64 },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}
