//! Scalar function approximators over state features.
//!
//! Training only ever needs four things from an approximator: evaluate it,
//! read and write a flat parameter vector, and form the weighted sum
//! `sum_s w_s * d value(s) / d params` in one pass. Approximators with a
//! parameter prior (the Gaussian process) expose it through `log_prior`;
//! for the rest the prior is identically zero.

pub mod gp;
pub mod mlp;

use alloc::vec::Vec;
use core::fmt;

use crate::features::Features;

pub use gp::SparseGp;
pub use mlp::Mlp;

#[derive(Clone, Debug, PartialEq)]
pub enum ApproxError {
    InvalidConfig {
        what: &'static str,
    },
    ParamLengthMismatch {
        expected: usize,
        got: usize,
    },
    FeatureDimMismatch {
        expected: usize,
        got: usize,
    },
    NonFiniteParams,
    NotPositiveDefinite {
        pivot: usize,
    },
    SupportOutOfRange {
        state: usize,
        n_states: usize,
    },
}

impl fmt::Display for ApproxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxError::InvalidConfig { what } => write!(f, "invalid approximator config: {what}"),
            ApproxError::ParamLengthMismatch { expected, got } => {
                write!(f, "parameter vector has length {got}, expected {expected}")
            }
            ApproxError::FeatureDimMismatch { expected, got } => {
                write!(f, "feature dimension {got} does not match the approximator's {expected}")
            }
            ApproxError::NonFiniteParams => write!(f, "parameters contain non-finite values"),
            ApproxError::NotPositiveDefinite { pivot } => {
                write!(f, "kernel matrix is not positive definite (pivot {pivot})")
            }
            ApproxError::SupportOutOfRange { state, n_states } => {
                write!(f, "supporting state {state} outside the {n_states}-state space")
            }
        }
    }
}

impl core::error::Error for ApproxError {}

/// A differentiable scalar function of state features with a flat parameter
/// vector.
pub trait VrFunction {
    fn n_params(&self) -> usize;

    /// Current parameters as a flat vector. The layout is stable for a
    /// given instance and matches `set_params` and the gradients.
    fn params(&self) -> Vec<f64>;

    /// Replaces the parameters. Implementations revalidate and rebuild any
    /// caches; a rejected vector leaves the instance unchanged.
    fn set_params(&mut self, params: &[f64]) -> Result<(), ApproxError>;

    /// Value at one feature row.
    fn value(&self, feature: &[f64]) -> f64;

    /// `sum over (state, weight) of weight * gradient of value(state)` with
    /// respect to the flat parameters, in one batched pass.
    fn weighted_param_gradient(&self, features: &Features, weights: &[(usize, f64)]) -> Vec<f64>;

    /// Log prior density of the current parameters, up to an additive
    /// constant; zero when the approximator carries no prior.
    fn log_prior(&self) -> f64 {
        0.0
    }

    /// Adds the gradient of `log_prior` into `grad`.
    fn add_prior_gradient(&self, _grad: &mut [f64]) {}
}

/// Evaluates the approximator on every state, in state order.
pub fn evaluate_all<A: VrFunction + ?Sized>(approx: &A, features: &Features) -> Vec<f64> {
    (0..features.n_states())
        .map(|s| approx.value(features.row(s)))
        .collect()
}
