//! Backup operators: the max-like reductions that collapse a row of action
//! values into a state value.
//!
//! All four operators are shift-equivariant (`F(q + c) = F(q) + c`), so their
//! gradients sum to one. `LogSumExp`, `PNorm`, and `GSoft` are smooth
//! softened maxima; `Max` is the hard limit with a subgradient convention of
//! the lowest-index maximizer.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Default sharpness for `PNorm`.
pub const DEFAULT_PNORM_P: f64 = 10.0;
/// Default sharpness for `GSoft`.
pub const DEFAULT_GSOFT_K: f64 = 100.0;

/// Offset keeping the shifted values in `PNorm` strictly positive.
const PNORM_SHIFT_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum BackupError {
    InvalidPNormP { p: f64 },
    InvalidGSoftK { k: f64 },
}

impl fmt::Display for BackupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackupError::InvalidPNormP { p } => {
                write!(f, "pnorm backup needs p > 1, got {p}")
            }
            BackupError::InvalidGSoftK { k } => {
                write!(f, "gsoft backup needs k > 0, got {k}")
            }
        }
    }
}

impl core::error::Error for BackupError {}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "kind", rename_all = "lowercase")
)]
pub enum BackupOperator {
    #[default]
    Max,
    LogSumExp,
    PNorm { p: f64 },
    GSoft { k: f64 },
}

impl BackupOperator {
    pub fn validate(&self) -> Result<(), BackupError> {
        match *self {
            BackupOperator::Max | BackupOperator::LogSumExp => Ok(()),
            BackupOperator::PNorm { p } => {
                if p > 1.0 && p.is_finite() {
                    Ok(())
                } else {
                    Err(BackupError::InvalidPNormP { p })
                }
            }
            BackupOperator::GSoft { k } => {
                if k > 0.0 && k.is_finite() {
                    Ok(())
                } else {
                    Err(BackupError::InvalidGSoftK { k })
                }
            }
        }
    }

    /// Collapses one row of action values into a state value.
    ///
    /// Panics on an empty row or parameters that fail `validate`; those are
    /// caller bugs, not data conditions.
    pub fn apply(&self, q_row: &[f64]) -> f64 {
        assert!(!q_row.is_empty(), "backup over an empty action set");
        self.validate().expect("backup operator parameters");
        match *self {
            BackupOperator::Max => q_row.iter().fold(f64::NEG_INFINITY, |m, &q| m.max(q)),
            BackupOperator::LogSumExp => log_sum_exp_scaled(q_row, 1.0),
            BackupOperator::GSoft { k } => log_sum_exp_scaled(q_row, k) / k,
            BackupOperator::PNorm { p } => {
                let (shift, u_max, t) = pnorm_ratios(q_row);
                let total: f64 = t.iter().map(|&ti| math::powf(ti, p)).sum();
                shift + u_max * math::powf(total, 1.0 / p)
            }
        }
    }

    /// Gradient of `apply` with respect to the row. Entries sum to one.
    ///
    /// `Max` returns the one-hot indicator of its lowest-index maximizer;
    /// `PNorm` uses the lowest-index minimizer for the shift term.
    pub fn gradient(&self, q_row: &[f64]) -> Vec<f64> {
        assert!(!q_row.is_empty(), "backup over an empty action set");
        self.validate().expect("backup operator parameters");
        match *self {
            BackupOperator::Max => {
                let mut best = 0;
                for (a, &q) in q_row.iter().enumerate().skip(1) {
                    if q > q_row[best] {
                        best = a;
                    }
                }
                let mut g = alloc::vec![0.0; q_row.len()];
                g[best] = 1.0;
                g
            }
            BackupOperator::LogSumExp => softmax_scaled(q_row, 1.0),
            BackupOperator::GSoft { k } => softmax_scaled(q_row, k),
            BackupOperator::PNorm { p } => {
                let (_, _, t) = pnorm_ratios(q_row);
                let mut arg_min = 0;
                for (a, &q) in q_row.iter().enumerate().skip(1) {
                    if q < q_row[arg_min] {
                        arg_min = a;
                    }
                }
                let total: f64 = t.iter().map(|&ti| math::powf(ti, p)).sum();
                // d/dq_a [shift + (sum u^p)^(1/p)] with u = q - shift and
                // shift moving with the minimum; expressed through the
                // ratios t = u / u_max so nothing overflows at large p.
                let scale = math::powf(total, (1.0 - p) / p);
                let powers: Vec<f64> = t.iter().map(|&ti| math::powf(ti, p - 1.0)).collect();
                let power_sum: f64 = powers.iter().sum();
                let mut g: Vec<f64> = powers.iter().map(|&w| scale * w).collect();
                g[arg_min] += 1.0 - scale * power_sum;
                g
            }
        }
    }
}

/// `max(k q) + ln sum exp(k q - max)`, the scaled log-sum-exp numerator.
fn log_sum_exp_scaled(q_row: &[f64], k: f64) -> f64 {
    let top = q_row.iter().fold(f64::NEG_INFINITY, |m, &q| m.max(k * q));
    let sum: f64 = q_row.iter().map(|&q| math::exp(k * q - top)).sum();
    top + math::ln(sum)
}

fn softmax_scaled(q_row: &[f64], k: f64) -> Vec<f64> {
    let top = q_row.iter().fold(f64::NEG_INFINITY, |m, &q| m.max(k * q));
    let weights: Vec<f64> = q_row.iter().map(|&q| math::exp(k * q - top)).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Shift, largest shifted value, and the ratios `u / u_max` in `(0, 1]`
/// used by the `PNorm` backup.
fn pnorm_ratios(q_row: &[f64]) -> (f64, f64, Vec<f64>) {
    let min = q_row.iter().fold(f64::INFINITY, |m, &q| m.min(q));
    let shift = min - PNORM_SHIFT_EPS;
    let u_max = q_row.iter().fold(f64::NEG_INFINITY, |m, &q| m.max(q - shift));
    let t = q_row.iter().map(|&q| (q - shift) / u_max).collect();
    (shift, u_max, t)
}
