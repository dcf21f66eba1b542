//! Dense per-state feature matrix.

use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeatureError {
    Empty,
    ZeroDim,
    WrongRowLength { row: usize, expected: usize, got: usize },
    NonFinite { row: usize },
    WrongDataLength { expected: usize, got: usize },
}

impl fmt::Display for FeatureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureError::Empty => write!(f, "feature matrix needs at least one row"),
            FeatureError::ZeroDim => write!(f, "feature rows need at least one column"),
            FeatureError::WrongRowLength { row, expected, got } => {
                write!(f, "feature row {row} has length {got}, expected {expected}")
            }
            FeatureError::NonFinite { row } => {
                write!(f, "feature row {row} contains non-finite values")
            }
            FeatureError::WrongDataLength { expected, got } => {
                write!(f, "feature data has length {got}, expected {expected}")
            }
        }
    }
}

impl core::error::Error for FeatureError {}

/// One fixed-length, finite feature vector per state, stored row-major.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(try_from = "FeaturesRepr", into = "FeaturesRepr")
)]
pub struct Features {
    n_states: usize,
    dim: usize,
    data: Vec<f64>,
}

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Clone, Debug)]
pub struct FeaturesRepr {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
}

impl TryFrom<FeaturesRepr> for Features {
    type Error = FeatureError;

    fn try_from(repr: FeaturesRepr) -> Result<Self, FeatureError> {
        Features::from_rows(repr.rows).and_then(|f| {
            if f.dim != repr.dim {
                Err(FeatureError::WrongRowLength {
                    row: 0,
                    expected: repr.dim,
                    got: f.dim,
                })
            } else {
                Ok(f)
            }
        })
    }
}

impl From<Features> for FeaturesRepr {
    fn from(features: Features) -> FeaturesRepr {
        FeaturesRepr {
            dim: features.dim,
            rows: (0..features.n_states)
                .map(|s| features.row(s).to_vec())
                .collect(),
        }
    }
}

impl Features {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, FeatureError> {
        if rows.is_empty() {
            return Err(FeatureError::Empty);
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(FeatureError::ZeroDim);
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(FeatureError::WrongRowLength {
                    row: i,
                    expected: dim,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(FeatureError::NonFinite { row: i });
            }
            data.extend_from_slice(row);
        }
        Ok(Features {
            n_states: rows.len(),
            dim,
            data,
        })
    }

    pub fn from_flat(n_states: usize, dim: usize, data: Vec<f64>) -> Result<Self, FeatureError> {
        if n_states == 0 {
            return Err(FeatureError::Empty);
        }
        if dim == 0 {
            return Err(FeatureError::ZeroDim);
        }
        if data.len() != n_states * dim {
            return Err(FeatureError::WrongDataLength {
                expected: n_states * dim,
                got: data.len(),
            });
        }
        if let Some(row) = (0..n_states).find(|&s| {
            data[s * dim..(s + 1) * dim].iter().any(|v| !v.is_finite())
        }) {
            return Err(FeatureError::NonFinite { row });
        }
        Ok(Features {
            n_states,
            dim,
            data,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.data[state * self.dim..(state + 1) * self.dim]
    }
}
