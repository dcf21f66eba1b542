//! Scoring utilities shared by tests and the experiment harness.

use core::fmt;

use crate::math;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricsError {
    LengthMismatch { left: usize, right: usize },
    TooFewPoints { got: usize },
    NonFinite,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::LengthMismatch { left, right } => {
                write!(f, "input lengths differ: {left} vs {right}")
            }
            MetricsError::TooFewPoints { got } => {
                write!(f, "correlation needs at least 2 points, got {got}")
            }
            MetricsError::NonFinite => write!(f, "inputs contain non-finite values"),
        }
    }
}

impl core::error::Error for MetricsError {}

/// Pearson correlation. `degenerate` marks inputs where either side has
/// (numerically) zero variance; the value is reported as 0 in that case so
/// downstream averaging stays finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlation {
    pub value: f64,
    pub degenerate: bool,
}

/// Pearson correlation coefficient of two equal-length samples, clamped to
/// `[-1, 1]`.
pub fn pearson_correlation(x: &[f64], y: &[f64]) -> Result<Correlation, MetricsError> {
    if x.len() != y.len() {
        return Err(MetricsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(MetricsError::TooFewPoints { got: x.len() });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite);
    }

    let n = x.len() as f64;
    let mean_x: f64 = x.iter().sum::<f64>() / n;
    let mean_y: f64 = y.iter().sum::<f64>() / n;

    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    let mut dev_x = 0.0f64;
    let mut dev_y = 0.0f64;
    for (&a, &b) in x.iter().zip(y.iter()) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
        dev_x = dev_x.max(math::abs(dx));
        dev_y = dev_y.max(math::abs(dy));
    }

    // A side whose largest deviation from its mean is at rounding-noise
    // scale carries no signal; calling such input zero-variance keeps the
    // metric stable instead of amplifying float residue.
    let flat_x = dev_x <= 1e-12 * (1.0 + math::abs(mean_x));
    let flat_y = dev_y <= 1e-12 * (1.0 + math::abs(mean_y));
    if flat_x || flat_y {
        return Ok(Correlation {
            value: 0.0,
            degenerate: true,
        });
    }

    let value = (cov / math::sqrt(var_x * var_y)).clamp(-1.0, 1.0);
    Ok(Correlation {
        value,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn perfect_linear_relation() {
        let c = pearson_correlation(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(c.value, 1.0);
        assert!(!c.degenerate);
    }

    #[test]
    fn hand_computed_case() {
        let c = pearson_correlation(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.0, 1.0, 3.0]).unwrap();
        assert!(math::abs(c.value - 0.9233805168766388) < 1e-12);
    }

    #[test]
    fn exact_negative_relation() {
        let c = pearson_correlation(&[1.0, 2.0, 4.0], &[-1.0, -2.0, -4.0]).unwrap();
        assert_eq!(c.value, -1.0);
    }

    #[test]
    fn zero_variance_is_flagged_not_nan() {
        let c = pearson_correlation(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.degenerate);
    }

    #[test]
    fn length_and_size_checks() {
        assert!(matches!(
            pearson_correlation(&[1.0], &[1.0, 2.0]),
            Err(MetricsError::LengthMismatch { .. })
        ));
        assert!(matches!(
            pearson_correlation(&[1.0], &[1.0]),
            Err(MetricsError::TooFewPoints { got: 1 })
        ));
        assert!(matches!(
            pearson_correlation(&[f64::NAN, 0.0], &[1.0, 2.0]),
            Err(MetricsError::NonFinite)
        ));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        /// Correlation is invariant under positive affine maps of either side.
        #[test]
        fn affine_invariance(
            xs in proptest::collection::vec(-50.0f64..50.0, 3..12),
            scale in 0.1f64..10.0,
            offset in -20.0f64..20.0,
        ) {
            let ys: Vec<f64> = xs.iter().map(|v| scale * v + offset).collect();
            let c = pearson_correlation(&xs, &ys).unwrap();
            if !c.degenerate {
                proptest::prop_assert!(math::abs(c.value - 1.0) < 1e-9);
            }
        }

        /// Flipping one side flips the sign.
        #[test]
        fn antisymmetry(
            xs in proptest::collection::vec(-50.0f64..50.0, 3..12),
            ys in proptest::collection::vec(-50.0f64..50.0, 3..12),
        ) {
            let n = xs.len().min(ys.len());
            let xs = &xs[..n];
            let ys = &ys[..n];
            let c = pearson_correlation(xs, ys).unwrap();
            let neg: Vec<f64> = ys.iter().map(|v| -v).collect();
            let d = pearson_correlation(xs, &neg).unwrap();
            if !c.degenerate && !d.degenerate {
                proptest::prop_assert!(math::abs(c.value + d.value) < 1e-9);
            }
        }
    }

    #[test]
    fn result_stays_clamped() {
        // Colinear but with rounding stress.
        let xs = vec![1.0e-8, 2.0e-8, 3.0000000001e-8];
        let ys = vec![3.0e8, 6.0e8, 9.0000000003e8];
        let c = pearson_correlation(&xs, &ys).unwrap();
        assert!(c.value <= 1.0 && c.value >= -1.0);
    }
}
