//! Central-difference gradient checking.
//!
//! Every analytic gradient in this crate is validated against these
//! routines; keeping them public lets downstream tests do the same.

use alloc::vec::Vec;

use crate::math;

/// Central-difference estimate of the gradient of `f` at `point`, one
/// symmetric probe of width `eps` per coordinate.
pub fn central_difference_gradient<F>(mut f: F, point: &[f64], eps: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(eps > 0.0 && eps.is_finite(), "probe width must be positive");
    let mut x = point.to_vec();
    let mut grad = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        let original = x[i];
        x[i] = original + eps;
        let high = f(&x);
        x[i] = original - eps;
        let low = f(&x);
        x[i] = original;
        grad.push((high - low) / (2.0 * eps));
    }
    grad
}

/// Worst per-coordinate discrepancy, measured relative to the larger
/// magnitude with a floor of one: `|a - b| / max(1, |a|, |b|)`.
pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "gradient lengths differ");
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| math::abs(x - y) / 1.0f64.max(math::abs(x)).max(math::abs(y)))
        .fold(0.0, f64::max)
}
