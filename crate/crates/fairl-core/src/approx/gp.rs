//! Sparse Gaussian process mean over a fixed set of supporting states.
//!
//! The approximator is the posterior mean `f(x) = k_x^T K^-1 f_u` of a GP
//! with an ARD squared-exponential kernel, conditioned on free values `f_u`
//! at the supporting states. The supporting values and the kernel
//! hyperparameters are all trained; a Gaussian prior term keeps `f_u`
//! consistent with the kernel. Kernel hyperparameters are optimized in log
//! space so gradient steps cannot leave the positive cone.
//!
//! `K` is factorized once per parameter update (Cholesky, never an explicit
//! solve-by-inverse for the mean path) and every query reuses the factor.
//! The diagonal jitter is fixed at construction rather than tied to the
//! evolving signal variance, keeping the objective a clean function of the
//! parameters.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::{ApproxError, VrFunction};
use crate::features::Features;
use crate::math;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

const LN_2PI: f64 = 1.8378770664093453;

/// ARD squared-exponential kernel
/// `k(x, y) = signal_variance * exp(-1/2 sum_d precisions[d] (x_d - y_d)^2)`.
///
/// `precisions` are inverse squared length scales: zero switches a
/// dimension off entirely, large values make it decisive.
pub fn ard_kernel(x: &[f64], y: &[f64], precisions: &[f64], signal_variance: f64) -> f64 {
    assert_eq!(x.len(), y.len(), "kernel inputs must share a dimension");
    assert_eq!(x.len(), precisions.len(), "one precision per dimension");
    let mut s = 0.0;
    for d in 0..x.len() {
        let diff = x[d] - y[d];
        s += precisions[d] * diff * diff;
    }
    signal_variance * math::exp(-0.5 * s)
}

/// Lower Cholesky factor of a symmetric matrix, row-major. Fails with the
/// offending pivot index when the matrix is not positive definite.
fn cholesky(n: usize, a: &[f64]) -> Result<Vec<f64>, usize> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(i);
                }
                l[i * n + i] = math::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves `L L^T x = b` by forward then backward substitution.
fn cholesky_solve(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    y
}

/// Construction-time knobs. `n_support = None` defaults to
/// `min(64, n_states)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(default))]
pub struct GpConfig {
    pub n_support: Option<usize>,
    pub init_precision: f64,
    pub init_signal_variance: f64,
    pub jitter_scale: f64,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            n_support: None,
            init_precision: 1.0,
            init_signal_variance: 1.0,
            jitter_scale: 1e-6,
        }
    }
}

pub const DEFAULT_MAX_SUPPORT: usize = 64;

/// Sparse GP mean with trainable supporting values and kernel
/// hyperparameters.
///
/// Flat parameter layout: `[ln precisions.., ln signal_variance,
/// supporting values..]`.
#[derive(Clone, Debug)]
pub struct SparseGp {
    precisions: Vec<f64>,
    signal_variance: f64,
    jitter: f64,
    support_states: Vec<usize>,
    support_features: Vec<f64>,
    support_values: Vec<f64>,
    // Caches rebuilt by `refresh`.
    k_raw: Vec<f64>,
    chol: Vec<f64>,
    k_inv: Vec<f64>,
    alpha: Vec<f64>,
    log_det: f64,
}

impl SparseGp {
    /// GP anchored at the given supporting states. Supporting values start
    /// at `U(-0.1, 0.1)` drawn from `seed`.
    pub fn new(
        features: &Features,
        support_states: Vec<usize>,
        config: &GpConfig,
        seed: u64,
    ) -> Result<Self, ApproxError> {
        if support_states.is_empty() {
            return Err(ApproxError::InvalidConfig {
                what: "gp needs at least one supporting state",
            });
        }
        if !(config.init_precision > 0.0 && config.init_precision.is_finite()) {
            return Err(ApproxError::InvalidConfig {
                what: "init_precision must be positive",
            });
        }
        if !(config.init_signal_variance > 0.0 && config.init_signal_variance.is_finite()) {
            return Err(ApproxError::InvalidConfig {
                what: "init_signal_variance must be positive",
            });
        }
        if !(config.jitter_scale >= 0.0 && config.jitter_scale.is_finite()) {
            return Err(ApproxError::InvalidConfig {
                what: "jitter_scale must be nonnegative",
            });
        }
        for &s in &support_states {
            if s >= features.n_states() {
                return Err(ApproxError::SupportOutOfRange {
                    state: s,
                    n_states: features.n_states(),
                });
            }
        }

        let d = features.dim();
        let n = support_states.len();
        let mut support_features = Vec::with_capacity(n * d);
        for &s in &support_states {
            support_features.extend_from_slice(features.row(s));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let support_values = (0..n).map(|_| rng.random_range(-0.1..0.1)).collect();

        let mut gp = SparseGp {
            precisions: vec![config.init_precision; d],
            signal_variance: config.init_signal_variance,
            jitter: config.jitter_scale * config.init_signal_variance,
            support_states,
            support_features,
            support_values,
            k_raw: Vec::new(),
            chol: Vec::new(),
            k_inv: Vec::new(),
            alpha: Vec::new(),
            log_det: 0.0,
        };
        gp.refresh()?;
        Ok(gp)
    }

    /// GP anchored at `min(64, n_states)` supporting states (or the
    /// configured count), drawn uniformly without replacement from `seed`.
    /// Supporting values come from the same stream.
    pub fn with_random_support(
        features: &Features,
        config: &GpConfig,
        seed: u64,
    ) -> Result<Self, ApproxError> {
        let n_states = features.n_states();
        let n_support = config
            .n_support
            .unwrap_or_else(|| DEFAULT_MAX_SUPPORT.min(n_states));
        if n_support == 0 || n_support > n_states {
            return Err(ApproxError::InvalidConfig {
                what: "n_support must lie in 1..=n_states",
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<usize> = (0..n_states).collect();
        for i in 0..n_states.saturating_sub(1) {
            let j = rng.random_range(i..n_states);
            pool.swap(i, j);
        }
        // Accept candidates in shuffled order, skipping states whose feature
        // row duplicates one already accepted: a second support point at the
        // same input makes the kernel singular while adding nothing (the GP
        // is a function of features alone).
        let mut states: Vec<usize> = Vec::with_capacity(n_support);
        for &candidate in &pool {
            if states.len() == n_support {
                break;
            }
            let row = features.row(candidate);
            if states.iter().all(|&kept| features.row(kept) != row) {
                states.push(candidate);
            }
        }
        Self::new(features, states, config, rng.random())
    }

    pub fn support_states(&self) -> &[usize] {
        &self.support_states
    }

    pub fn precisions(&self) -> &[f64] {
        &self.precisions
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_variance
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    fn n_support(&self) -> usize {
        self.support_values.len()
    }

    fn dim(&self) -> usize {
        self.precisions.len()
    }

    fn support_row(&self, i: usize) -> &[f64] {
        &self.support_features[i * self.dim()..(i + 1) * self.dim()]
    }

    /// Rebuilds kernel matrix, factorization, `alpha = K^-1 f_u`, the
    /// explicit inverse used only for trace terms, and `ln det K`.
    fn refresh(&mut self) -> Result<(), ApproxError> {
        let n = self.n_support();
        let mut k = vec![0.0; n * n];
        let mut k_raw = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let value = ard_kernel(
                    self.support_row(i),
                    self.support_row(j),
                    &self.precisions,
                    self.signal_variance,
                );
                k_raw[i * n + j] = value;
                k_raw[j * n + i] = value;
                let with_jitter = if i == j { value + self.jitter } else { value };
                k[i * n + j] = with_jitter;
                k[j * n + i] = with_jitter;
            }
        }
        let chol =
            cholesky(n, &k).map_err(|pivot| ApproxError::NotPositiveDefinite { pivot })?;
        let alpha = cholesky_solve(n, &chol, &self.support_values);
        let mut k_inv = vec![0.0; n * n];
        let mut unit = vec![0.0; n];
        for col in 0..n {
            unit[col] = 1.0;
            let column = cholesky_solve(n, &chol, &unit);
            for row in 0..n {
                k_inv[row * n + col] = column[row];
            }
            unit[col] = 0.0;
        }
        let log_det = 2.0 * (0..n).map(|i| math::ln(chol[i * n + i])).sum::<f64>();

        self.k_raw = k_raw;
        self.chol = chol;
        self.k_inv = k_inv;
        self.alpha = alpha;
        self.log_det = log_det;
        Ok(())
    }

    fn kernel_row(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_support())
            .map(|i| ard_kernel(x, self.support_row(i), &self.precisions, self.signal_variance))
            .collect()
    }
}

impl VrFunction for SparseGp {
    fn n_params(&self) -> usize {
        self.dim() + 1 + self.n_support()
    }

    fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        out.extend(self.precisions.iter().map(|&p| math::ln(p)));
        out.push(math::ln(self.signal_variance));
        out.extend_from_slice(&self.support_values);
        out
    }

    fn set_params(&mut self, params: &[f64]) -> Result<(), ApproxError> {
        if params.len() != self.n_params() {
            return Err(ApproxError::ParamLengthMismatch {
                expected: self.n_params(),
                got: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(ApproxError::NonFiniteParams);
        }
        let d = self.dim();
        let mut next = self.clone();
        for (slot, &p) in next.precisions.iter_mut().zip(params.iter()) {
            *slot = math::exp(p);
        }
        next.signal_variance = math::exp(params[d]);
        next.support_values.copy_from_slice(&params[d + 1..]);
        if next.precisions.iter().any(|p| !p.is_finite() || *p == 0.0)
            || !next.signal_variance.is_finite()
            || next.signal_variance == 0.0
        {
            return Err(ApproxError::NonFiniteParams);
        }
        next.refresh()?;
        *self = next;
        Ok(())
    }

    fn value(&self, feature: &[f64]) -> f64 {
        let k = self.kernel_row(feature);
        k.iter().zip(self.alpha.iter()).map(|(a, b)| a * b).sum()
    }

    // Indexed loops stay: every index feeds flat-matrix arithmetic over
    // several arrays at once.
    #[allow(clippy::needless_range_loop)]
    fn weighted_param_gradient(&self, features: &Features, weights: &[(usize, f64)]) -> Vec<f64> {
        let d = self.dim();
        let n = self.n_support();
        // m = sum_s c_s k_s; lam_term[d] = sum_s c_s (dk_s/d lam_d)^T alpha;
        // beta_dot = sum_s c_s k_s^T alpha.
        let mut m = vec![0.0; n];
        let mut lam_term = vec![0.0; d];
        let mut beta_dot = 0.0;
        for &(state, c) in weights {
            if c == 0.0 {
                continue;
            }
            let x = features.row(state);
            for i in 0..n {
                let xi = self.support_row(i);
                let k = ard_kernel(x, xi, &self.precisions, self.signal_variance);
                m[i] += c * k;
                let ka = c * k * self.alpha[i];
                beta_dot += ka;
                for dd in 0..d {
                    let diff = x[dd] - xi[dd];
                    lam_term[dd] -= 0.5 * ka * diff * diff;
                }
            }
        }
        let w_bar = cholesky_solve(n, &self.chol, &m);

        let mut grad = vec![0.0; self.n_params()];
        // d mean / d lam_d = lam_term - w_bar^T (dK/d lam_d) alpha, then the
        // log-space chain rule multiplies by lam_d.
        for dd in 0..d {
            let mut quad = 0.0;
            for i in 0..n {
                let xi_d = self.support_features[i * d + dd];
                let wi = w_bar[i];
                if wi == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let diff = xi_d - self.support_features[j * d + dd];
                    quad += wi * self.k_raw[i * n + j] * (-0.5 * diff * diff) * self.alpha[j];
                }
            }
            grad[dd] = self.precisions[dd] * (lam_term[dd] - quad);
        }
        // d mean / d beta = (k_s^T alpha - w_bar^T K_raw alpha) / beta; the
        // log-space factor beta cancels.
        let mut kraw_quad = 0.0;
        for i in 0..n {
            let wi = w_bar[i];
            for j in 0..n {
                kraw_quad += wi * self.k_raw[i * n + j] * self.alpha[j];
            }
        }
        grad[d] = beta_dot - kraw_quad;
        grad[d + 1..].copy_from_slice(&w_bar);
        grad
    }

    /// Gaussian prior of the supporting values under the current kernel:
    /// `-1/2 f_u^T K^-1 f_u - 1/2 ln det K - n/2 ln 2 pi`.
    fn log_prior(&self) -> f64 {
        let quad: f64 = self
            .support_values
            .iter()
            .zip(self.alpha.iter())
            .map(|(f, a)| f * a)
            .sum();
        -0.5 * quad - 0.5 * self.log_det - 0.5 * self.n_support() as f64 * LN_2PI
    }

    #[allow(clippy::needless_range_loop)]
    fn add_prior_gradient(&self, grad: &mut [f64]) {
        let d = self.dim();
        let n = self.n_support();
        // d/d lam_d: 1/2 alpha^T (dK/d lam_d) alpha - 1/2 tr(K^-1 dK/d lam_d),
        // log-space scaled. The jitter does not move with any parameter, so
        // dK/d lam uses the raw kernel only (its diagonal is zero).
        for dd in 0..d {
            let mut quad = 0.0;
            let mut trace = 0.0;
            for i in 0..n {
                let xi_d = self.support_features[i * d + dd];
                for j in 0..n {
                    let diff = xi_d - self.support_features[j * d + dd];
                    let dk = self.k_raw[i * n + j] * (-0.5 * diff * diff);
                    quad += self.alpha[i] * dk * self.alpha[j];
                    trace += self.k_inv[i * n + j] * dk;
                }
            }
            grad[dd] += self.precisions[dd] * 0.5 * (quad - trace);
        }
        // d/d beta with dK/d beta = K_raw / beta; log-space cancels 1/beta.
        let mut quad = 0.0;
        let mut trace = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += self.alpha[i] * self.k_raw[i * n + j] * self.alpha[j];
                trace += self.k_inv[i * n + j] * self.k_raw[i * n + j];
            }
        }
        grad[d] += 0.5 * (quad - trace);
        // d/d f_u = -alpha.
        for (slot, &a) in grad[d + 1..].iter_mut().zip(self.alpha.iter()) {
            *slot -= a;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradcheck;

    fn toy_features() -> Features {
        Features::from_rows(alloc::vec![
            alloc::vec![0.0, 1.0],
            alloc::vec![1.0, 0.5],
            alloc::vec![-0.4, 0.2],
            alloc::vec![0.8, -1.1],
        ])
        .unwrap()
    }

    #[test]
    fn kernel_values() {
        let lam = [0.5, 2.0];
        assert_eq!(ard_kernel(&[3.0, -1.0], &[3.0, -1.0], &lam, 2.5), 2.5);
        let k = ard_kernel(&[0.0, 0.0], &[1.0, -1.0], &lam, 2.0);
        assert!(math::abs(k - 0.5730095937203802) < 1e-15);
        // Zero precision ignores every dimension.
        assert_eq!(ard_kernel(&[9.0, -4.0], &[0.0, 0.0], &[0.0, 0.0], 1.7), 1.7);
        // Symmetry.
        let a = [0.3, 0.9];
        let b = [-1.0, 0.4];
        assert_eq!(ard_kernel(&a, &b, &lam, 1.0), ard_kernel(&b, &a, &lam, 1.0));
    }

    #[test]
    fn cholesky_hand_case() {
        // [[4, 2], [2, 3]] = L L^T with L = [[2, 0], [1, sqrt 2]].
        let l = cholesky(2, &[4.0, 2.0, 2.0, 3.0]).unwrap();
        assert!(math::abs(l[0] - 2.0) < 1e-15);
        assert!(math::abs(l[2] - 1.0) < 1e-15);
        assert!(math::abs(l[3] - math::sqrt(2.0)) < 1e-15);
        let x = cholesky_solve(2, &l, &[8.0, 7.0]);
        // Solve [[4,2],[2,3]] x = [8,7]: x = [1.25, 1.5].
        assert!(math::abs(x[0] - 1.25) < 1e-12);
        assert!(math::abs(x[1] - 1.5) < 1e-12);
    }

    #[test]
    fn singular_kernel_is_reported() {
        let features =
            Features::from_rows(alloc::vec![alloc::vec![1.0, 2.0], alloc::vec![1.0, 2.0]])
                .unwrap();
        // Duplicate support points and no jitter: K is exactly singular.
        let config = GpConfig {
            jitter_scale: 0.0,
            ..GpConfig::default()
        };
        let err = SparseGp::new(&features, alloc::vec![0, 1], &config, 0).unwrap_err();
        assert!(matches!(err, ApproxError::NotPositiveDefinite { .. }));
        // The default jitter makes the same layout factorizable.
        assert!(SparseGp::new(&features, alloc::vec![0, 1], &GpConfig::default(), 0).is_ok());
    }

    #[test]
    fn single_support_mean() {
        let features =
            Features::from_rows(alloc::vec![alloc::vec![0.0, 0.0], alloc::vec![1.0, 0.0]])
                .unwrap();
        let mut gp = SparseGp::new(
            &features,
            alloc::vec![0],
            &GpConfig {
                init_precision: 1.0,
                ..GpConfig::default()
            },
            3,
        )
        .unwrap();
        // Pin f_u = 0.8 and precisions [2.0, 0.5] through the param vector.
        let params = alloc::vec![math::ln(2.0), math::ln(0.5), 0.0, 0.8];
        gp.set_params(&params).unwrap();
        let at_support = gp.value(features.row(0));
        assert!(math::abs(at_support - 0.7999992000008002) < 1e-12);
        let offset = gp.value(features.row(1));
        assert!(math::abs(offset - 0.2943032586338953) < 1e-12);
    }

    #[test]
    fn prior_log_likelihood_hand_case() {
        let features = toy_features();
        // Jitter is frozen at construction as jitter_scale * signal
        // variance; the oracle value assumed 1.8e-6, so beta = 1.8 must be
        // set at build time, not via set_params alone.
        let config = GpConfig {
            init_signal_variance: 1.8,
            jitter_scale: 1e-6,
            ..GpConfig::default()
        };
        let mut gp = SparseGp::new(&features, alloc::vec![0, 1], &config, 0).unwrap();
        let params = alloc::vec![
            math::ln(0.7),
            math::ln(1.3),
            math::ln(1.8),
            0.3,
            -0.4
        ];
        gp.set_params(&params).unwrap();
        assert!(math::abs(gp.log_prior() - -2.374042295118234) < 1e-10);
    }

    #[test]
    fn weighted_gradient_matches_central_differences() {
        let features = toy_features();
        let gp = SparseGp::new(
            &features,
            alloc::vec![0, 1, 2],
            &GpConfig::default(),
            11,
        )
        .unwrap();
        let weights = [(0usize, 1.2), (3usize, -0.6), (2usize, 0.35)];

        let analytic = gp.weighted_param_gradient(&features, &weights);
        let base = gp.params();
        let numeric = gradcheck::central_difference_gradient(
            |p| {
                let mut probe = gp.clone();
                probe.set_params(p).unwrap();
                weights
                    .iter()
                    .map(|&(s, w)| w * probe.value(features.row(s)))
                    .sum()
            },
            &base,
            1e-5,
        );
        let err = gradcheck::max_relative_error(&analytic, &numeric);
        assert!(err < 1e-6, "mean gradient mismatch {err}");
    }

    #[test]
    fn prior_gradient_matches_central_differences() {
        let features = toy_features();
        let gp = SparseGp::new(
            &features,
            alloc::vec![0, 1, 3],
            &GpConfig::default(),
            4,
        )
        .unwrap();
        let mut analytic = alloc::vec![0.0; gp.n_params()];
        gp.add_prior_gradient(&mut analytic);
        let numeric = gradcheck::central_difference_gradient(
            |p| {
                let mut probe = gp.clone();
                probe.set_params(p).unwrap();
                probe.log_prior()
            },
            &gp.params(),
            1e-5,
        );
        let err = gradcheck::max_relative_error(&analytic, &numeric);
        assert!(err < 1e-6, "prior gradient mismatch {err}");
    }

    #[test]
    fn random_support_is_seeded_and_distinct() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| alloc::vec![i as f64, (i * i) as f64 / 10.0])
            .collect();
        let features = Features::from_rows(rows).unwrap();
        let config = GpConfig {
            n_support: Some(10),
            ..GpConfig::default()
        };
        let a = SparseGp::with_random_support(&features, &config, 5).unwrap();
        let b = SparseGp::with_random_support(&features, &config, 5).unwrap();
        let c = SparseGp::with_random_support(&features, &config, 6).unwrap();
        assert_eq!(a.support_states(), b.support_states());
        assert_ne!(a.support_states(), c.support_states());
        let mut sorted = a.support_states().to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 10);
        assert_eq!(a.params(), b.params());

        // Default support count saturates at the state count.
        let small = SparseGp::with_random_support(&features, &GpConfig::default(), 1).unwrap();
        assert_eq!(small.support_states().len(), 30);
    }

    #[test]
    fn duplicate_feature_rows_never_enter_the_support() {
        // Ten states but only three distinct feature rows; a support with a
        // repeated row would make the kernel singular by construction.
        let rows: Vec<Vec<f64>> = (0..10).map(|i| alloc::vec![(i % 3) as f64, 1.0]).collect();
        let features = Features::from_rows(rows).unwrap();
        let gp = SparseGp::with_random_support(&features, &GpConfig::default(), 9).unwrap();
        assert_eq!(gp.support_states().len(), 3);
        let mut kept: Vec<&[f64]> = gp
            .support_states()
            .iter()
            .map(|&s| features.row(s))
            .collect();
        kept.sort_by(|a, b| a.partial_cmp(b).unwrap());
        kept.dedup();
        assert_eq!(kept.len(), 3);
    }

    #[test]
    fn rejected_params_leave_the_gp_unchanged() {
        let features = toy_features();
        let mut gp =
            SparseGp::new(&features, alloc::vec![0, 1], &GpConfig::default(), 2).unwrap();
        let before = gp.params();
        let mut bad = before.clone();
        bad[0] = f64::NAN;
        assert!(gp.set_params(&bad).is_err());
        assert_eq!(gp.params(), before);
        assert!(gp.set_params(&before[1..]).is_err());
        assert_eq!(gp.params(), before);
    }
}
