//! Dense feed-forward network with tanh hidden layers and a linear scalar
//! output.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::approx::{ApproxError, VrFunction};
use crate::features::Features;
use crate::math;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Multi-layer perceptron. `layer_sizes` runs input first, output last; the
/// output layer has one unit and no activation, every hidden layer is tanh.
///
/// Flat parameter layout: for each layer in order, its weight matrix in
/// row-major order (`out x in`) followed by its bias vector.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(try_from = "MlpRepr", into = "MlpRepr")
)]
pub struct Mlp {
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Clone, Debug)]
pub struct MlpRepr {
    pub layer_sizes: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl TryFrom<MlpRepr> for Mlp {
    type Error = ApproxError;

    fn try_from(repr: MlpRepr) -> Result<Self, ApproxError> {
        check_architecture(&repr.layer_sizes)?;
        let n_layers = repr.layer_sizes.len() - 1;
        if repr.weights.len() != n_layers || repr.biases.len() != n_layers {
            return Err(ApproxError::InvalidConfig {
                what: "layer count does not match weights/biases",
            });
        }
        for l in 0..n_layers {
            let (n_in, n_out) = (repr.layer_sizes[l], repr.layer_sizes[l + 1]);
            if repr.weights[l].len() != n_in * n_out || repr.biases[l].len() != n_out {
                return Err(ApproxError::InvalidConfig {
                    what: "layer parameter shapes do not match layer_sizes",
                });
            }
            if repr.weights[l]
                .iter()
                .chain(repr.biases[l].iter())
                .any(|w| !w.is_finite())
            {
                return Err(ApproxError::NonFiniteParams);
            }
        }
        Ok(Mlp {
            layer_sizes: repr.layer_sizes,
            weights: repr.weights,
            biases: repr.biases,
        })
    }
}

impl From<Mlp> for MlpRepr {
    fn from(mlp: Mlp) -> MlpRepr {
        MlpRepr {
            layer_sizes: mlp.layer_sizes,
            weights: mlp.weights,
            biases: mlp.biases,
        }
    }
}

fn check_architecture(layer_sizes: &[usize]) -> Result<(), ApproxError> {
    if layer_sizes.len() < 2 {
        return Err(ApproxError::InvalidConfig {
            what: "network needs at least input and output layers",
        });
    }
    if layer_sizes.contains(&0) {
        return Err(ApproxError::InvalidConfig {
            what: "layer sizes must be positive",
        });
    }
    if *layer_sizes.last().unwrap() != 1 {
        return Err(ApproxError::InvalidConfig {
            what: "output layer must have exactly one unit",
        });
    }
    Ok(())
}

impl Mlp {
    /// Fresh network with uniform Glorot weights, `U(-l, l)` with
    /// `l = sqrt(6 / (fan_in + fan_out))`, and zero biases, drawn from
    /// `seed`.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self, ApproxError> {
        check_architecture(layer_sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..layer_sizes.len() - 1 {
            let (n_in, n_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let limit = math::sqrt(6.0 / (n_in + n_out) as f64);
            weights.push(
                (0..n_in * n_out)
                    .map(|_| rng.random_range(-limit..limit))
                    .collect(),
            );
            biases.push(vec![0.0; n_out]);
        }
        Ok(Mlp {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    fn n_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// Forward pass keeping every layer's activations; `trace[0]` is the
    /// input, `trace.last()` the one-element output.
    fn forward_trace(&self, x: &[f64]) -> Vec<Vec<f64>> {
        debug_assert_eq!(x.len(), self.input_dim());
        let mut trace = Vec::with_capacity(self.n_layers() + 1);
        trace.push(x.to_vec());
        for l in 0..self.n_layers() {
            let (n_in, n_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            let input = &trace[l];
            let mut out = Vec::with_capacity(n_out);
            for unit in 0..n_out {
                let row = &self.weights[l][unit * n_in..(unit + 1) * n_in];
                let mut z = self.biases[l][unit];
                for (w, a) in row.iter().zip(input.iter()) {
                    z += w * a;
                }
                out.push(if l + 1 == self.n_layers() { z } else { math::tanh(z) });
            }
            trace.push(out);
        }
        trace
    }

    /// Backward pass from an output delta, accumulating parameter gradients
    /// scaled by `delta` into `grad` (same flat layout as `params`).
    fn accumulate_backward(&self, trace: &[Vec<f64>], delta: f64, grad: &mut [f64]) {
        let mut deltas = vec![delta];
        // Layer offsets into the flat gradient, output layer last.
        let mut offsets = Vec::with_capacity(self.n_layers());
        let mut off = 0;
        for l in 0..self.n_layers() {
            offsets.push(off);
            off += self.layer_sizes[l] * self.layer_sizes[l + 1] + self.layer_sizes[l + 1];
        }

        for l in (0..self.n_layers()).rev() {
            let (n_in, n_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            let input = &trace[l];
            let base = offsets[l];
            for unit in 0..n_out {
                let d = deltas[unit];
                let w_base = base + unit * n_in;
                for (i, a) in input.iter().enumerate() {
                    grad[w_base + i] += d * a;
                }
                grad[base + n_in * n_out + unit] += d;
            }
            if l > 0 {
                // Propagate through the weights, then through tanh of the
                // previous layer: a' = 1 - a^2.
                let mut prev = vec![0.0; n_in];
                for (unit, &d) in deltas.iter().enumerate() {
                    let row = &self.weights[l][unit * n_in..(unit + 1) * n_in];
                    for (i, w) in row.iter().enumerate() {
                        prev[i] += d * w;
                    }
                }
                for (i, slot) in prev.iter_mut().enumerate() {
                    let a = trace[l][i];
                    *slot *= 1.0 - a * a;
                }
                deltas = prev;
            }
        }
    }
}

impl VrFunction for Mlp {
    fn n_params(&self) -> usize {
        (0..self.n_layers())
            .map(|l| self.layer_sizes[l] * self.layer_sizes[l + 1] + self.layer_sizes[l + 1])
            .sum()
    }

    fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for l in 0..self.n_layers() {
            out.extend_from_slice(&self.weights[l]);
            out.extend_from_slice(&self.biases[l]);
        }
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
        let mut cursor = 0;
        for l in 0..self.n_layers() {
            let n_w = self.layer_sizes[l] * self.layer_sizes[l + 1];
            let n_b = self.layer_sizes[l + 1];
            self.weights[l].copy_from_slice(&params[cursor..cursor + n_w]);
            cursor += n_w;
            self.biases[l].copy_from_slice(&params[cursor..cursor + n_b]);
            cursor += n_b;
        }
        Ok(())
    }

    fn value(&self, feature: &[f64]) -> f64 {
        self.forward_trace(feature).last().unwrap()[0]
    }

    fn weighted_param_gradient(&self, features: &Features, weights: &[(usize, f64)]) -> Vec<f64> {
        let mut grad = vec![0.0; self.n_params()];
        for &(state, weight) in weights {
            if weight == 0.0 {
                continue;
            }
            let trace = self.forward_trace(features.row(state));
            self.accumulate_backward(&trace, weight, &mut grad);
        }
        grad
    }
}
