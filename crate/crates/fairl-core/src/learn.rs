//! The reward-learning core: value construction from a scalar state
//! function, demonstration likelihoods, their exact gradients, and the
//! gradient-ascent trainer.
//!
//! Everything rests on one identity. Let `f` be any scalar function over
//! states. Define `Q(s,a)` as the transition-weighted average of `f` over
//! successors, `V(s)` as a backup of the row `Q(s,.)`, and
//! `r(s) = f(s) - gamma * V(s)`. Then `Q`, `V`, `r` satisfy the optimality
//! equation for the chosen backup by construction, for every `f`. Learning
//! therefore never solves an MDP: it ascends the demonstration
//! log-likelihood directly in the parameters of `f`.
//!
//! The gradient never differentiates the approximator per state-action.
//! Each objective's chain rule is collapsed into one scalar coefficient per
//! state (how much the objective wants `f` at that state to grow), and the
//! approximator is differentiated once against those coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::approx::{evaluate_all, ApproxError, VrFunction};
use crate::backup::{BackupError, BackupOperator};
use crate::features::Features;
use crate::math;
use crate::mdp::{boltzmann_distribution, Mdp, MdpError, QTable, Trajectory};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// How demonstrated actions are scored against the constructed values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum MotionModel {
    /// Boltzmann over action values at inverse temperature `b`.
    #[default]
    QBased,
    /// Advantage scoring `Q(s,a) - V(s)`; self-normalizing when the backup
    /// is `LogSumExp`.
    RewardBased,
    /// Softmax over actions of the negated expected successor value.
    ValueBased,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainError {
    Config { what: &'static str },
    Backup(BackupError),
    Mdp(MdpError),
    Approx(ApproxError),
    FeatureMismatch { expected: usize, got: usize },
    NoTrajectories,
    Diverged { iteration: usize },
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::Config { what } => write!(f, "invalid training config: {what}"),
            TrainError::Backup(e) => write!(f, "backup operator: {e}"),
            TrainError::Mdp(e) => write!(f, "mdp: {e}"),
            TrainError::Approx(e) => write!(f, "approximator: {e}"),
            TrainError::FeatureMismatch { expected, got } => {
                write!(f, "feature matrix covers {got} states, mdp has {expected}")
            }
            TrainError::NoTrajectories => write!(f, "training needs at least one trajectory"),
            TrainError::Diverged { iteration } => {
                write!(f, "objective became non-finite at iteration {iteration}")
            }
        }
    }
}

impl core::error::Error for TrainError {}

impl From<MdpError> for TrainError {
    fn from(e: MdpError) -> Self {
        TrainError::Mdp(e)
    }
}

impl From<ApproxError> for TrainError {
    fn from(e: ApproxError) -> Self {
        TrainError::Approx(e)
    }
}

impl From<BackupError> for TrainError {
    fn from(e: BackupError) -> Self {
        TrainError::Backup(e)
    }
}

/// Training hyperparameters. `tol` is the absolute objective change that
/// counts as converged; `early_stop_window = 0` disables holdout stopping;
/// `momentum = 0` is plain gradient ascent.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(default))]
pub struct FairlConfig {
    pub b: f64,
    pub backup: BackupOperator,
    pub motion_model: MotionModel,
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub tol: f64,
    pub early_stop_window: usize,
    pub momentum: f64,
}

impl Default for FairlConfig {
    fn default() -> Self {
        FairlConfig {
            b: 1.0,
            backup: BackupOperator::Max,
            motion_model: MotionModel::QBased,
            learning_rate: 0.01,
            max_iterations: 500,
            tol: 1e-6,
            early_stop_window: 0,
            momentum: 0.0,
        }
    }
}

impl FairlConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if !self.b.is_finite() {
            return Err(TrainError::Config {
                what: "b must be finite",
            });
        }
        self.backup.validate()?;
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(TrainError::Config {
                what: "learning_rate must be positive",
            });
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(TrainError::Config {
                what: "tol must be positive",
            });
        }
        if !(self.momentum >= 0.0 && self.momentum < 1.0) {
            return Err(TrainError::Config {
                what: "momentum must lie in [0, 1)",
            });
        }
        Ok(())
    }
}

/// Action values induced by a per-state scalar function:
/// `Q(s,a) = sum_s' P(s'|s,a) f(s')`.
pub fn q_from_f(mdp: &Mdp, f: &[f64]) -> Result<QTable, MdpError> {
    if f.len() != mdp.n_states() {
        return Err(MdpError::LengthMismatch {
            what: "f",
            expected: mdp.n_states(),
            got: f.len(),
        });
    }
    let mut q = QTable::zeros(mdp.n_states(), mdp.n_actions());
    for s in 0..mdp.n_states() {
        let row = q.row_mut(s);
        for (a, slot) in row.iter_mut().enumerate() {
            *slot = mdp.expected_over_successors(s, a, f);
        }
    }
    Ok(q)
}

/// State values: the backup of each Q row.
pub fn v_from_q(q: &QTable, op: &BackupOperator) -> Vec<f64> {
    (0..q.n_states()).map(|s| op.apply(q.row(s))).collect()
}

/// The reward that makes the construction consistent:
/// `r(s) = f(s) - gamma * V(s)`.
pub fn r_from_f(mdp: &Mdp, f: &[f64], op: &BackupOperator) -> Result<Vec<f64>, MdpError> {
    let q = q_from_f(mdp, f)?;
    let v = v_from_q(&q, op);
    Ok(f.iter()
        .zip(v.iter())
        .map(|(fi, vi)| fi - mdp.gamma() * vi)
        .collect())
}

/// Demonstration log-likelihood under the Boltzmann action model at
/// inverse temperature `b`, given the action values.
pub fn log_likelihood(
    trajectories: &[Trajectory],
    q: &QTable,
    b: f64,
) -> Result<f64, MdpError> {
    if !b.is_finite() {
        return Err(MdpError::NonFinite { what: "b" });
    }
    let mut total = 0.0;
    for trajectory in trajectories {
        for &(s, a) in &trajectory.steps {
            if s >= q.n_states() || a >= q.n_actions() {
                return Err(MdpError::StepOutOfRange { step: 0, state: s, action: a });
            }
            let row = q.row(s);
            let top = row.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(b * x));
            let lse: f64 = top
                + math::ln(row.iter().map(|&x| math::exp(b * x - top)).sum::<f64>());
            total += b * row[a] - lse;
        }
    }
    Ok(total)
}

/// Log-probability of one action under a motion model, evaluated from the
/// scalar state function `f`. The slow reference path: one state at a time,
/// no caching. The trainer uses the batched engine below; tests hold the
/// two against each other.
pub fn action_log_prob(
    motion: MotionModel,
    mdp: &Mdp,
    f: &[f64],
    op: &BackupOperator,
    b: f64,
    state: usize,
    action: usize,
) -> Result<f64, MdpError> {
    if f.len() != mdp.n_states() {
        return Err(MdpError::LengthMismatch {
            what: "f",
            expected: mdp.n_states(),
            got: f.len(),
        });
    }
    if state >= mdp.n_states() || action >= mdp.n_actions() {
        return Err(MdpError::StepOutOfRange { step: 0, state, action });
    }
    let q_row: Vec<f64> = (0..mdp.n_actions())
        .map(|a| mdp.expected_over_successors(state, a, f))
        .collect();
    match motion {
        MotionModel::QBased => {
            let p = boltzmann_distribution(&q_row, b);
            Ok(math::ln(p[action]))
        }
        MotionModel::RewardBased => Ok(q_row[action] - op.apply(&q_row)),
        MotionModel::ValueBased => {
            // Expected successor value per action, scored by softmax of its
            // negation: demonstrators prefer actions whose successors still
            // have work left to do under the instruction-following reading.
            let v_succ: Vec<f64> = (0..mdp.n_actions())
                .map(|a| {
                    mdp.successors(state, a)
                        .iter()
                        .map(|&(next, prob)| {
                            let row: Vec<f64> = (0..mdp.n_actions())
                                .map(|a2| mdp.expected_over_successors(next, a2, f))
                                .collect();
                            prob * op.apply(&row)
                        })
                        .sum()
                })
                .collect();
            let neg: Vec<f64> = v_succ.iter().map(|v| -v).collect();
            let top = neg.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
            let lse =
                top + math::ln(neg.iter().map(|&x| math::exp(x - top)).sum::<f64>());
            Ok(neg[action] - lse)
        }
    }
}

/// Per-(state, action) visit counts of a trajectory set.
#[derive(Clone, Debug)]
pub struct VisitCounts {
    n_sa: Vec<f64>,
    n_s: Vec<f64>,
    visited: Vec<usize>,
    total: f64,
}

impl VisitCounts {
    pub fn from_trajectories(
        mdp: &Mdp,
        trajectories: &[Trajectory],
    ) -> Result<Self, MdpError> {
        let n_actions = mdp.n_actions();
        let mut n_sa = vec![0.0; mdp.n_states() * n_actions];
        let mut n_s = vec![0.0; mdp.n_states()];
        let mut total = 0.0;
        for trajectory in trajectories {
            trajectory.validate(mdp)?;
            for &(s, a) in &trajectory.steps {
                n_sa[s * n_actions + a] += 1.0;
                n_s[s] += 1.0;
                total += 1.0;
            }
        }
        let visited = (0..mdp.n_states()).filter(|&s| n_s[s] > 0.0).collect();
        Ok(VisitCounts {
            n_sa,
            n_s,
            visited,
            total,
        })
    }

    pub fn total_steps(&self) -> f64 {
        self.total
    }

    /// States with at least one visit, ascending.
    pub fn visited_states(&self) -> &[usize] {
        &self.visited
    }

    fn count(&self, n_actions: usize, s: usize, a: usize) -> f64 {
        self.n_sa[s * n_actions + a]
    }
}

/// Objective value and its parameter gradient at the approximator's current
/// parameters.
#[derive(Clone, Debug)]
pub struct Objective {
    /// Data term plus prior: what training ascends.
    pub value: f64,
    pub data_term: f64,
    pub prior_term: f64,
    pub gradient: Vec<f64>,
}

/// Computes the demonstration objective and its exact gradient in one pass.
///
/// The chain rule is accumulated as `dL/dQ(s,a)` only at rows that carry
/// probability mass, pushed through the transition model into one scalar
/// per state (`c_s = dL/df(s)`), and closed with a single weighted
/// differentiation of the approximator.
pub fn objective_gradient<A: VrFunction + ?Sized>(
    approx: &A,
    mdp: &Mdp,
    features: &Features,
    counts: &VisitCounts,
    config: &FairlConfig,
) -> Result<Objective, TrainError> {
    config.validate()?;
    if features.n_states() != mdp.n_states() {
        return Err(TrainError::FeatureMismatch {
            expected: mdp.n_states(),
            got: features.n_states(),
        });
    }

    let n_states = mdp.n_states();
    let n_actions = mdp.n_actions();
    let f = evaluate_all(approx, features);
    if f.iter().any(|v| !v.is_finite()) {
        return Err(TrainError::Diverged { iteration: 0 });
    }
    let q = q_from_f(mdp, &f)?;

    let mut data_term = 0.0;
    // dL/dQ, dense but touched only at rows listed in `touched`.
    let mut dq = vec![0.0; n_states * n_actions];
    let mut touched: Vec<usize> = Vec::new();

    match config.motion_model {
        MotionModel::QBased => {
            let b = config.b;
            for &s in counts.visited_states() {
                let row = q.row(s);
                let pi = boltzmann_distribution(row, b);
                let n_s = counts.n_s[s];
                let top = row.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(b * x));
                let lse: f64 = top
                    + math::ln(row.iter().map(|&x| math::exp(b * x - top)).sum::<f64>());
                for a in 0..n_actions {
                    let n_sa = counts.count(n_actions, s, a);
                    if n_sa > 0.0 {
                        data_term += n_sa * (b * row[a] - lse);
                    }
                    dq[s * n_actions + a] = b * (n_sa - n_s * pi[a]);
                }
                touched.push(s);
            }
        }
        MotionModel::RewardBased => {
            for &s in counts.visited_states() {
                let row = q.row(s);
                let v = config.backup.apply(row);
                let g = config.backup.gradient(row);
                let n_s = counts.n_s[s];
                for a in 0..n_actions {
                    let n_sa = counts.count(n_actions, s, a);
                    if n_sa > 0.0 {
                        data_term += n_sa * (row[a] - v);
                    }
                    dq[s * n_actions + a] = n_sa - n_s * g[a];
                }
                touched.push(s);
            }
        }
        MotionModel::ValueBased => {
            // Two-hop chain: L depends on V at successors of visited
            // states, and V at a state depends on its own Q row.
            let v = v_from_q(&q, &config.backup);
            let mut dv = vec![0.0; n_states];
            for &s in counts.visited_states() {
                let q_bar: Vec<f64> = (0..n_actions)
                    .map(|a| mdp.expected_over_successors(s, a, &v))
                    .collect();
                let neg: Vec<f64> = q_bar.iter().map(|x| -x).collect();
                let top = neg.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
                let lse = top
                    + math::ln(neg.iter().map(|&x| math::exp(x - top)).sum::<f64>());
                let n_s = counts.n_s[s];
                for (a, &neg_a) in neg.iter().enumerate() {
                    let n_sa = counts.count(n_actions, s, a);
                    if n_sa > 0.0 {
                        data_term += n_sa * (neg_a - lse);
                    }
                    // d(data)/d q_bar[a], then spread over successors.
                    let sigma = math::exp(neg_a - lse);
                    let coeff = -n_sa + n_s * sigma;
                    if coeff != 0.0 {
                        for &(next, prob) in mdp.successors(s, a) {
                            dv[next] += coeff * prob;
                        }
                    }
                }
            }
            for k in 0..n_states {
                if dv[k] != 0.0 {
                    let g = config.backup.gradient(q.row(k));
                    for a in 0..n_actions {
                        dq[k * n_actions + a] = dv[k] * g[a];
                    }
                    touched.push(k);
                }
            }
        }
    }

    // c_s' = sum over touched rows of dL/dQ(s,a) * P(s'|s,a).
    let mut c = vec![0.0; n_states];
    for &s in &touched {
        for a in 0..n_actions {
            let weight = dq[s * n_actions + a];
            if weight == 0.0 {
                continue;
            }
            for &(next, prob) in mdp.successors(s, a) {
                c[next] += weight * prob;
            }
        }
    }
    let weights: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0.0)
        .map(|(s, &w)| (s, w))
        .collect();

    let mut gradient = approx.weighted_param_gradient(features, &weights);
    let prior_term = approx.log_prior();
    approx.add_prior_gradient(&mut gradient);

    Ok(Objective {
        value: data_term + prior_term,
        data_term,
        prior_term,
        gradient,
    })
}

/// One trainer iteration as seen by an observer callback.
#[derive(Clone, Copy, Debug)]
pub struct TrainStep {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
}

/// What happened during training.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TrainReport {
    /// Objective value at the start of each iteration, in order.
    pub loglik_history: Vec<f64>,
    pub iterations: usize,
    /// Whether the absolute objective change fell below `tol`.
    pub converged: bool,
    /// Whether the holdout window cut training short.
    pub stopped_early: bool,
    pub final_grad_norm: f64,
}

/// Final constructions alongside the report. `f`, `q`, `v`, `reward` are
/// all evaluated at the trained parameters, so the optimality identity
/// holds between them.
#[derive(Clone, Debug)]
pub struct TrainResult {
    pub f: Vec<f64>,
    pub q: QTable,
    pub v: Vec<f64>,
    pub reward: Vec<f64>,
    pub report: TrainReport,
}

fn l2_norm(v: &[f64]) -> f64 {
    math::sqrt(v.iter().map(|x| x * x).sum())
}

/// Gradient-ascent training of any `VrFunction` on demonstration
/// trajectories. `observer` sees each iteration; pass `|_| {}` when
/// nothing needs to watch.
pub fn train<A, Obs>(
    approx: &mut A,
    mdp: &Mdp,
    features: &Features,
    trajectories: &[Trajectory],
    config: &FairlConfig,
    mut observer: Obs,
) -> Result<TrainResult, TrainError>
where
    A: VrFunction + ?Sized,
    Obs: FnMut(TrainStep),
{
    config.validate()?;
    if trajectories.is_empty() {
        return Err(TrainError::NoTrajectories);
    }
    let counts = VisitCounts::from_trajectories(mdp, trajectories)?;

    // Holdout split for early stopping: every fifth trajectory, falling
    // back to the full set when that leaves either side empty.
    let holdout_counts = if config.early_stop_window > 0 {
        let holdout: Vec<Trajectory> = trajectories
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 5 == 0)
            .map(|(_, t)| t.clone())
            .collect();
        if holdout.len() == trajectories.len() || holdout.is_empty() {
            Some(counts.clone())
        } else {
            Some(VisitCounts::from_trajectories(mdp, &holdout)?)
        }
    } else {
        None
    };

    let mut history = Vec::new();
    let mut previous: Option<f64> = None;
    let mut converged = false;
    let mut stopped_early = false;
    let mut final_grad_norm = 0.0;
    let mut velocity = vec![0.0; approx.n_params()];
    let mut best_holdout = f64::NEG_INFINITY;
    let mut best_params: Option<Vec<f64>> = None;
    let mut since_best = 0usize;
    let mut iterations = 0;

    for iteration in 0..config.max_iterations {
        let objective = objective_gradient(approx, mdp, features, &counts, config)
            .map_err(|e| match e {
                TrainError::Diverged { .. } => TrainError::Diverged { iteration },
                other => other,
            })?;
        if !objective.value.is_finite() {
            return Err(TrainError::Diverged { iteration });
        }
        history.push(objective.value);
        final_grad_norm = l2_norm(&objective.gradient);
        iterations = iteration + 1;
        observer(TrainStep {
            iteration,
            objective: objective.value,
            grad_norm: final_grad_norm,
        });

        if let Some(prev) = previous {
            if math::abs(objective.value - prev) < config.tol {
                converged = true;
                break;
            }
        }
        previous = Some(objective.value);

        if let Some(holdout) = &holdout_counts {
            let held = objective_gradient(approx, mdp, features, holdout, config)?;
            if held.data_term > best_holdout {
                best_holdout = held.data_term;
                best_params = Some(approx.params());
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= config.early_stop_window {
                    stopped_early = true;
                    break;
                }
            }
        }

        let mut params = approx.params();
        for ((p, v), g) in params
            .iter_mut()
            .zip(velocity.iter_mut())
            .zip(objective.gradient.iter())
        {
            *v = config.momentum * *v + g;
            *p += config.learning_rate * *v;
        }
        approx.set_params(&params).map_err(|e| match e {
            ApproxError::NonFiniteParams => TrainError::Diverged { iteration },
            other => TrainError::Approx(other),
        })?;
    }

    // With holdout tracking on, the trained model is the best-on-holdout
    // iterate no matter how the loop ended; a late collapse must not leak
    // into the returned constructions.
    if let Some(best) = best_params {
        approx.set_params(&best)?;
    }

    let f = evaluate_all(approx, features);
    if f.iter().any(|v| !v.is_finite()) {
        return Err(TrainError::Diverged {
            iteration: iterations,
        });
    }
    let q = q_from_f(mdp, &f)?;
    let v = v_from_q(&q, &config.backup);
    let reward: Vec<f64> = f
        .iter()
        .zip(v.iter())
        .map(|(fi, vi)| fi - mdp.gamma() * vi)
        .collect();

    Ok(TrainResult {
        f,
        q,
        v,
        reward,
        report: TrainReport {
            loglik_history: history,
            iterations,
            converged,
            stopped_early,
            final_grad_norm,
        },
    })
}

/// Network shape for `train_nn`. `hidden_layers = None` uses three hidden
/// layers as wide as the feature vector.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(default))]
pub struct NnSpec {
    pub hidden_layers: Option<Vec<usize>>,
    pub seed: u64,
}

/// Trains a fresh network on an environment's features and returns it with
/// the final constructions.
pub fn train_nn(
    env: &crate::envs::EnvBundle,
    trajectories: &[Trajectory],
    spec: &NnSpec,
    config: &FairlConfig,
) -> Result<(crate::approx::Mlp, TrainResult), TrainError> {
    let d = env.features.dim();
    let mut layer_sizes = vec![d];
    match &spec.hidden_layers {
        Some(hidden) => layer_sizes.extend_from_slice(hidden),
        None => layer_sizes.extend_from_slice(&[d, d, d]),
    }
    layer_sizes.push(1);
    let mut net = crate::approx::Mlp::new(&layer_sizes, spec.seed)?;
    let result = train(
        &mut net,
        &env.mdp,
        &env.features,
        trajectories,
        config,
        |_| {},
    )?;
    Ok((net, result))
}

/// GP construction knobs for `train_gp`.
#[derive(Clone, Debug, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(default))]
pub struct GpSpec {
    pub gp: crate::approx::gp::GpConfig,
    pub seed: u64,
}

/// Trains a fresh sparse GP (random supporting states) on an environment.
pub fn train_gp(
    env: &crate::envs::EnvBundle,
    trajectories: &[Trajectory],
    spec: &GpSpec,
    config: &FairlConfig,
) -> Result<(crate::approx::SparseGp, TrainResult), TrainError> {
    let mut gp = crate::approx::SparseGp::with_random_support(&env.features, &spec.gp, spec.seed)?;
    let result = train(
        &mut gp,
        &env.mdp,
        &env.features,
        trajectories,
        config,
        |_| {},
    )?;
    Ok((gp, result))
}
