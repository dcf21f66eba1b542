//! Finite MDPs with sparse transitions, value iteration, and trajectory
//! sampling.
//!
//! Rewards live on successor states throughout: the action value of `(s, a)`
//! is the transition-weighted average of `r(s') + gamma * V(s')`. Every
//! consumer in this crate assumes that convention.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// Sup-norm change between sweeps below which value iteration stops.
pub const DEFAULT_VI_TOL: f64 = 1e-8;
/// Sweep budget after which value iteration gives up and reports
/// `converged = false`.
pub const DEFAULT_VI_MAX_SWEEPS: usize = 10_000;

/// Tolerance on transition-row probability sums.
const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum MdpError {
    NoStates,
    NoActions,
    InvalidGamma {
        gamma: f64,
    },
    WrongRowCount {
        expected: usize,
        got: usize,
    },
    SuccessorOutOfRange {
        state: usize,
        action: usize,
        next: usize,
    },
    BadProbability {
        state: usize,
        action: usize,
        prob: f64,
    },
    RowSumMismatch {
        state: usize,
        action: usize,
        sum: f64,
    },
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    NonFinite {
        what: &'static str,
    },
    InvalidArgument {
        what: &'static str,
    },
    EmptyTrajectory,
    StepOutOfRange {
        step: usize,
        state: usize,
        action: usize,
    },
}

impl fmt::Display for MdpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MdpError::NoStates => write!(f, "mdp needs at least one state"),
            MdpError::NoActions => write!(f, "mdp needs at least one action"),
            MdpError::InvalidGamma { gamma } => {
                write!(f, "discount must lie in [0, 1), got {gamma}")
            }
            MdpError::WrongRowCount { expected, got } => {
                write!(f, "expected {expected} transition rows, got {got}")
            }
            MdpError::SuccessorOutOfRange {
                state,
                action,
                next,
            } => write!(
                f,
                "transition ({state}, {action}) names successor {next} outside the state space"
            ),
            MdpError::BadProbability {
                state,
                action,
                prob,
            } => write!(
                f,
                "transition ({state}, {action}) carries invalid probability {prob}"
            ),
            MdpError::RowSumMismatch { state, action, sum } => write!(
                f,
                "transition row ({state}, {action}) sums to {sum}, expected 1"
            ),
            MdpError::LengthMismatch {
                what,
                expected,
                got,
            } => write!(f, "{what} has length {got}, expected {expected}"),
            MdpError::NonFinite { what } => write!(f, "{what} contains non-finite values"),
            MdpError::InvalidArgument { what } => write!(f, "invalid argument: {what}"),
            MdpError::EmptyTrajectory => write!(f, "trajectory has no steps"),
            MdpError::StepOutOfRange {
                step,
                state,
                action,
            } => write!(
                f,
                "trajectory step {step} = ({state}, {action}) is outside the mdp"
            ),
        }
    }
}

impl core::error::Error for MdpError {}

/// Finite MDP with sparse transition rows, one row per `(state, action)`.
///
/// Rows are stored in CSR form and validated at construction: probabilities
/// nonnegative and finite, successors in range, each row summing to one
/// within `1e-12`. Zero-probability entries are dropped.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(try_from = "MdpRepr", into = "MdpRepr")
)]
pub struct Mdp {
    n_states: usize,
    n_actions: usize,
    gamma: f64,
    row_ptr: Vec<usize>,
    entries: Vec<(usize, f64)>,
}

/// Serialized form: one explicit successor list per `(state, action)` row,
/// indexed `state * n_actions + action`. Revalidated on deserialization.
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Clone, Debug)]
pub struct MdpRepr {
    pub n_states: usize,
    pub n_actions: usize,
    pub gamma: f64,
    pub transitions: Vec<Vec<(usize, f64)>>,
}

impl TryFrom<MdpRepr> for Mdp {
    type Error = MdpError;

    fn try_from(repr: MdpRepr) -> Result<Self, MdpError> {
        Mdp::new(repr.n_states, repr.n_actions, repr.gamma, repr.transitions)
    }
}

impl From<Mdp> for MdpRepr {
    fn from(mdp: Mdp) -> MdpRepr {
        let transitions = (0..mdp.n_states * mdp.n_actions)
            .map(|row| mdp.entries[mdp.row_ptr[row]..mdp.row_ptr[row + 1]].to_vec())
            .collect();
        MdpRepr {
            n_states: mdp.n_states,
            n_actions: mdp.n_actions,
            gamma: mdp.gamma,
            transitions,
        }
    }
}

impl Mdp {
    /// Builds an MDP from explicit successor lists, one per `(state, action)`
    /// pair in row-major order (`state * n_actions + action`).
    pub fn new(
        n_states: usize,
        n_actions: usize,
        gamma: f64,
        transitions: Vec<Vec<(usize, f64)>>,
    ) -> Result<Self, MdpError> {
        if n_states == 0 {
            return Err(MdpError::NoStates);
        }
        if n_actions == 0 {
            return Err(MdpError::NoActions);
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(MdpError::InvalidGamma { gamma });
        }
        let n_rows = n_states * n_actions;
        if transitions.len() != n_rows {
            return Err(MdpError::WrongRowCount {
                expected: n_rows,
                got: transitions.len(),
            });
        }

        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut entries = Vec::new();
        row_ptr.push(0);
        for (row, list) in transitions.iter().enumerate() {
            let state = row / n_actions;
            let action = row % n_actions;
            let mut sum = 0.0;
            for &(next, prob) in list {
                if next >= n_states {
                    return Err(MdpError::SuccessorOutOfRange {
                        state,
                        action,
                        next,
                    });
                }
                if !prob.is_finite() || prob < 0.0 {
                    return Err(MdpError::BadProbability {
                        state,
                        action,
                        prob,
                    });
                }
                sum += prob;
                if prob > 0.0 {
                    entries.push((next, prob));
                }
            }
            if math::abs(sum - 1.0) > ROW_SUM_TOL {
                return Err(MdpError::RowSumMismatch { state, action, sum });
            }
            row_ptr.push(entries.len());
        }

        Ok(Mdp {
            n_states,
            n_actions,
            gamma,
            row_ptr,
            entries,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Successor list of `(state, action)` as `(next_state, probability)`
    /// pairs. Probabilities are positive and sum to one.
    pub fn successors(&self, state: usize, action: usize) -> &[(usize, f64)] {
        let row = state * self.n_actions + action;
        &self.entries[self.row_ptr[row]..self.row_ptr[row + 1]]
    }

    /// Transition-weighted average of a per-state quantity.
    pub fn expected_over_successors(&self, state: usize, action: usize, values: &[f64]) -> f64 {
        self.successors(state, action)
            .iter()
            .map(|&(next, prob)| prob * values[next])
            .sum()
    }

    fn check_state_vector(&self, what: &'static str, values: &[f64]) -> Result<(), MdpError> {
        if values.len() != self.n_states {
            return Err(MdpError::LengthMismatch {
                what,
                expected: self.n_states,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MdpError::NonFinite { what });
        }
        Ok(())
    }
}

/// Dense action-value table, `n_states` rows of `n_actions` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    n_states: usize,
    n_actions: usize,
    data: Vec<f64>,
}

impl QTable {
    pub fn zeros(n_states: usize, n_actions: usize) -> Self {
        QTable {
            n_states,
            n_actions,
            data: vec![0.0; n_states * n_actions],
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.data[state * self.n_actions..(state + 1) * self.n_actions]
    }

    pub fn row_mut(&mut self, state: usize) -> &mut [f64] {
        &mut self.data[state * self.n_actions..(state + 1) * self.n_actions]
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.data[state * self.n_actions + action]
    }

    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        self.data[state * self.n_actions + action] = value;
    }
}

/// Result of value iteration. `v` and `q` come from the same final sweep, so
/// `v[s] == max_a q[s][a]` exactly; the Bellman residual of `q` against `v`
/// is bounded by `gamma * residual`.
#[derive(Clone, Debug)]
pub struct ValueIteration {
    pub v: Vec<f64>,
    pub q: QTable,
    pub sweeps: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Solves for optimal values of `mdp` under successor reward `reward` by
/// repeated Bellman backups from `v = 0`.
///
/// Non-convergence within `max_sweeps` is not an error; the caller inspects
/// `converged`.
pub fn value_iteration(
    mdp: &Mdp,
    reward: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<ValueIteration, MdpError> {
    mdp.check_state_vector("reward", reward)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MdpError::InvalidArgument {
            what: "tol must be positive and finite",
        });
    }
    if max_sweeps == 0 {
        return Err(MdpError::InvalidArgument {
            what: "max_sweeps must be at least 1",
        });
    }

    let n_states = mdp.n_states();
    let n_actions = mdp.n_actions();
    let gamma = mdp.gamma();
    let mut v = vec![0.0; n_states];
    let mut v_next = vec![0.0; n_states];
    let mut q = QTable::zeros(n_states, n_actions);
    let mut sweeps = 0;
    let mut residual = f64::INFINITY;
    let mut converged = false;

    while sweeps < max_sweeps {
        residual = 0.0;
        for s in 0..n_states {
            let row = q.row_mut(s);
            for (a, slot) in row.iter_mut().enumerate() {
                *slot = mdp
                    .successors(s, a)
                    .iter()
                    .map(|&(next, prob)| prob * (reward[next] + gamma * v[next]))
                    .sum();
            }
            let best = row.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
            v_next[s] = best;
            residual = residual.max(math::abs(best - v[s]));
        }
        core::mem::swap(&mut v, &mut v_next);
        sweeps += 1;
        if residual < tol {
            converged = true;
            break;
        }
    }

    Ok(ValueIteration {
        v,
        q,
        sweeps,
        residual,
        converged,
    })
}

/// Deterministic greedy policy: per state, the lowest-index maximizing
/// action.
pub fn greedy_policy(q: &QTable) -> Vec<usize> {
    (0..q.n_states())
        .map(|s| {
            let row = q.row(s);
            let mut best = 0;
            for (a, &value) in row.iter().enumerate().skip(1) {
                if value > row[best] {
                    best = a;
                }
            }
            best
        })
        .collect()
}

/// Boltzmann action distribution over one Q row: `p_a` proportional to
/// `exp(b * q_a)`. Computed with max subtraction, so any finite `b * q` is
/// safe. Invariant under adding a constant to the row.
pub fn boltzmann_distribution(q_row: &[f64], b: f64) -> Vec<f64> {
    assert!(!q_row.is_empty(), "boltzmann over an empty action set");
    assert!(b.is_finite(), "boltzmann inverse temperature must be finite");
    let top = q_row
        .iter()
        .fold(f64::NEG_INFINITY, |m, &q| m.max(b * q));
    let weights: Vec<f64> = q_row.iter().map(|&q| math::exp(b * q - top)).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// One demonstration episode as `(state, action)` steps.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Trajectory {
    pub steps: Vec<(usize, usize)>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks the trajectory is nonempty and every step indexes into `mdp`.
    pub fn validate(&self, mdp: &Mdp) -> Result<(), MdpError> {
        if self.steps.is_empty() {
            return Err(MdpError::EmptyTrajectory);
        }
        for (i, &(state, action)) in self.steps.iter().enumerate() {
            if state >= mdp.n_states() || action >= mdp.n_actions() {
                return Err(MdpError::StepOutOfRange {
                    step: i,
                    state,
                    action,
                });
            }
        }
        Ok(())
    }
}

fn sample_categorical<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn sample_successor<R: Rng>(rng: &mut R, successors: &[(usize, f64)]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(next, prob) in successors {
        acc += prob;
        if u < acc {
            return next;
        }
    }
    successors[successors.len() - 1].0
}

/// Samples `count` episodes of exactly `horizon` steps each. Initial states
/// are uniform over the state space; actions follow the Boltzmann
/// distribution of the given Q table at inverse temperature `b`; successors
/// follow the transition model. Fully determined by `seed`.
pub fn sample_trajectories(
    mdp: &Mdp,
    q: &QTable,
    b: f64,
    count: usize,
    horizon: usize,
    seed: u64,
) -> Result<Vec<Trajectory>, MdpError> {
    if q.n_states() != mdp.n_states() || q.n_actions() != mdp.n_actions() {
        return Err(MdpError::InvalidArgument {
            what: "q table dimensions must match the mdp",
        });
    }
    if horizon == 0 {
        return Err(MdpError::InvalidArgument {
            what: "horizon must be at least 1",
        });
    }
    if !b.is_finite() {
        return Err(MdpError::NonFinite { what: "b" });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let policies: Vec<Vec<f64>> = (0..mdp.n_states())
        .map(|s| boltzmann_distribution(q.row(s), b))
        .collect();

    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut state = rng.random_range(0..mdp.n_states());
        let mut steps = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let action = sample_categorical(&mut rng, &policies[state]);
            steps.push((state, action));
            state = sample_successor(&mut rng, mdp.successors(state, action));
        }
        out.push(Trajectory { steps });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two states, one action, state 1 absorbing with reward 1, gamma 0.5.
    fn two_state_chain() -> Mdp {
        Mdp::new(
            2,
            1,
            0.5,
            vec![vec![(1, 1.0)], vec![(1, 1.0)]],
        )
        .unwrap()
    }

    /// Two states, actions stay/go, reward only on state 1, gamma 0.5.
    fn toggle_mdp() -> Mdp {
        Mdp::new(
            2,
            2,
            0.5,
            vec![
                vec![(0, 1.0)], // stay at 0
                vec![(1, 1.0)], // go to 1
                vec![(1, 1.0)], // stay at 1
                vec![(0, 1.0)], // go to 0
            ],
        )
        .unwrap()
    }

    #[test]
    fn chain_values() {
        let mdp = two_state_chain();
        let out = value_iteration(&mdp, &[0.0, 1.0], 1e-10, 10_000).unwrap();
        assert!(out.converged);
        assert!(math::abs(out.v[0] - 2.0) < 1e-8, "v = {:?}", out.v);
        assert!(math::abs(out.v[1] - 2.0) < 1e-8);
    }

    #[test]
    fn toggle_values_and_policy() {
        let mdp = toggle_mdp();
        let out = value_iteration(&mdp, &[0.0, 1.0], 1e-10, 10_000).unwrap();
        assert!(out.converged);
        // Hand solution: V = [2, 2], Q(0,.) = [1, 2], Q(1,.) = [2, 1].
        for (got, want) in out.v.iter().zip([2.0, 2.0]) {
            assert!(math::abs(got - want) < 1e-8);
        }
        for (got, want) in out.q.row(0).iter().zip([1.0, 2.0]) {
            assert!(math::abs(got - want) < 1e-8);
        }
        for (got, want) in out.q.row(1).iter().zip([2.0, 1.0]) {
            assert!(math::abs(got - want) < 1e-8);
        }
        assert_eq!(greedy_policy(&out.q), vec![1, 0]);
    }

    /// Exact policy evaluation for a deterministic policy, solving
    /// (I - gamma P) V = P r by Gaussian elimination. Independent of the
    /// sweep-based solver above.
    #[allow(clippy::needless_range_loop)]
    fn evaluate_policy(mdp: &Mdp, reward: &[f64], policy: &[usize]) -> Vec<f64> {
        let n = mdp.n_states();
        let mut a = vec![vec![0.0; n + 1]; n];
        for s in 0..n {
            a[s][s] = 1.0;
            for &(next, prob) in mdp.successors(s, policy[s]) {
                a[s][next] -= mdp.gamma() * prob;
                a[s][n] += prob * reward[next];
            }
        }
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| math::abs(a[i][col]).total_cmp(&math::abs(a[j][col])))
                .unwrap();
            a.swap(col, pivot);
            let p = a[col][col];
            for k in col..=n {
                a[col][k] /= p;
            }
            for row in 0..n {
                if row != col {
                    let factor = a[row][col];
                    for k in col..=n {
                        a[row][k] -= factor * a[col][k];
                    }
                }
            }
        }
        (0..n).map(|s| a[s][n]).collect()
    }

    /// Optimal values equal the pointwise-best deterministic policy values.
    /// Checked by enumerating every policy on a small stochastic MDP.
    #[test]
    fn value_iteration_matches_exhaustive_policy_enumeration() {
        let mdp = Mdp::new(
            4,
            2,
            0.8,
            vec![
                vec![(1, 0.7), (2, 0.3)],
                vec![(3, 1.0)],
                vec![(0, 0.5), (2, 0.5)],
                vec![(1, 0.2), (3, 0.8)],
                vec![(2, 1.0)],
                vec![(0, 0.1), (3, 0.9)],
                vec![(3, 0.6), (0, 0.4)],
                vec![(2, 1.0)],
            ],
        )
        .unwrap();
        let reward = [0.25, -1.0, 0.5, 2.0];

        let mut best = [f64::NEG_INFINITY; 4];
        for code in 0..(2usize.pow(4)) {
            let policy: Vec<usize> = (0..4).map(|s| (code >> s) & 1).collect();
            let v = evaluate_policy(&mdp, &reward, &policy);
            for (b, got) in best.iter_mut().zip(&v) {
                *b = b.max(*got);
            }
        }

        let out = value_iteration(&mdp, &reward, 1e-10, 10_000).unwrap();
        assert!(out.converged);
        for (s, (vi, enumerated)) in out.v.iter().zip(&best).enumerate() {
            assert!(
                math::abs(vi - enumerated) < 1e-6,
                "state {s}: vi {vi} vs enumerated {enumerated}"
            );
        }
    }

    #[test]
    fn returned_pair_is_internally_consistent() {
        let mdp = toggle_mdp();
        let reward = [0.3, -0.7];
        let tol = 1e-9;
        let out = value_iteration(&mdp, &reward, tol, 10_000).unwrap();
        for s in 0..2 {
            let best = out.q.row(s).iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
            assert_eq!(out.v[s], best, "v must be the exact row max");
            for a in 0..2 {
                let backup: f64 = mdp
                    .successors(s, a)
                    .iter()
                    .map(|&(next, prob)| prob * (reward[next] + mdp.gamma() * out.v[next]))
                    .sum();
                assert!(math::abs(out.q.get(s, a) - backup) <= 10.0 * tol);
            }
        }
    }

    #[test]
    fn non_convergence_is_reported_not_raised() {
        let mdp = two_state_chain();
        let out = value_iteration(&mdp, &[0.0, 1.0], 1e-12, 3).unwrap();
        assert!(!out.converged);
        assert_eq!(out.sweeps, 3);
        assert!(out.residual >= 1e-12);
    }

    #[test]
    fn row_sum_is_checked() {
        let err = Mdp::new(2, 1, 0.9, vec![vec![(0, 0.5), (1, 0.4)], vec![(1, 1.0)]]).unwrap_err();
        match err {
            MdpError::RowSumMismatch { state: 0, action: 0, sum } => {
                assert!(math::abs(sum - 0.9) < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn successor_bounds_are_checked() {
        let err = Mdp::new(2, 1, 0.9, vec![vec![(2, 1.0)], vec![(1, 1.0)]]).unwrap_err();
        assert!(matches!(err, MdpError::SuccessorOutOfRange { next: 2, .. }));
    }

    #[test]
    fn greedy_breaks_ties_toward_lower_index() {
        let mut q = QTable::zeros(1, 3);
        q.set(0, 0, 1.0);
        q.set(0, 1, 2.0);
        q.set(0, 2, 2.0);
        assert_eq!(greedy_policy(&q), vec![1]);
    }

    #[test]
    fn boltzmann_hand_case() {
        // exp(0) : exp(ln 3) = 1 : 3.
        let p = boltzmann_distribution(&[0.0, math::ln(3.0)], 1.0);
        assert!(math::abs(p[0] - 0.25) < 1e-12);
        assert!(math::abs(p[1] - 0.75) < 1e-12);
    }

    #[test]
    fn boltzmann_survives_large_magnitudes() {
        let p = boltzmann_distribution(&[1e4, -1e4], 100.0);
        assert!(p[0] > 1.0 - 1e-12);
        assert!(p.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let mdp = toggle_mdp();
        let out = value_iteration(&mdp, &[0.0, 1.0], 1e-10, 10_000).unwrap();
        let a = sample_trajectories(&mdp, &out.q, 1.0, 5, 7, 42).unwrap();
        let b = sample_trajectories(&mdp, &out.q, 1.0, 5, 7, 42).unwrap();
        let c = sample_trajectories(&mdp, &out.q, 1.0, 5, 7, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 5);
        for t in &a {
            assert_eq!(t.len(), 7);
            t.validate(&mdp).unwrap();
        }
    }

    #[test]
    fn near_greedy_at_large_b() {
        let mdp = toggle_mdp();
        let out = value_iteration(&mdp, &[0.0, 1.0], 1e-10, 10_000).unwrap();
        let policy = greedy_policy(&out.q);
        let trajs = sample_trajectories(&mdp, &out.q, 1e6, 20, 10, 9).unwrap();
        for t in &trajs {
            for &(s, a) in &t.steps {
                assert_eq!(a, policy[s]);
            }
        }
    }

    #[test]
    fn trajectory_validation_rejects_bad_steps() {
        let mdp = toggle_mdp();
        let empty = Trajectory { steps: vec![] };
        assert!(matches!(empty.validate(&mdp), Err(MdpError::EmptyTrajectory)));
        let bad = Trajectory {
            steps: vec![(0, 0), (2, 1)],
        };
        assert!(matches!(
            bad.validate(&mdp),
            Err(MdpError::StepOutOfRange { step: 1, .. })
        ));
    }
}
