//! Cross-checks on a generated gridworld: an independent policy-iteration
//! solver must agree with value iteration, and rewards read off a randomly
//! initialized network must reproduce that network's value function when
//! solved from scratch.

use fairl_core::approx::{evaluate_all, Mlp};
use fairl_core::envs::objectworld::{generate, ObjectworldConfig};
use fairl_core::learn::{q_from_f, r_from_f, v_from_q};
use fairl_core::mdp::{value_iteration, Mdp, DEFAULT_VI_MAX_SWEEPS, DEFAULT_VI_TOL};
use fairl_core::BackupOperator;

/// Solves the linear system `a x = b` in place by Gaussian elimination with
/// partial pivoting. Dimensions are small here, so no factorization reuse.
#[allow(clippy::needless_range_loop)]
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        assert!(a[pivot][col].abs() > 1e-12, "singular system");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

/// Exact value of the deterministic policy `policy`: solves
/// `(I - gamma P_pi) v = P_pi r` where rewards are collected on the
/// successor state.
fn evaluate_policy(mdp: &Mdp, reward: &[f64], policy: &[usize]) -> Vec<f64> {
    let n = mdp.n_states();
    let gamma = mdp.gamma();
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for s in 0..n {
        a[s][s] = 1.0;
        for &(succ, p) in mdp.successors(s, policy[s]) {
            a[s][succ] -= gamma * p;
            b[s] += p * reward[succ];
        }
    }
    solve_dense(a, b)
}

/// Howard policy iteration with exact evaluation. Terminates because each
/// improvement step is monotone and the policy space is finite.
fn policy_iteration(mdp: &Mdp, reward: &[f64]) -> Vec<f64> {
    let n = mdp.n_states();
    let mut policy = vec![0usize; n];
    loop {
        let v = evaluate_policy(mdp, reward, &policy);
        let mut changed = false;
        for (s, slot) in policy.iter_mut().enumerate() {
            let mut best = *slot;
            let mut best_q = f64::NEG_INFINITY;
            for action in 0..mdp.n_actions() {
                let q: f64 = mdp
                    .successors(s, action)
                    .iter()
                    .map(|&(succ, p)| p * (reward[succ] + mdp.gamma() * v[succ]))
                    .sum();
                if q > best_q + 1e-12 {
                    best_q = q;
                    best = action;
                }
            }
            if best != *slot {
                *slot = best;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn value_iteration_matches_policy_iteration_oracle() {
    for wind in [0.0, 0.3] {
        let config = ObjectworldConfig {
            wind,
            ..ObjectworldConfig::default()
        };
        let bundle = generate(&config, 7).unwrap();
        let vi = value_iteration(
            &bundle.mdp,
            &bundle.true_reward,
            DEFAULT_VI_TOL,
            DEFAULT_VI_MAX_SWEEPS,
        )
        .unwrap();
        assert!(vi.converged);
        let oracle = policy_iteration(&bundle.mdp, &bundle.true_reward);
        assert!(
            max_abs_diff(&vi.v, &oracle) < 1e-6,
            "wind {wind}: value iteration and policy iteration disagree"
        );
    }
}

#[test]
fn random_network_rewards_solve_back_to_their_values() {
    let config = ObjectworldConfig {
        wind: 0.2,
        ..ObjectworldConfig::default()
    };
    let bundle = generate(&config, 11).unwrap();
    let d = bundle.features.dim();

    for seed in [1, 2, 3] {
        let net = Mlp::new(&[d, d, d, 1], seed).unwrap();
        let f = evaluate_all(&net, &bundle.features);
        let q = q_from_f(&bundle.mdp, &f).unwrap();
        let v = v_from_q(&q, &BackupOperator::Max);
        let r = r_from_f(&bundle.mdp, &f, &BackupOperator::Max).unwrap();

        let vi = value_iteration(&bundle.mdp, &r, 1e-10, DEFAULT_VI_MAX_SWEEPS).unwrap();
        assert!(vi.converged);
        assert!(
            max_abs_diff(&vi.v, &v) < 1e-6,
            "seed {seed}: solving the derived reward does not recover the network's values"
        );
        // The same identity via the policy-iteration oracle closes the loop
        // through an entirely separate solver.
        let oracle = policy_iteration(&bundle.mdp, &r);
        assert!(max_abs_diff(&oracle, &v) < 1e-6);
    }
}
