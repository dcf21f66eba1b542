//! The instructed-motion benchmark.
//!
//! Per repetition: an instructed demonstrator plays each scheduled
//! instruction optimally-Boltzmann (value iteration on that instruction's
//! ideal reward), the learner trains once on the pooled episodes, and the
//! recovered reward is scored per instruction by Pearson correlation with
//! that instruction's ideal reward restricted to the states the
//! demonstrator actually visited under it. A uniformly random reward
//! vector scored the same way is the negative control.

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fairl_core::envs::cop::{self, ideal_reward_vector, CopInstruction, DIRECTION_LABELS};
use fairl_core::envs::EnvMetadata;
use fairl_core::mdp::{
    sample_trajectories, value_iteration, DEFAULT_VI_MAX_SWEEPS, DEFAULT_VI_TOL,
};

use super::{correlation_score, mean_std_finite, mix_seed, timed, train_learner_multistart};
use crate::config::CopExperimentConfig;
use crate::table::ResultRow;

/// Slot per possible instruction: the eight directions, then origin.
const N_SLOTS: usize = DIRECTION_LABELS.len() + 1;

fn slot_of(instruction: &CopInstruction) -> usize {
    match instruction {
        CopInstruction::Direction { index } => *index,
        CopInstruction::Origin => N_SLOTS - 1,
    }
}

fn slot_label(slot: usize) -> &'static str {
    if slot == N_SLOTS - 1 {
        "origin"
    } else {
        DIRECTION_LABELS[slot]
    }
}

fn restricted_correlation(learned: &[f64], ideal: &[f64], states: &[usize]) -> f64 {
    let a: Vec<f64> = states.iter().map(|&s| learned[s]).collect();
    let b: Vec<f64> = states.iter().map(|&s| ideal[s]).collect();
    correlation_score(&a, &b)
}

pub fn run_cop(cfg: &CopExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let mut trained_scores: Vec<Vec<f64>> = vec![Vec::new(); N_SLOTS];
    let mut control_scores: Vec<Vec<f64>> = vec![Vec::new(); N_SLOTS];
    let mut slot_present = [false; N_SLOTS];
    let mut n_states = 0;
    let mut n_samples = 0;
    let mut total_seconds = 0.0;

    for rep in 0..cfg.repetitions {
        let bundle = cop::generate(&cfg.env, mix_seed(cfg.seed, &[1, rep as u64]))
            .context("generating the instructed-motion environment")?;
        n_states = bundle.mdp.n_states();
        let EnvMetadata::Cop { grid_g, schedule } = &bundle.metadata else {
            unreachable!("cop generator returns cop metadata");
        };

        let mut pooled = Vec::new();
        let mut visited: Vec<(usize, Vec<usize>)> = Vec::new();
        for (ii, instruction) in schedule.iter().enumerate() {
            let ideal = ideal_reward_vector(*grid_g, instruction);
            let vi = value_iteration(&bundle.mdp, &ideal, DEFAULT_VI_TOL, DEFAULT_VI_MAX_SWEEPS)
                .context("solving an instruction's ideal reward")?;
            let demos = sample_trajectories(
                &bundle.mdp,
                &vi.q,
                cfg.demo_b,
                cfg.episodes_per_instruction,
                cfg.horizon,
                mix_seed(cfg.seed, &[2, rep as u64, ii as u64]),
            )?;
            let mut states: Vec<usize> = demos
                .iter()
                .flat_map(|t| t.steps.iter().map(|&(s, _)| s))
                .collect();
            states.sort_unstable();
            states.dedup();
            visited.push((slot_of(instruction), states));
            pooled.extend(demos);
        }
        n_samples = pooled.iter().map(|t| t.steps.len()).sum();

        let (outcome, seconds) = timed(|| {
            train_learner_multistart(
                &cfg.learner,
                &bundle,
                &pooled,
                &cfg.train,
                mix_seed(cfg.seed, &[3, rep as u64]),
                cfg.restarts,
            )
        });
        total_seconds += seconds;
        let learned = match outcome {
            Ok((result, _)) => Some(result.reward),
            Err(err) => {
                eprintln!("note: training failed on repetition {rep}: {err}");
                None
            }
        };

        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, &[4, rep as u64]));
        let control: Vec<f64> = (0..n_states).map(|_| rng.random_range(-1.0..1.0)).collect();

        for (slot, states) in &visited {
            slot_present[*slot] = true;
            let instruction = if *slot == N_SLOTS - 1 {
                CopInstruction::Origin
            } else {
                CopInstruction::Direction { index: *slot }
            };
            let ideal = ideal_reward_vector(*grid_g, &instruction);
            trained_scores[*slot].push(match &learned {
                Some(r) => restricted_correlation(r, &ideal, states),
                None => f64::NAN,
            });
            control_scores[*slot].push(restricted_correlation(&control, &ideal, states));
        }
    }

    let method = cfg.learner.label().to_string();
    let mut rows = Vec::new();
    let mut wins = 0usize;
    for slot in 0..N_SLOTS {
        if !slot_present[slot] {
            continue;
        }
        let metric = format!("corr_{}", slot_label(slot));
        let (t_mean, t_std, _) = mean_std_finite(&trained_scores[slot]);
        let (c_mean, c_std, _) = mean_std_finite(&control_scores[slot]);
        if slot < N_SLOTS - 1 && t_mean > c_mean {
            wins += 1;
        }
        rows.push(ResultRow {
            experiment: "cop",
            method: method.clone(),
            n_states,
            n_samples,
            metric: metric.clone(),
            value: t_mean,
            stddev: t_std,
            seconds: total_seconds / cfg.repetitions as f64,
            seed: cfg.seed,
        });
        rows.push(ResultRow {
            experiment: "cop",
            method: "random".to_string(),
            n_states,
            n_samples,
            metric,
            value: c_mean,
            stddev: c_std,
            seconds: 0.0,
            seed: cfg.seed,
        });
    }
    rows.push(ResultRow {
        experiment: "cop",
        method,
        n_states: 0,
        n_samples: 0,
        metric: "directions_beating_control".to_string(),
        value: wins as f64,
        stddev: f64::NAN,
        seconds: 0.0,
        seed: cfg.seed,
    });
    Ok(rows)
}
