//! Reward-recovery accuracy against number of observed steps.
//!
//! For each scheduled trajectory count: regenerate the environment per
//! repetition, sample demonstrations from the ground-truth optimal policy,
//! train every configured learner, and score the recovered reward by
//! Pearson correlation with the truth. Rows carry mean and spread over
//! repetitions; a failed or degenerate cell contributes NaN instead of
//! aborting the sweep.

use anyhow::{Context, Result};

use fairl_core::envs::objectworld;

use super::{correlation_score, demos_from_truth, mean_std_finite, mix_seed, timed, train_learner};
use crate::config::AccuracyConfig;
use crate::table::ResultRow;

pub fn run_accuracy(cfg: &AccuracyConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let n_states = cfg.env.grid_n * cfg.env.grid_n;
    let mut rows = Vec::new();

    for &n_traj in &cfg.schedule {
        let mut scores = vec![Vec::with_capacity(cfg.repetitions); cfg.learners.len()];
        let mut seconds = vec![0.0; cfg.learners.len()];

        for rep in 0..cfg.repetitions {
            let env_seed = mix_seed(cfg.seed, &[1, rep as u64]);
            let bundle = objectworld::generate(&cfg.env, env_seed)
                .context("generating objectworld")?;
            let demo_seed = mix_seed(cfg.seed, &[2, rep as u64, n_traj as u64]);
            let demos = demos_from_truth(&bundle, cfg.b, n_traj, cfg.horizon, demo_seed)?;

            for (li, learner) in cfg.learners.iter().enumerate() {
                let seed = mix_seed(cfg.seed, &[3, rep as u64, n_traj as u64, li as u64]);
                let (outcome, secs) =
                    timed(|| train_learner(learner, &bundle, &demos, &cfg.train, seed));
                seconds[li] += secs;
                let score = match outcome {
                    Ok(result) => correlation_score(&result.reward, &bundle.true_reward),
                    Err(err) => {
                        eprintln!(
                            "note: {} cell failed ({n_traj} trajectories, rep {rep}): {err}",
                            learner.label()
                        );
                        f64::NAN
                    }
                };
                scores[li].push(score);
            }
        }

        for (li, learner) in cfg.learners.iter().enumerate() {
            let (mean, std, _) = mean_std_finite(&scores[li]);
            rows.push(ResultRow {
                experiment: "accuracy",
                method: learner.label().to_string(),
                n_states,
                n_samples: n_traj * cfg.horizon,
                metric: "pearson".to_string(),
                value: mean,
                stddev: std,
                seconds: seconds[li] / cfg.repetitions as f64,
                seed: cfg.seed,
            });
        }
    }

    // Accuracy against sample count is not guaranteed monotone; worth a
    // note in the log when the largest budget loses to the smallest.
    for learner in &cfg.learners {
        let label = learner.label();
        let marks: Vec<&ResultRow> = rows.iter().filter(|r| r.method == label).collect();
        if let (Some(first), Some(last)) = (marks.first(), marks.last()) {
            if last.value < first.value {
                eprintln!(
                    "note: {label} correlation at {} samples ({:.3}) is below the {}-sample value ({:.3})",
                    last.n_samples, last.value, first.n_samples, first.value
                );
            }
        }
    }

    Ok(rows)
}
