//! The backup-operator by motion-model cross product on one larger
//! instance. Each combination emulates a different prior method inside the
//! same trainer, so the sweep doubles as a head-to-head of those methods at
//! a scale where an inner planning loop would already hurt.

use anyhow::{Context, Result};

use fairl_core::backup::{BackupOperator, DEFAULT_GSOFT_K, DEFAULT_PNORM_P};
use fairl_core::envs::objectworld;
use fairl_core::learn::{FairlConfig, MotionModel};

use super::{correlation_score, demos_from_truth, mix_seed, timed, train_learner_multistart};
use crate::config::{ExtensionConfig, LearnerConfig};
use crate::table::ResultRow;

pub fn operator_grid() -> [(&'static str, BackupOperator); 4] {
    [
        ("max", BackupOperator::Max),
        ("logsumexp", BackupOperator::LogSumExp),
        ("pnorm", BackupOperator::PNorm { p: DEFAULT_PNORM_P }),
        ("gsoft", BackupOperator::GSoft { k: DEFAULT_GSOFT_K }),
    ]
}

pub fn motion_grid() -> [(&'static str, MotionModel); 2] {
    [
        ("qbased", MotionModel::QBased),
        ("rewardbased", MotionModel::RewardBased),
    ]
}

pub fn run_extension(cfg: &ExtensionConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let bundle = objectworld::generate(&cfg.env, mix_seed(cfg.seed, &[1]))
        .context("generating objectworld")?;
    let n_states = bundle.mdp.n_states();
    let n_traj = cfg.steps / cfg.horizon;
    let demos = demos_from_truth(
        &bundle,
        cfg.b,
        n_traj,
        cfg.horizon,
        mix_seed(cfg.seed, &[2]),
    )?;
    let n_samples = n_traj * cfg.horizon;

    let mut rows = Vec::new();
    for (oi, (op_name, op)) in operator_grid().iter().enumerate() {
        for (mi, (motion_name, motion)) in motion_grid().iter().enumerate() {
            let label = format!("{op_name}_{motion_name}");
            let train = FairlConfig {
                backup: *op,
                motion_model: *motion,
                ..cfg.train.clone()
            };
            let learner = LearnerConfig::Nn(cfg.nn.clone());
            let seed = mix_seed(cfg.seed, &[3, oi as u64, mi as u64]);
            let (outcome, seconds) = timed(|| {
                train_learner_multistart(&learner, &bundle, &demos, &train, seed, cfg.restarts)
            });
            let (corr, epoch_seconds) = match outcome {
                Ok((result, iterations)) => {
                    let corr = correlation_score(&result.reward, &bundle.true_reward);
                    (corr, seconds / iterations.max(1) as f64)
                }
                Err(err) => {
                    eprintln!("note: {label} cell failed: {err}");
                    (f64::NAN, f64::NAN)
                }
            };
            rows.push(ResultRow {
                experiment: "extension",
                method: label.clone(),
                n_states,
                n_samples,
                metric: "pearson".to_string(),
                value: corr,
                stddev: f64::NAN,
                seconds,
                seed: cfg.seed,
            });
            rows.push(ResultRow {
                experiment: "extension",
                method: label,
                n_states,
                n_samples,
                metric: "epoch_seconds".to_string(),
                value: epoch_seconds,
                stddev: f64::NAN,
                seconds,
                seed: cfg.seed,
            });
        }
    }
    Ok(rows)
}
