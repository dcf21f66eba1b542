//! Per-iteration wall-clock versus state-space size.
//!
//! One timed unit is a full training iteration at the current parameters:
//! evaluate f over every state, read the reward off the construction, take
//! the objective gradient, apply the ascent update. Median over the timed
//! repeats defuses scheduler noise; two warmup iterations run first. The
//! closing row fits a log-log slope across the sweep, the scaling claim in
//! a single number.

use anyhow::{anyhow, Context, Result};

use fairl_core::approx::{evaluate_all, Mlp, SparseGp};
use fairl_core::envs::objectworld::{self, ObjectworldConfig};
use fairl_core::learn::{objective_gradient, r_from_f, VisitCounts};
use fairl_core::VrFunction;

use super::{demos_from_truth, mix_seed, ols_slope, timed};
use crate::config::{grid_side, LearnerConfig, ScalabilityConfig};
use crate::table::ResultRow;

fn build_learner(
    learner: &LearnerConfig,
    features: &fairl_core::Features,
    seed: u64,
) -> Result<Box<dyn VrFunction>> {
    match learner {
        LearnerConfig::Nn(spec) => {
            let d = features.dim();
            let mut sizes = vec![d];
            match &spec.hidden_layers {
                Some(hidden) => sizes.extend_from_slice(hidden),
                None => sizes.extend_from_slice(&[d, d, d]),
            }
            sizes.push(1);
            Ok(Box::new(Mlp::new(&sizes, seed)?))
        }
        LearnerConfig::Gp(spec) => Ok(Box::new(SparseGp::with_random_support(
            features, &spec.gp, seed,
        )?)),
    }
}

pub fn run_scalability(cfg: &ScalabilityConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let method = cfg.learner.label().to_string();
    let mut rows = Vec::new();
    let mut log_points = Vec::new();

    for (i, &n_states) in cfg.state_schedule.iter().enumerate() {
        let side = grid_side(n_states).expect("validated perfect square");
        let env = ObjectworldConfig {
            grid_n: side,
            ..cfg.env.clone()
        };
        let cell = mix_seed(cfg.seed, &[1, i as u64]);
        let (outcome, cell_seconds) = timed(|| -> Result<f64> {
            let bundle =
                objectworld::generate(&env, cell).context("generating objectworld")?;
            let demos = demos_from_truth(
                &bundle,
                cfg.sampling.b,
                cfg.sampling.trajectories,
                cfg.sampling.horizon,
                mix_seed(cfg.seed, &[2, i as u64]),
            )?;
            let counts = VisitCounts::from_trajectories(&bundle.mdp, &demos)?;
            let mut approx = build_learner(&cfg.learner, &bundle.features, mix_seed(cfg.seed, &[3, i as u64]))?;

            let mut one_iteration = || -> Result<f64> {
                let (result, secs) = timed(|| -> Result<()> {
                    let objective =
                        objective_gradient(&*approx, &bundle.mdp, &bundle.features, &counts, &cfg.train)?;
                    let f = evaluate_all(&*approx, &bundle.features);
                    let _reward = r_from_f(&bundle.mdp, &f, &cfg.train.backup)?;
                    let mut params = approx.params();
                    for (p, g) in params.iter_mut().zip(objective.gradient.iter()) {
                        *p += cfg.train.learning_rate * g;
                    }
                    approx.set_params(&params)?;
                    Ok(())
                });
                result?;
                Ok(secs)
            };

            for _ in 0..cfg.warmup_iterations {
                one_iteration()?;
            }
            let mut times = Vec::with_capacity(cfg.timed_iterations);
            for _ in 0..cfg.timed_iterations {
                times.push(one_iteration()?);
            }
            times.sort_by(f64::total_cmp);
            let median = if times.len() % 2 == 1 {
                times[times.len() / 2]
            } else {
                0.5 * (times[times.len() / 2 - 1] + times[times.len() / 2])
            };
            Ok(median)
        });
        let median = outcome.map_err(|e| anyhow!("{n_states} states: {e:#}"))?;

        rows.push(ResultRow {
            experiment: "scalability",
            method: method.clone(),
            n_states,
            n_samples: cfg.sampling.total_steps(),
            metric: "iter_seconds".to_string(),
            value: median,
            stddev: f64::NAN,
            seconds: cell_seconds,
            seed: cfg.seed,
        });
        if median > 0.0 {
            log_points.push((
                (n_states as f64).ln(),
                median.ln(),
            ));
        }
    }

    rows.push(ResultRow {
        experiment: "scalability",
        method,
        n_states: 0,
        n_samples: 0,
        metric: "loglog_slope".to_string(),
        value: ols_slope(&log_points),
        stddev: f64::NAN,
        seconds: 0.0,
        seed: cfg.seed,
    });
    Ok(rows)
}
