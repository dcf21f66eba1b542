//! JSON-facing configuration types.
//!
//! Every field has a default so config files only state what they change.
//! Validation happens up front in each driver; a bad config is a config
//! error, never a mid-sweep panic.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use fairl_core::envs::cop::CopConfig;
use fairl_core::envs::objectworld::ObjectworldConfig;
use fairl_core::learn::{FairlConfig, GpSpec, NnSpec};

/// Which environment family to build.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnvSpec {
    Objectworld(ObjectworldConfig),
    Cop(CopConfig),
}

impl Default for EnvSpec {
    fn default() -> Self {
        EnvSpec::Objectworld(ObjectworldConfig::default())
    }
}

/// Which approximator to train.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LearnerConfig {
    Nn(NnSpec),
    Gp(GpSpec),
}

impl LearnerConfig {
    /// Method label used in result tables and checkpoints.
    pub fn label(&self) -> &'static str {
        match self {
            LearnerConfig::Nn(_) => "nn",
            LearnerConfig::Gp(_) => "gp",
        }
    }
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig::Nn(NnSpec::default())
    }
}

/// Demonstration sampling knobs. Defaults give 5000 observed steps.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingConfig {
    pub trajectories: usize,
    pub horizon: usize,
    /// Boltzmann rationality of the demonstrating agent.
    pub b: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            trajectories: 125,
            horizon: 40,
            b: 1.0,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trajectories == 0 || self.horizon == 0 {
            bail!("sampling needs at least one trajectory and a positive horizon");
        }
        if !self.b.is_finite() {
            bail!("sampling b must be finite");
        }
        Ok(())
    }

    pub fn total_steps(&self) -> usize {
        self.trajectories * self.horizon
    }
}

/// Config for `fairl generate`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerateConfig {
    pub env: EnvSpec,
    pub seed: u64,
}

/// Config for `fairl train`: one learner, one environment, demonstrations
/// sampled from the environment's ground-truth reward.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainJobConfig {
    pub env: EnvSpec,
    pub learner: LearnerConfig,
    pub train: FairlConfig,
    pub sampling: SamplingConfig,
    pub seed: u64,
}

/// A whole experiment sweep, tagged by family.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Accuracy(AccuracyConfig),
    Scalability(ScalabilityConfig),
    Extension(ExtensionConfig),
    Cop(CopExperimentConfig),
}

impl ExperimentConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentConfig::Accuracy(_) => "accuracy",
            ExperimentConfig::Scalability(_) => "scalability",
            ExperimentConfig::Extension(_) => "extension",
            ExperimentConfig::Cop(_) => "cop",
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::Accuracy(c) => c.seed = seed,
            ExperimentConfig::Scalability(c) => c.seed = seed,
            ExperimentConfig::Extension(c) => c.seed = seed,
            ExperimentConfig::Cop(c) => c.seed = seed,
        }
    }
}

/// Reward-recovery accuracy versus number of observations.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct AccuracyConfig {
    pub env: ObjectworldConfig,
    pub learners: Vec<LearnerConfig>,
    /// Trajectory counts to sweep.
    pub schedule: Vec<usize>,
    pub horizon: usize,
    pub repetitions: usize,
    /// Rationality of the demonstrating agent.
    pub b: f64,
    pub train: FairlConfig,
    pub seed: u64,
}

impl Default for AccuracyConfig {
    fn default() -> Self {
        AccuracyConfig {
            env: ObjectworldConfig::default(),
            learners: vec![
                LearnerConfig::Nn(NnSpec::default()),
                LearnerConfig::Gp(GpSpec::default()),
            ],
            schedule: vec![8, 16, 32, 64, 128],
            horizon: 40,
            repetitions: 5,
            b: 1.0,
            train: FairlConfig::default(),
            seed: 0,
        }
    }
}

impl AccuracyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            bail!("accuracy schedule must be nonempty");
        }
        if self.schedule.contains(&0) {
            bail!("accuracy schedule entries must be positive");
        }
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if self.horizon == 0 {
            bail!("horizon must be positive");
        }
        if self.learners.is_empty() {
            bail!("at least one learner is required");
        }
        if !self.b.is_finite() {
            bail!("b must be finite");
        }
        Ok(())
    }
}

/// Per-iteration wall-clock versus state-space size.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalabilityConfig {
    /// State counts to sweep; each must be a perfect square (the grid side).
    pub state_schedule: Vec<usize>,
    /// Base environment; `grid_n` is overridden per schedule entry.
    pub env: ObjectworldConfig,
    pub learner: LearnerConfig,
    pub train: FairlConfig,
    pub sampling: SamplingConfig,
    pub warmup_iterations: usize,
    pub timed_iterations: usize,
    pub seed: u64,
}

impl Default for ScalabilityConfig {
    fn default() -> Self {
        ScalabilityConfig {
            state_schedule: vec![25, 225, 625, 1225, 2025],
            env: ObjectworldConfig::default(),
            learner: LearnerConfig::default(),
            train: FairlConfig::default(),
            sampling: SamplingConfig {
                trajectories: 32,
                horizon: 40,
                b: 1.0,
            },
            warmup_iterations: 2,
            timed_iterations: 5,
            seed: 0,
        }
    }
}

impl ScalabilityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.state_schedule.is_empty() {
            bail!("state schedule must be nonempty");
        }
        for &n in &self.state_schedule {
            let side = grid_side(n);
            if side.is_none() {
                bail!("state count {n} is not a perfect square");
            }
            if side == Some(0) || side == Some(1) {
                bail!("state count {n} gives a degenerate grid");
            }
        }
        if self.timed_iterations == 0 {
            bail!("timed_iterations must be at least 1");
        }
        self.sampling.validate()
    }
}

/// Integer square root when exact, used to map state counts to grid sides.
pub fn grid_side(n_states: usize) -> Option<usize> {
    let side = (n_states as f64).sqrt().round() as usize;
    (side * side == n_states).then_some(side)
}

/// The operator-by-motion-model cross product on one larger instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtensionConfig {
    pub env: ObjectworldConfig,
    /// Total observed steps; split into horizon-length trajectories.
    pub steps: usize,
    pub horizon: usize,
    pub b: f64,
    pub nn: NnSpec,
    pub train: FairlConfig,
    /// Independent training restarts per cell; the fit with the best demo
    /// log-likelihood wins.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ExtensionConfig {
    fn default() -> Self {
        ExtensionConfig {
            env: ObjectworldConfig {
                grid_n: 20,
                n_objects: 10,
                n_colors: 5,
                ..ObjectworldConfig::default()
            },
            steps: 10_000,
            horizon: 40,
            b: 1.0,
            nn: NnSpec::default(),
            train: FairlConfig::default(),
            restarts: 1,
            seed: 0,
        }
    }
}

impl ExtensionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            bail!("horizon must be positive");
        }
        if self.steps < self.horizon {
            bail!("steps must cover at least one trajectory");
        }
        if !self.b.is_finite() {
            bail!("b must be finite");
        }
        if self.restarts == 0 {
            bail!("restarts must be positive");
        }
        Ok(())
    }
}

/// Instructed-motion benchmark: one learner trained on pooled
/// per-instruction demonstrations, scored per direction.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct CopExperimentConfig {
    pub env: CopConfig,
    pub episodes_per_instruction: usize,
    pub horizon: usize,
    /// Rationality of the instructed demonstrator.
    pub demo_b: f64,
    pub learner: LearnerConfig,
    pub train: FairlConfig,
    pub repetitions: usize,
    /// Independent training restarts per repetition; the fit with the best
    /// demo log-likelihood wins.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CopExperimentConfig {
    fn default() -> Self {
        CopExperimentConfig {
            env: CopConfig::default(),
            episodes_per_instruction: 30,
            horizon: 20,
            demo_b: 5.0,
            learner: LearnerConfig::default(),
            train: FairlConfig::default(),
            repetitions: 5,
            restarts: 1,
            seed: 0,
        }
    }
}

impl CopExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.episodes_per_instruction == 0 || self.horizon == 0 {
            bail!("episodes_per_instruction and horizon must be positive");
        }
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if self.restarts == 0 {
            bail!("restarts must be positive");
        }
        if !self.demo_b.is_finite() {
            bail!("demo_b must be finite");
        }
        Ok(())
    }
}
