//! Benchmark environments: everything needed to run a reward-learning
//! experiment, bundled together.

pub mod cop;
pub mod objectworld;

use alloc::vec::Vec;
use core::fmt;

use crate::features::{FeatureError, Features};
use crate::mdp::{Mdp, MdpError};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

pub use cop::{CopConfig, CopInstruction};
pub use objectworld::{GridObject, ObjectworldConfig};

#[derive(Clone, Debug, PartialEq)]
pub enum EnvError {
    InvalidConfig { what: &'static str },
    Mdp(MdpError),
    Feature(FeatureError),
    Inconsistent { what: &'static str },
}

impl fmt::Display for EnvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvError::InvalidConfig { what } => write!(f, "invalid environment config: {what}"),
            EnvError::Mdp(e) => write!(f, "environment mdp: {e}"),
            EnvError::Feature(e) => write!(f, "environment features: {e}"),
            EnvError::Inconsistent { what } => write!(f, "inconsistent bundle: {what}"),
        }
    }
}

impl core::error::Error for EnvError {}

impl From<MdpError> for EnvError {
    fn from(e: MdpError) -> Self {
        EnvError::Mdp(e)
    }
}

impl From<FeatureError> for EnvError {
    fn from(e: FeatureError) -> Self {
        EnvError::Feature(e)
    }
}

/// Environment-specific extras carried alongside the MDP.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "env", rename_all = "lowercase")
)]
pub enum EnvMetadata {
    Objectworld {
        grid_n: usize,
        objects: Vec<GridObject>,
    },
    Cop {
        grid_g: usize,
        schedule: Vec<CopInstruction>,
    },
}

/// A generated environment: dynamics, per-state features, the ground-truth
/// reward used for scoring, and generator metadata.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(try_from = "EnvBundleRepr", into = "EnvBundleRepr")
)]
pub struct EnvBundle {
    pub mdp: Mdp,
    pub features: Features,
    pub true_reward: Vec<f64>,
    pub metadata: EnvMetadata,
}

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Clone, Debug)]
pub struct EnvBundleRepr {
    pub mdp: Mdp,
    pub features: Features,
    pub true_reward: Vec<f64>,
    pub metadata: EnvMetadata,
}

impl TryFrom<EnvBundleRepr> for EnvBundle {
    type Error = EnvError;

    fn try_from(repr: EnvBundleRepr) -> Result<Self, EnvError> {
        let bundle = EnvBundle {
            mdp: repr.mdp,
            features: repr.features,
            true_reward: repr.true_reward,
            metadata: repr.metadata,
        };
        bundle.validate()?;
        Ok(bundle)
    }
}

impl From<EnvBundle> for EnvBundleRepr {
    fn from(b: EnvBundle) -> EnvBundleRepr {
        EnvBundleRepr {
            mdp: b.mdp,
            features: b.features,
            true_reward: b.true_reward,
            metadata: b.metadata,
        }
    }
}

impl EnvBundle {
    /// Cross-field consistency: features and reward cover exactly the MDP's
    /// state space, rewards are finite, metadata indices are in range.
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.features.n_states() != self.mdp.n_states() {
            return Err(EnvError::Inconsistent {
                what: "feature rows do not match the state count",
            });
        }
        if self.true_reward.len() != self.mdp.n_states() {
            return Err(EnvError::Inconsistent {
                what: "true reward length does not match the state count",
            });
        }
        if self.true_reward.iter().any(|r| !r.is_finite()) {
            return Err(EnvError::Inconsistent {
                what: "true reward contains non-finite entries",
            });
        }
        match &self.metadata {
            EnvMetadata::Objectworld { grid_n, objects } => {
                if grid_n * grid_n != self.mdp.n_states() {
                    return Err(EnvError::Inconsistent {
                        what: "grid size does not match the state count",
                    });
                }
                if objects.iter().any(|o| o.cell >= grid_n * grid_n) {
                    return Err(EnvError::Inconsistent {
                        what: "object placed outside the grid",
                    });
                }
            }
            EnvMetadata::Cop { grid_g, schedule } => {
                if grid_g * grid_g * cop::N_VELOCITY_DIRECTIONS != self.mdp.n_states() {
                    return Err(EnvError::Inconsistent {
                        what: "grid size does not match the state count",
                    });
                }
                if schedule.iter().any(|i| match i {
                    CopInstruction::Direction { index } => {
                        *index >= cop::N_VELOCITY_DIRECTIONS
                    }
                    CopInstruction::Origin => false,
                }) {
                    return Err(EnvError::Inconsistent {
                        what: "schedule names an unknown direction",
                    });
                }
            }
        }
        Ok(())
    }
}
