//! JSON artifacts: environment bundles, checkpoints, reward vectors.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use fairl_core::learn::{FairlConfig, TrainReport};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON plus a trailing newline. Field order comes from the struct
/// definitions, so reruns are byte-identical.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let mut text = serde_json::to_string_pretty(value).context("serializing json")?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// A finished training run. `params` plus the echoed seed and config are
/// enough to rebuild the approximator exactly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Learner kind label ("nn" or "gp").
    pub learner: String,
    pub seed: u64,
    pub train: FairlConfig,
    pub params: Vec<f64>,
    pub reward: Vec<f64>,
    pub value: Vec<f64>,
    pub report: TrainReport,
}

/// Reads a reward vector from a bare JSON array or any object with a
/// `reward` or `true_reward` array field (checkpoints and environment
/// bundles both qualify).
pub fn read_reward_vector(path: &Path) -> Result<Vec<f64>> {
    let value: serde_json::Value = read_json(path)?;
    let array = match &value {
        serde_json::Value::Array(items) => items.as_slice(),
        serde_json::Value::Object(map) => match map.get("reward").or_else(|| map.get("true_reward")) {
            Some(serde_json::Value::Array(items)) => items.as_slice(),
            _ => bail!(
                "{}: expected a JSON array or an object with a \"reward\" array",
                path.display()
            ),
        },
        _ => bail!(
            "{}: expected a JSON array or an object with a \"reward\" array",
            path.display()
        ),
    };
    array
        .iter()
        .map(|v| {
            v.as_f64()
                .with_context(|| format!("{}: non-numeric reward entry", path.display()))
        })
        .collect()
}
