//! Guided-movement environment: an agent on a grid whose state carries its
//! current velocity direction, demonstrating compliance with a movement
//! instruction.
//!
//! A state is a cell of a `g x g` grid paired with one of eight velocity
//! directions. Each of the eight actions sets the velocity to its direction
//! and moves one cell along it, clamped per axis at the walls; transitions
//! are deterministic. How well a state complies with an instruction is the
//! cosine between its velocity and the instructed direction, which is what
//! a learned reward gets scored against.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::envs::{EnvBundle, EnvError, EnvMetadata};
use crate::features::Features;
use crate::math;
use crate::mdp::Mdp;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

pub const N_VELOCITY_DIRECTIONS: usize = 8;

/// Counterclockwise from east: integer deltas of the eight directions.
const DELTAS: [(i64, i64); N_VELOCITY_DIRECTIONS] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

pub const DIRECTION_LABELS: [&str; N_VELOCITY_DIRECTIONS] =
    ["e", "ne", "n", "nw", "w", "sw", "s", "se"];

/// Indices of the four axis-aligned directions, used when an instruction
/// schedule is restricted to them.
const AXIS_DIRECTIONS: [usize; 4] = [0, 2, 4, 6];

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(default))]
pub struct CopConfig {
    pub grid_g: usize,
    pub n_directions: usize,
    pub gamma: f64,
}

impl Default for CopConfig {
    fn default() -> Self {
        CopConfig {
            grid_g: 10,
            n_directions: 8,
            gamma: 0.9,
        }
    }
}

/// One segment of the instruction schedule: follow a direction, or return
/// toward the grid center.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(Serialize, Deserialize),
    serde(tag = "kind", rename_all = "lowercase")
)]
pub enum CopInstruction {
    Direction { index: usize },
    Origin,
}

/// Unit vector of one of the eight directions.
pub fn direction_unit(index: usize) -> (f64, f64) {
    let (dx, dy) = DELTAS[index];
    let norm = math::sqrt((dx * dx + dy * dy) as f64);
    (dx as f64 / norm, dy as f64 / norm)
}

pub fn state_index(grid_g: usize, x: usize, y: usize, dir: usize) -> usize {
    (y * grid_g + x) * N_VELOCITY_DIRECTIONS + dir
}

/// Inverse of `state_index`: `(x, y, dir)`.
pub fn decode_state(grid_g: usize, state: usize) -> (usize, usize, usize) {
    let dir = state % N_VELOCITY_DIRECTIONS;
    let cell = state / N_VELOCITY_DIRECTIONS;
    (cell % grid_g, cell / grid_g, dir)
}

/// Compliance of a state with an instructed direction: the cosine between
/// the state's velocity and the instruction, in `{-1, -1/sqrt(2), 0,
/// 1/sqrt(2), 1}`.
pub fn ideal_reward(grid_g: usize, state: usize, direction: usize) -> f64 {
    assert!(direction < N_VELOCITY_DIRECTIONS, "unknown direction");
    let (_, _, dir) = decode_state(grid_g, state);
    let (vx, vy) = direction_unit(dir);
    let (ix, iy) = direction_unit(direction);
    vx * ix + vy * iy
}

/// Compliance of a state with one instruction, for every state. For
/// `Origin` the instructed direction points from the state's cell toward
/// the grid center, zero at the center itself.
pub fn ideal_reward_vector(grid_g: usize, instruction: &CopInstruction) -> Vec<f64> {
    let n_states = grid_g * grid_g * N_VELOCITY_DIRECTIONS;
    match *instruction {
        CopInstruction::Direction { index } => (0..n_states)
            .map(|s| ideal_reward(grid_g, s, index))
            .collect(),
        CopInstruction::Origin => {
            let center = (grid_g as f64 - 1.0) / 2.0;
            (0..n_states)
                .map(|s| {
                    let (x, y, dir) = decode_state(grid_g, s);
                    let (tx, ty) = (center - x as f64, center - y as f64);
                    let norm = math::sqrt(tx * tx + ty * ty);
                    if norm == 0.0 {
                        return 0.0;
                    }
                    let (vx, vy) = direction_unit(dir);
                    (vx * tx + vy * ty) / norm
                })
                .collect()
        }
    }
}

/// Generates the guided-movement environment. The instruction schedule is
/// a seeded shuffle of the configured directions plus one origin segment;
/// the bundle's `true_reward` holds the origin compliance vector (there is
/// no single instruction-independent ground truth).
pub fn generate(config: &CopConfig, seed: u64) -> Result<EnvBundle, EnvError> {
    if config.grid_g < 2 {
        return Err(EnvError::InvalidConfig {
            what: "grid_g must be at least 2",
        });
    }
    if config.n_directions != 4 && config.n_directions != 8 {
        return Err(EnvError::InvalidConfig {
            what: "n_directions must be 4 or 8",
        });
    }

    let g = config.grid_g;
    let n_states = g * g * N_VELOCITY_DIRECTIONS;
    let limit = g as i64 - 1;

    let mut transitions = Vec::with_capacity(n_states * N_VELOCITY_DIRECTIONS);
    let mut feature_rows = Vec::with_capacity(n_states);
    for state in 0..n_states {
        let (x, y, dir) = decode_state(g, state);
        let (ux, uy) = direction_unit(dir);
        feature_rows.push(alloc::vec![
            x as f64 / limit as f64,
            y as f64 / limit as f64,
            ux,
            uy,
        ]);
        for (action, &(dx, dy)) in DELTAS.iter().enumerate() {
            let nx = (x as i64 + dx).clamp(0, limit) as usize;
            let ny = (y as i64 + dy).clamp(0, limit) as usize;
            transitions.push(alloc::vec![(state_index(g, nx, ny, action), 1.0)]);
        }
    }

    let mdp = Mdp::new(n_states, N_VELOCITY_DIRECTIONS, config.gamma, transitions)?;
    let features = Features::from_rows(feature_rows)?;

    let mut schedule: Vec<CopInstruction> = match config.n_directions {
        4 => AXIS_DIRECTIONS
            .iter()
            .map(|&index| CopInstruction::Direction { index })
            .collect(),
        _ => (0..N_VELOCITY_DIRECTIONS)
            .map(|index| CopInstruction::Direction { index })
            .collect(),
    };
    schedule.push(CopInstruction::Origin);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..schedule.len()).rev() {
        let j = rng.random_range(0..=i);
        schedule.swap(i, j);
    }

    let true_reward = ideal_reward_vector(g, &CopInstruction::Origin);

    Ok(EnvBundle {
        mdp,
        features,
        true_reward,
        metadata: EnvMetadata::Cop {
            grid_g: g,
            schedule,
        },
    })
}
