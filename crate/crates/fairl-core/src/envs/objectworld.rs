//! Gridworld with randomly placed two-colored objects.
//!
//! States are cells of an `n x n` grid; actions are the four moves plus
//! stay, with optional wind that redistributes probability over all five
//! move outcomes. The hidden reward depends on proximity to object colors:
//! `+1` within distance 3 of an outer color 0 object and distance 2 of an
//! outer color 1 object, `-1` when only the first condition holds, `0`
//! otherwise. Features are raw per-color Chebyshev distances, inner colors
//! first, saturated at `grid_n` when a color is absent.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::envs::{EnvBundle, EnvError, EnvMetadata};
use crate::features::Features;
use crate::mdp::Mdp;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

pub const N_ACTIONS: usize = 5;

/// Row index deltas per action: up, down, left, right, stay.
const MOVES: [(i64, i64); N_ACTIONS] = [(0, 1), (0, -1), (-1, 0), (1, 0), (0, 0)];

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(default))]
pub struct ObjectworldConfig {
    pub grid_n: usize,
    pub n_objects: usize,
    pub n_colors: usize,
    pub wind: f64,
    pub gamma: f64,
}

impl Default for ObjectworldConfig {
    fn default() -> Self {
        ObjectworldConfig {
            grid_n: 5,
            n_objects: 2,
            n_colors: 2,
            wind: 0.0,
            gamma: 0.9,
        }
    }
}

/// An object occupying one cell, carrying an inner and an outer color.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GridObject {
    pub cell: usize,
    pub inner: usize,
    pub outer: usize,
}

/// Chebyshev distance between two cells of an `n x n` grid.
pub fn chebyshev(grid_n: usize, a: usize, b: usize) -> usize {
    let (ax, ay) = (a % grid_n, a / grid_n);
    let (bx, by) = (b % grid_n, b / grid_n);
    ax.abs_diff(bx).max(ay.abs_diff(by))
}

fn min_distance_by<F>(grid_n: usize, objects: &[GridObject], cell: usize, pick: F) -> Option<usize>
where
    F: Fn(&GridObject) -> bool,
{
    objects
        .iter()
        .filter(|o| pick(o))
        .map(|o| chebyshev(grid_n, cell, o.cell))
        .min()
}

/// Ground-truth reward of one cell under the proximity rules.
pub fn true_reward_at(grid_n: usize, objects: &[GridObject], cell: usize) -> f64 {
    let near_primary = min_distance_by(grid_n, objects, cell, |o| o.outer == 0)
        .map(|d| d <= 3)
        .unwrap_or(false);
    if !near_primary {
        return 0.0;
    }
    let near_secondary = min_distance_by(grid_n, objects, cell, |o| o.outer == 1)
        .map(|d| d <= 2)
        .unwrap_or(false);
    if near_secondary {
        1.0
    } else {
        -1.0
    }
}

/// Feature vector of one cell: per color, the Chebyshev distance to the
/// nearest object with that inner color, then the same for outer colors.
/// Colors with no object saturate at `grid_n`.
pub fn features_at(grid_n: usize, n_colors: usize, objects: &[GridObject], cell: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(2 * n_colors);
    for color in 0..n_colors {
        let d = min_distance_by(grid_n, objects, cell, |o| o.inner == color).unwrap_or(grid_n);
        row.push(d as f64);
    }
    for color in 0..n_colors {
        let d = min_distance_by(grid_n, objects, cell, |o| o.outer == color).unwrap_or(grid_n);
        row.push(d as f64);
    }
    row
}

fn clamped_move(grid_n: usize, cell: usize, action: usize) -> usize {
    let x = (cell % grid_n) as i64;
    let y = (cell / grid_n) as i64;
    let (dx, dy) = MOVES[action];
    let nx = (x + dx).clamp(0, grid_n as i64 - 1);
    let ny = (y + dy).clamp(0, grid_n as i64 - 1);
    (ny as usize) * grid_n + nx as usize
}

/// Successor distribution for one state-action pair: the intended move with
/// probability `1 - wind`, plus `wind / 5` on every move outcome (so the
/// intended cell keeps at least `1 - wind + wind/5`). Outcomes landing on
/// the same cell are merged.
fn successor_row(grid_n: usize, wind: f64, cell: usize, action: usize) -> Vec<(usize, f64)> {
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(N_ACTIONS);
    let mut add = |target: usize, prob: f64| {
        if prob == 0.0 {
            return;
        }
        match row.iter_mut().find(|(t, _)| *t == target) {
            Some((_, p)) => *p += prob,
            None => row.push((target, prob)),
        }
    };
    add(clamped_move(grid_n, cell, action), 1.0 - wind);
    for other in 0..N_ACTIONS {
        add(clamped_move(grid_n, cell, other), wind / N_ACTIONS as f64);
    }
    row
}

/// Generates a complete objectworld instance. Object placement and colors
/// are drawn from `seed`; the first object's outer color is pinned to 0 and
/// the second's to 1 so the reward rules always have carriers.
pub fn generate(config: &ObjectworldConfig, seed: u64) -> Result<EnvBundle, EnvError> {
    if config.grid_n == 0 {
        return Err(EnvError::InvalidConfig {
            what: "grid_n must be at least 1",
        });
    }
    let n_cells = config.grid_n * config.grid_n;
    if config.n_objects > n_cells {
        return Err(EnvError::InvalidConfig {
            what: "more objects than cells",
        });
    }
    if config.n_colors < 2 {
        return Err(EnvError::InvalidConfig {
            what: "the reward rules need at least two colors",
        });
    }
    if !(config.wind >= 0.0 && config.wind <= 1.0) {
        return Err(EnvError::InvalidConfig {
            what: "wind must lie in [0, 1]",
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Partial Fisher-Yates over all cells gives distinct object positions.
    let mut cells: Vec<usize> = (0..n_cells).collect();
    for i in 0..config.n_objects {
        let j = rng.random_range(i..n_cells);
        cells.swap(i, j);
    }
    let mut objects: Vec<GridObject> = (0..config.n_objects)
        .map(|i| GridObject {
            cell: cells[i],
            inner: rng.random_range(0..config.n_colors),
            outer: rng.random_range(0..config.n_colors),
        })
        .collect();
    if !objects.is_empty() {
        objects[0].outer = 0;
    }
    if objects.len() >= 2 {
        objects[1].outer = 1;
    }

    let true_reward: Vec<f64> = (0..n_cells)
        .map(|cell| true_reward_at(config.grid_n, &objects, cell))
        .collect();
    let features = Features::from_rows(
        (0..n_cells)
            .map(|cell| features_at(config.grid_n, config.n_colors, &objects, cell))
            .collect(),
    )?;

    let mut transitions = Vec::with_capacity(n_cells * N_ACTIONS);
    for cell in 0..n_cells {
        for action in 0..N_ACTIONS {
            transitions.push(successor_row(config.grid_n, config.wind, cell, action));
        }
    }
    let mdp = Mdp::new(n_cells, N_ACTIONS, config.gamma, transitions)?;

    Ok(EnvBundle {
        mdp,
        features,
        true_reward,
        metadata: EnvMetadata::Objectworld {
            grid_n: config.grid_n,
            objects,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math;

    fn obj(cell: usize, inner: usize, outer: usize) -> GridObject {
        GridObject { cell, inner, outer }
    }

    #[test]
    fn chebyshev_cases() {
        // 5x5 grid, cell = y*5 + x.
        assert_eq!(chebyshev(5, 0, 0), 0);
        assert_eq!(chebyshev(5, 0, 24), 4); // (0,0) to (4,4)
        assert_eq!(chebyshev(5, 2, 10), 2); // (2,0) to (0,2)
        assert_eq!(chebyshev(5, 7, 9), 2); // (2,1) to (4,1)
    }

    #[test]
    fn reward_rules() {
        // Outer color 0 at (0,0), outer color 1 at (4,4).
        let objects = [obj(0, 0, 0), obj(24, 1, 1)];
        // (2,2): distance 2 to both carriers.
        assert_eq!(true_reward_at(5, &objects, 12), 1.0);
        // (3,0): distance 3 to color 0, distance 4 to color 1.
        assert_eq!(true_reward_at(5, &objects, 3), -1.0);
        // (4,0): distance 4 to color 0.
        assert_eq!(true_reward_at(5, &objects, 4), 0.0);
    }

    #[test]
    fn reward_needs_primary_color() {
        // No outer color 0 anywhere: reward vanishes even near color 1.
        let objects = [obj(12, 0, 1)];
        for cell in 0..25 {
            assert_eq!(true_reward_at(5, &objects, cell), 0.0);
        }
    }

    #[test]
    fn feature_layout_and_saturation() {
        let objects = [obj(0, 0, 0), obj(24, 1, 1)];
        // Three colors: color 2 has no carrier and saturates at grid_n.
        let row = features_at(5, 3, &objects, 12);
        assert_eq!(row, vec![2.0, 2.0, 5.0, 2.0, 2.0, 5.0]);
        let corner = features_at(5, 3, &objects, 0);
        assert_eq!(corner, vec![0.0, 4.0, 5.0, 0.0, 4.0, 5.0]);
    }

    #[test]
    fn windless_moves_are_deterministic_and_clamped() {
        let config = ObjectworldConfig {
            grid_n: 3,
            ..ObjectworldConfig::default()
        };
        let env = generate(&config, 1).unwrap();
        for s in 0..9 {
            for a in 0..N_ACTIONS {
                let row = env.mdp.successors(s, a);
                assert_eq!(row.len(), 1);
                assert_eq!(row[0].1, 1.0);
            }
        }
        // Cell (0,0): up lands on (0,1) = cell 3, down clamps in place.
        assert_eq!(env.mdp.successors(0, 0), &[(3, 1.0)]);
        assert_eq!(env.mdp.successors(0, 1), &[(0, 1.0)]);
        // Stay is always the identity.
        assert_eq!(env.mdp.successors(4, 4), &[(4, 1.0)]);
    }

    #[test]
    fn wind_splits_probability_and_merges_duplicates() {
        let config = ObjectworldConfig {
            grid_n: 3,
            wind: 0.3,
            ..ObjectworldConfig::default()
        };
        let env = generate(&config, 1).unwrap();

        // Interior cell (1,1) = 4, intended up = (1,2) = 7: all five
        // outcomes distinct, intended keeps 0.7 + 0.06.
        let row = env.mdp.successors(4, 0);
        assert_eq!(row.len(), 5);
        let p_up = row.iter().find(|(t, _)| *t == 7).unwrap().1;
        assert!(math::abs(p_up - 0.76) < 1e-12);

        // Corner (0,0), intended up: down/left/stay all clamp onto the
        // corner itself and merge.
        let row = env.mdp.successors(0, 0);
        assert_eq!(row.len(), 3);
        let get = |t: usize| row.iter().find(|(c, _)| *c == t).unwrap().1;
        assert!(math::abs(get(3) - 0.76) < 1e-12); // up
        assert!(math::abs(get(0) - 0.18) < 1e-12); // down + left + stay
        assert!(math::abs(get(1) - 0.06) < 1e-12); // right
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let config = ObjectworldConfig {
            grid_n: 8,
            n_objects: 6,
            n_colors: 3,
            ..ObjectworldConfig::default()
        };
        let a = generate(&config, 11).unwrap();
        let b = generate(&config, 11).unwrap();
        let c = generate(&config, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn outer_colors_are_pinned() {
        for seed in 0..20 {
            let env = generate(&ObjectworldConfig::default(), seed).unwrap();
            match &env.metadata {
                EnvMetadata::Objectworld { objects, .. } => {
                    assert_eq!(objects[0].outer, 0);
                    assert_eq!(objects[1].outer, 1);
                    assert_eq!(objects.len(), 2);
                    assert_ne!(objects[0].cell, objects[1].cell);
                }
                _ => panic!("wrong metadata"),
            }
            // Pinning keeps the reward signal alive.
            let distinct = env
                .true_reward
                .iter()
                .any(|&r| r != env.true_reward[0]);
            assert!(distinct, "constant reward for seed {seed}");
        }
    }

    #[test]
    fn config_validation() {
        let config = ObjectworldConfig {
            n_colors: 1,
            ..ObjectworldConfig::default()
        };
        assert!(generate(&config, 0).is_err());
        let config = ObjectworldConfig {
            wind: 1.5,
            ..ObjectworldConfig::default()
        };
        assert!(generate(&config, 0).is_err());
        let config = ObjectworldConfig {
            n_objects: 26,
            ..ObjectworldConfig::default()
        };
        assert!(generate(&config, 0).is_err());
    }

    #[test]
    fn bundle_is_self_consistent() {
        let env = generate(&ObjectworldConfig::default(), 3).unwrap();
        env.validate().unwrap();
        assert_eq!(env.mdp.n_states(), 25);
        assert_eq!(env.features.n_states(), 25);
        assert_eq!(env.features.dim(), 4);
    }
}
