//! Reward learning from demonstrations, without solving an MDP in the loop.
//!
//! The crate learns a per-state reward from observed state-action
//! trajectories. Instead of repeatedly solving for optimal values inside the
//! optimization loop, a single scalar function `f` over states is learned and
//! the optimal action values, state values, and reward are all read off from
//! it in one pass:
//!
//! * `Q(s,a)` is the transition-weighted average of `f` over successors,
//! * `V(s)` collapses the action values with a max-like backup operator,
//! * `r(s) = f(s) - gamma * V(s)`.
//!
//! Under this construction the Bellman optimality equation holds identically,
//! so every gradient step on the demonstration likelihood moves through valid
//! value functions. Two function approximators are provided (a small dense
//! neural network and a sparse Gaussian process mean), along with two grid
//! environments used by the experiment harness in the companion CLI crate.
//!
//! The crate is `no_std`-compatible when built without the `std` feature;
//! everything allocates through `alloc`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod approx;
pub mod backup;
pub mod envs;
pub mod features;
pub mod gradcheck;
pub mod learn;
mod math;
pub mod mdp;
pub mod metrics;

pub use approx::{ApproxError, VrFunction};
pub use backup::BackupOperator;
pub use features::Features;
pub use mdp::{Mdp, MdpError, Trajectory};
