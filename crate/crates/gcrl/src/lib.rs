//! Reward-free, goal-conditioned reinforcement learning for non-goal environments.
//!
//! The crate wraps ordinary RL environments in a goal-conditioning layer: the
//! agent never sees the environment's own reward, it is trained purely to reach
//! observations, with goals picked by a pluggable selection strategy and
//! hindsight-relabeled replay turning every episode into usable signal.
//!
//! The pieces, bottom to top:
//!
//! - [`mlp`] — a small dense-network core (forward, backprop, Adam, Huber) with
//!   the two fixed Q-network architectures and a flat-vector checkpoint format.
//! - [`env`] — the environment contract (spaces, step/reset, truncation) and
//!   the three bundled environments: Cliff Walking, slippery Frozen Lake, and
//!   Pathological Mountain Car.
//! - [`goal`] — the goal wrapper: augments observations with an encoded goal,
//!   evaluates success (exact match / normalized distance), terminates on
//!   success, and hides the external reward from the learner.
//! - [`select`] — visitation/success grid statistics and the three goal
//!   selection strategies (uniform, novelty, intermediate success rate).
//! - [`replay`] — the hindsight replay buffer ("future" relabeling with goal
//!   termination) plus a plain uniform buffer for the external-reward baseline.
//! - [`dqn`] — epsilon-greedy acting and TD-target training against a target
//!   network; the same learner serves goal-conditioned and baseline modes.
//! - [`harness`] — seeded end-to-end training runs, the evaluation protocols,
//!   CSV/JSON metric emission, and config presets.
//!
//! Each capability has a runnable demo under `examples/`; start with
//! `cargo run --release --example goal_wrapping`. The `gcrl` binary exposes
//! `train`, `eval`, `aggregate`, and `report` for scripted use.

pub mod dqn;
pub mod env;
pub mod error;
pub mod goal;
pub mod harness;
pub mod mlp;
pub mod replay;
pub mod select;

pub use error::{Error, Result};
