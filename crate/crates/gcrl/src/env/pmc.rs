//! Pathological Mountain Car: the classic car-on-a-hill with a constant tilt
//! added to the slope, so the profile rises toward the left. The left summit
//! (x <= -1.6) is the tall hill and pays 500; the right summit (x >= 0.5) is
//! the original goal, now the low hill, and pays 10. No per-step penalty.
//!
//! Reaching the tall hill takes strictly more swing-ups: the car has to pump
//! energy rightward (close to the low-hill terminal) before committing left.
//! Episodes truncate after 300 steps.

use super::{EpisodeClock, Environment, Observation, SpaceDescriptor, StepOutcome};
use crate::error::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const POSITION_MIN: f64 = -1.8;
pub const POSITION_MAX: f64 = 0.6;
pub const MAX_SPEED: f64 = 0.07;
pub const FORCE: f64 = 0.001;
pub const GRAVITY: f64 = 0.0025;
/// Constant acceleration added to every step; a linear height shift that
/// raises the left hill. Config knob `pmc_tilt`.
pub const DEFAULT_TILT: f64 = 0.0005;
pub const HARD_GOAL_X: f64 = -1.6;
pub const EASY_GOAL_X: f64 = 0.5;
pub const HARD_REWARD: f64 = 500.0;
pub const EASY_REWARD: f64 = 10.0;
pub const STEP_LIMIT: u32 = 300;
pub const N_ACTIONS: usize = 3;

/// Pure physics update. Actions: 0=push left, 1=coast, 2=push right.
/// With `tilt = 0` this is exactly the canonical Mountain Car update.
pub fn update(x: f64, v: f64, action: usize, tilt: f64) -> (f64, f64) {
    assert!(action < N_ACTIONS, "pmc action out of range");
    let accel = (action as f64 - 1.0) * FORCE - GRAVITY * (3.0 * x).cos() + tilt;
    let v = (v + accel).clamp(-MAX_SPEED, MAX_SPEED);
    let x = (x + v).clamp(POSITION_MIN, POSITION_MAX);
    (x, v)
}

/// Terminal reward at position `x`, if any.
pub fn terminal_reward(x: f64) -> Option<f64> {
    if x <= HARD_GOAL_X {
        Some(HARD_REWARD)
    } else if x >= EASY_GOAL_X {
        Some(EASY_REWARD)
    } else {
        None
    }
}

pub struct PathologicalMountainCarEnv {
    space: SpaceDescriptor,
    x: f64,
    v: f64,
    tilt: f64,
    rng: ChaCha8Rng,
    clock: EpisodeClock,
}

impl PathologicalMountainCarEnv {
    pub fn new(tilt: f64) -> Self {
        PathologicalMountainCarEnv {
            space: SpaceDescriptor::bounded(
                vec![POSITION_MIN, -MAX_SPEED],
                vec![POSITION_MAX, MAX_SPEED],
            ),
            x: -0.5,
            v: 0.0,
            tilt,
            rng: ChaCha8Rng::seed_from_u64(0),
            clock: EpisodeClock::new(STEP_LIMIT),
        }
    }

    pub fn position(&self) -> f64 {
        self.x
    }

    pub fn velocity(&self) -> f64 {
        self.v
    }
}

impl Default for PathologicalMountainCarEnv {
    fn default() -> Self {
        Self::new(DEFAULT_TILT)
    }
}

impl Environment for PathologicalMountainCarEnv {
    fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    fn n_actions(&self) -> usize {
        N_ACTIONS
    }

    fn step_limit(&self) -> u32 {
        STEP_LIMIT
    }

    fn reset(&mut self, seed: u64) -> Observation {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.x = self.rng.gen_range(-0.6..-0.4);
        self.v = 0.0;
        self.clock.reset();
        Observation::Continuous(vec![self.x, self.v])
    }

    fn step(&mut self, action: usize) -> Result<StepOutcome> {
        self.clock.check_can_step(N_ACTIONS, action)?;
        let (x, v) = update(self.x, self.v, action, self.tilt);
        self.x = x;
        self.v = v;
        let (reward, terminated) = match terminal_reward(x) {
            Some(r) => (r, true),
            None => (0.0, false),
        };
        let truncated = self.clock.tick(terminated);
        Ok(StepOutcome {
            next_obs: Observation::Continuous(vec![x, v]),
            external_reward: reward,
            terminated,
            truncated,
        })
    }
}
