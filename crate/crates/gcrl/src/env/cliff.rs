//! Cliff Walking: 4x12 grid, deterministic moves with edge clamping.
//!
//! External rewards are -1 per step and -100 for stepping into the cliff,
//! which teleports the agent back to the start (no termination). Only the
//! goal cell terminates. Episodes truncate after 300 steps.

use super::{EpisodeClock, Environment, Observation, SpaceDescriptor, StepOutcome};
use crate::error::Result;

pub const ROWS: usize = 4;
pub const COLS: usize = 12;
pub const N_STATES: usize = ROWS * COLS;
pub const N_ACTIONS: usize = 4;
pub const START: usize = 36;
pub const GOAL: usize = 47;
pub const STEP_LIMIT: u32 = 300;

/// Cliff cells occupy the bottom row between start and goal.
pub const CLIFF_FIRST: usize = 37;
pub const CLIFF_LAST: usize = 46;

pub fn is_cliff(state: usize) -> bool {
    (CLIFF_FIRST..=CLIFF_LAST).contains(&state)
}

/// Actions: 0=up, 1=right, 2=down, 3=left.
pub fn move_clamped(state: usize, action: usize) -> usize {
    let (mut row, mut col) = (state / COLS, state % COLS);
    match action {
        0 => row = row.saturating_sub(1),
        1 => col = (col + 1).min(COLS - 1),
        2 => row = (row + 1).min(ROWS - 1),
        3 => col = col.saturating_sub(1),
        _ => panic!("cliff action out of range"),
    }
    row * COLS + col
}

/// Pure transition: `(next_state, reward, terminated)`.
pub fn transition(state: usize, action: usize) -> (usize, f64, bool) {
    let next = move_clamped(state, action);
    if is_cliff(next) {
        (START, -100.0, false)
    } else if next == GOAL {
        (next, -1.0, true)
    } else {
        (next, -1.0, false)
    }
}

pub struct CliffWalkingEnv {
    space: SpaceDescriptor,
    state: usize,
    clock: EpisodeClock,
}

impl CliffWalkingEnv {
    pub fn new() -> Self {
        CliffWalkingEnv {
            space: SpaceDescriptor::discrete(N_STATES),
            state: START,
            clock: EpisodeClock::new(STEP_LIMIT),
        }
    }

    pub fn state(&self) -> usize {
        self.state
    }
}

impl Default for CliffWalkingEnv {
    fn default() -> Self {
        Self::new()
    }
}

impl Environment for CliffWalkingEnv {
    fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    fn n_actions(&self) -> usize {
        N_ACTIONS
    }

    fn step_limit(&self) -> u32 {
        STEP_LIMIT
    }

    fn reset(&mut self, _seed: u64) -> Observation {
        self.state = START;
        self.clock.reset();
        Observation::Discrete(START)
    }

    fn step(&mut self, action: usize) -> Result<StepOutcome> {
        self.clock.check_can_step(N_ACTIONS, action)?;
        let (next, reward, terminated) = transition(self.state, action);
        let truncated = self.clock.tick(terminated);
        self.state = next;
        Ok(StepOutcome {
            next_obs: Observation::Discrete(next),
            external_reward: reward,
            terminated,
            truncated,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn reset_is_always_the_start_cell() {
        let mut env = CliffWalkingEnv::new();
        for seed in [0, 1, 99] {
            assert_eq!(env.reset(seed), Observation::Discrete(START));
        }
    }

    #[test]
    fn stepping_into_the_cliff_teleports_to_start() {
        let (next, reward, terminated) = transition(36, 1);
        assert_eq!((next, reward, terminated), (36, -100.0, false));
    }

    #[test]
    fn moving_up_from_start() {
        let (next, reward, _) = transition(36, 0);
        assert_eq!(next, 24);
        assert_eq!(reward, -1.0);
    }

    #[test]
    fn entering_the_goal_terminates() {
        let (next, reward, terminated) = transition(35, 2);
        assert_eq!((next, terminated), (47, true));
        assert_eq!(reward, -1.0);
    }

    #[test]
    fn edges_clamp() {
        assert_eq!(move_clamped(0, 0), 0);
        assert_eq!(move_clamped(0, 3), 0);
        assert_eq!(move_clamped(11, 1), 11);
    }

    #[test]
    fn truncates_exactly_at_step_300() {
        let mut env = CliffWalkingEnv::new();
        env.reset(0);
        for i in 1..=STEP_LIMIT {
            // bounce up/down in the first column; never terminates
            let out = env.step(if i % 2 == 1 { 0 } else { 2 }).unwrap();
            assert!(!out.terminated);
            assert_eq!(out.truncated, i == STEP_LIMIT, "step {i}");
        }
        assert!(matches!(env.step(0), Err(Error::Contract(_))));
    }

    #[test]
    fn bad_action_is_a_contract_error() {
        let mut env = CliffWalkingEnv::new();
        env.reset(0);
        assert!(matches!(env.step(4), Err(Error::Contract(_))));
    }
}
