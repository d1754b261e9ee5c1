//! Frozen Lake, canonical 4x4 map, slippery transitions.
//!
//! The executed direction is the intended one or either perpendicular, each
//! with probability 1/3. Holes and the goal are absorbing; the goal pays +1,
//! everything else 0. Episodes truncate after 100 steps.

use super::{EpisodeClock, Environment, Observation, SpaceDescriptor, StepOutcome};
use crate::error::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SIDE: usize = 4;
pub const N_STATES: usize = SIDE * SIDE;
pub const N_ACTIONS: usize = 4;
pub const START: usize = 0;
pub const GOAL: usize = 15;
pub const HOLES: [usize; 4] = [5, 7, 11, 12];
pub const STEP_LIMIT: u32 = 100;

pub fn is_hole(state: usize) -> bool {
    HOLES.contains(&state)
}

pub fn is_terminal_cell(state: usize) -> bool {
    is_hole(state) || state == GOAL
}

/// Directions share the cliff ordering: 0=up, 1=right, 2=down, 3=left.
pub fn move_clamped(state: usize, direction: usize) -> usize {
    let (mut row, mut col) = (state / SIDE, state % SIDE);
    match direction {
        0 => row = row.saturating_sub(1),
        1 => col = (col + 1).min(SIDE - 1),
        2 => row = (row + 1).min(SIDE - 1),
        3 => col = col.saturating_sub(1),
        _ => panic!("frozen lake direction out of range"),
    }
    row * SIDE + col
}

/// The three directions a slippery action can execute as: intended and both
/// perpendiculars.
pub fn slip_directions(action: usize) -> [usize; 3] {
    [(action + 3) % 4, action, (action + 1) % 4]
}

/// Deterministic part of the step once a direction is fixed:
/// `(next_state, reward, terminated)`.
pub fn transition(state: usize, direction: usize) -> (usize, f64, bool) {
    let next = move_clamped(state, direction);
    if next == GOAL {
        (next, 1.0, true)
    } else if is_hole(next) {
        (next, 0.0, true)
    } else {
        (next, 0.0, false)
    }
}

/// Sample one slippery step: uniform over the three slip directions.
pub fn sample_transition(state: usize, action: usize, rng: &mut impl Rng) -> (usize, f64, bool) {
    let dirs = slip_directions(action);
    transition(state, dirs[rng.gen_range(0..3)])
}

pub struct FrozenLakeEnv {
    space: SpaceDescriptor,
    state: usize,
    slippery: bool,
    rng: ChaCha8Rng,
    clock: EpisodeClock,
}

impl FrozenLakeEnv {
    pub fn new(slippery: bool) -> Self {
        FrozenLakeEnv {
            space: SpaceDescriptor::discrete(N_STATES),
            state: START,
            slippery,
            rng: ChaCha8Rng::seed_from_u64(0),
            clock: EpisodeClock::new(STEP_LIMIT),
        }
    }

    pub fn state(&self) -> usize {
        self.state
    }
}

impl Environment for FrozenLakeEnv {
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
        self.state = START;
        self.rng = ChaCha8Rng::seed_from_u64(seed);
        self.clock.reset();
        Observation::Discrete(START)
    }

    fn step(&mut self, action: usize) -> Result<StepOutcome> {
        self.clock.check_can_step(N_ACTIONS, action)?;
        let (next, reward, terminated) = if self.slippery {
            sample_transition(self.state, action, &mut self.rng)
        } else {
            transition(self.state, action)
        };
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
    fn reset_is_cell_zero() {
        let mut env = FrozenLakeEnv::new(true);
        assert_eq!(env.reset(3), Observation::Discrete(0));
    }

    #[test]
    fn entering_a_hole_terminates_with_zero_reward() {
        // 1 -> down -> 5 (hole)
        assert_eq!(transition(1, 2), (5, 0.0, true));
    }

    #[test]
    fn entering_the_goal_terminates_with_reward_one() {
        // 14 -> right -> 15 (goal)
        assert_eq!(transition(14, 1), (15, 1.0, true));
    }

    #[test]
    fn slip_directions_are_intended_and_perpendiculars() {
        assert_eq!(slip_directions(0), [3, 0, 1]);
        assert_eq!(slip_directions(1), [0, 1, 2]);
        assert_eq!(slip_directions(3), [2, 3, 0]);
    }

    #[test]
    fn realized_directions_are_each_near_one_third() {
        // 30k single-step samples from a fixed (state, action); each slip
        // direction lands on a distinct next state from state 9 moving up.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = 30_000;
        let mut counts = [0u32; 3];
        let dirs = slip_directions(0);
        let outcomes: Vec<usize> = dirs.iter().map(|&d| move_clamped(9, d)).collect();
        for _ in 0..n {
            let (next, _, _) = sample_transition(9, 0, &mut rng);
            let idx = outcomes.iter().position(|&o| o == next).unwrap();
            counts[idx] += 1;
        }
        // 3 sigma for a binomial with p=1/3
        let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for (i, &c) in counts.iter().enumerate() {
            let dev = (c as f64 - n as f64 / 3.0).abs();
            assert!(dev <= 3.0 * sigma, "direction {i}: count {c}, dev {dev:.1}");
        }
    }

    #[test]
    fn truncates_exactly_at_step_100() {
        let mut env = FrozenLakeEnv::new(false); // deterministic path avoids holes
        env.reset(0);
        for i in 1..=STEP_LIMIT {
            // bounce left against the wall from the start cell
            let out = env.step(3).unwrap();
            assert!(!out.terminated);
            assert_eq!(out.truncated, i == STEP_LIMIT);
        }
        assert!(matches!(env.step(3), Err(Error::Contract(_))));
    }

    #[test]
    fn same_seed_same_episode() {
        let roll = |seed| {
            let mut env = FrozenLakeEnv::new(true);
            env.reset(seed);
            let mut states = Vec::new();
            for a in [1, 1, 2, 2, 1, 0, 3, 2, 1, 1] {
                match env.step(a) {
                    Ok(out) => {
                        states.push(out.next_obs.as_discrete().unwrap());
                        if out.terminated || out.truncated {
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
            states
        };
        assert_eq!(roll(7), roll(7));
    }
}
