//! Goal-conditioning wrapper.
//!
//! Augments observations with an encoded goal, decides goal success (exact
//! match for discrete spaces, Euclidean distance over min-max-normalized
//! dimensions for box spaces), terminates the episode on success, and keeps
//! the environment's own reward out of the learner's sight: the wrapper
//! reports it only through `hidden_external_reward`, which feeds evaluation
//! logs and nothing else.
//!
//! The internal reward convention is 1 on goal achievement and 0 otherwise,
//! identical for live steps and hindsight-relabeled steps.

use crate::env::{Environment, Observation, SpaceDescriptor, StepOutcome};
use crate::error::{Error, Result};

/// Default success tolerance for box spaces, in normalized units.
pub const DEFAULT_TOLERANCE: f64 = 0.1;

/// A target observation plus the success tolerance (ignored for discrete
/// spaces, which match exactly).
#[derive(Clone, Debug, PartialEq)]
pub struct GoalSpec {
    pub point: Observation,
    pub tolerance: f64,
}

impl GoalSpec {
    pub fn new(point: Observation, tolerance: f64) -> Self {
        GoalSpec { point, tolerance }
    }
}

/// Goal success: exact index match for discrete spaces; for box spaces the
/// Euclidean norm of the per-dimension normalized difference must be below
/// the tolerance. Panics if observation and goal live in different spaces.
pub fn evaluate_goal(obs: &Observation, goal: &GoalSpec, space: &SpaceDescriptor) -> bool {
    match (space, obs, &goal.point) {
        (SpaceDescriptor::Discrete { .. }, Observation::Discrete(o), Observation::Discrete(g)) => {
            o == g
        }
        (
            SpaceDescriptor::Box { low, high },
            Observation::Continuous(o),
            Observation::Continuous(g),
        ) => {
            assert_eq!(o.len(), low.len(), "observation dimension mismatch");
            assert_eq!(g.len(), low.len(), "goal dimension mismatch");
            assert!(goal.tolerance > 0.0, "box goals need a positive tolerance");
            let dist2: f64 = o
                .iter()
                .zip(g.iter())
                .zip(low.iter().zip(high))
                .map(|((ov, gv), (l, h))| {
                    let d = (ov - gv) / (h - l);
                    d * d
                })
                .sum();
            dist2.sqrt() < goal.tolerance
        }
        _ => panic!("observation and goal do not share the wrapper's space"),
    }
}

/// One step through the wrapper. `goal_success` implies `terminated` and
/// `internal_reward == 1`.
#[derive(Clone, Debug)]
pub struct GoalStepOutcome {
    /// Encoded observation followed by the encoded goal.
    pub augmented_obs: Vec<f32>,
    pub internal_reward: f32,
    pub goal_success: bool,
    pub terminated: bool,
    pub truncated: bool,
    /// The environment's own reward; logged, never fed to the learner.
    pub hidden_external_reward: f64,
    /// Raw next observation (for statistics and replay storage).
    pub next_obs: Observation,
    /// True when the inner environment itself terminated this step.
    pub inner_terminated: bool,
}

pub struct GoalWrapper<E: Environment> {
    inner: E,
    goal: Option<GoalSpec>,
    goal_enc: Vec<f32>,
    awaiting_goal: bool,
    episode_live: bool,
}

impl<E: Environment> GoalWrapper<E> {
    pub fn new(inner: E) -> Self {
        GoalWrapper {
            inner,
            goal: None,
            goal_enc: Vec::new(),
            awaiting_goal: false,
            episode_live: false,
        }
    }

    pub fn space(&self) -> &SpaceDescriptor {
        self.inner.space()
    }

    pub fn n_actions(&self) -> usize {
        self.inner.n_actions()
    }

    /// Width of the augmented observation: encoded observation plus encoded
    /// goal, i.e. twice the space encoding width.
    pub fn augmented_width(&self) -> usize {
        2 * self.inner.space().encoding_width()
    }

    pub fn goal(&self) -> Option<&GoalSpec> {
        self.goal.as_ref()
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn reset(&mut self, seed: u64) -> Observation {
        let obs = self.inner.reset(seed);
        self.goal = None;
        self.goal_enc.clear();
        self.awaiting_goal = true;
        self.episode_live = true;
        obs
    }

    /// Fix the episode's goal. Only legal at the episode boundary (after
    /// `reset`, before the first step); goals are not re-selected mid-episode.
    pub fn set_goal(&mut self, goal: GoalSpec) -> Result<()> {
        if !self.awaiting_goal {
            return Err(Error::contract(
                "set_goal must be called at the episode boundary (after reset, before stepping)",
            ));
        }
        if !self.inner.space().contains(&goal.point) {
            return Err(Error::contract("goal lies outside the observation space"));
        }
        self.goal_enc = self.inner.space().encode(&goal.point);
        self.goal = Some(goal);
        self.awaiting_goal = false;
        Ok(())
    }

    /// Encode an observation and append the cached goal encoding.
    pub fn augment(&self, obs: &Observation) -> Vec<f32> {
        assert!(self.goal.is_some(), "augment requires an active goal");
        let space = self.inner.space();
        let w = space.encoding_width();
        let mut out = vec![0.0; 2 * w];
        space.encode_into(obs, &mut out[..w]);
        out[w..].copy_from_slice(&self.goal_enc);
        out
    }

    pub fn step(&mut self, action: usize) -> Result<GoalStepOutcome> {
        let goal = self
            .goal
            .as_ref()
            .ok_or_else(|| Error::contract("step called with no active goal"))?;
        let StepOutcome {
            next_obs,
            external_reward,
            terminated: inner_terminated,
            truncated: inner_truncated,
        } = self.inner.step(action)?;

        let goal_success = evaluate_goal(&next_obs, goal, self.inner.space());
        let terminated = goal_success || inner_terminated;
        let truncated = !terminated && inner_truncated;
        if terminated || truncated {
            self.episode_live = false;
        }
        Ok(GoalStepOutcome {
            augmented_obs: self.augment(&next_obs),
            internal_reward: if goal_success { 1.0 } else { 0.0 },
            goal_success,
            terminated,
            truncated,
            hidden_external_reward: external_reward,
            next_obs,
            inner_terminated,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{cliff, frozen, CliffWalkingEnv, FrozenLakeEnv};

    fn pmc_space() -> SpaceDescriptor {
        SpaceDescriptor::bounded(vec![-1.8, -0.07], vec![0.6, 0.07])
    }

    #[test]
    fn identical_observation_succeeds_in_any_space() {
        let d = SpaceDescriptor::discrete(48);
        let g = GoalSpec::new(Observation::Discrete(12), DEFAULT_TOLERANCE);
        assert!(evaluate_goal(&Observation::Discrete(12), &g, &d));

        let b = pmc_space();
        let g = GoalSpec::new(Observation::Continuous(vec![-0.3, 0.01]), DEFAULT_TOLERANCE);
        assert!(evaluate_goal(&Observation::Continuous(vec![-0.3, 0.01]), &g, &b));
    }

    #[test]
    fn discrete_matching_is_exact() {
        let d = SpaceDescriptor::discrete(16);
        let g = GoalSpec::new(Observation::Discrete(15), DEFAULT_TOLERANCE);
        assert!(!evaluate_goal(&Observation::Discrete(14), &g, &d));
    }

    #[test]
    fn normalized_distance_hand_value() {
        // |-1.55 - (-1.6)| / 2.4 = 0.0208... < 0.1
        let g = GoalSpec::new(Observation::Continuous(vec![-1.6, 0.0]), DEFAULT_TOLERANCE);
        let obs = Observation::Continuous(vec![-1.55, 0.0]);
        assert!(evaluate_goal(&obs, &g, &pmc_space()));
        // and just outside: a velocity mismatch of 0.02 normalizes to 0.143
        let obs = Observation::Continuous(vec![-1.6, 0.02]);
        assert!(!evaluate_goal(&obs, &g, &pmc_space()));
    }

    #[test]
    fn reaching_the_goal_terminates_with_internal_reward_one() {
        let mut w = GoalWrapper::new(CliffWalkingEnv::new());
        w.reset(0);
        w.set_goal(GoalSpec::new(Observation::Discrete(24), DEFAULT_TOLERANCE))
            .unwrap();
        let out = w.step(0).unwrap(); // up: 36 -> 24
        assert!(out.goal_success);
        assert!(out.terminated);
        assert_eq!(out.internal_reward, 1.0);
        assert!(!out.inner_terminated);
        assert_eq!(out.hidden_external_reward, -1.0);
    }

    #[test]
    fn inner_termination_with_unreached_goal_is_failure() {
        // deterministic frozen lake: 0 -> down -> 4 -> down -> 8 ... pick a
        // path into a hole: 1 -> down -> 5. Start at 0, go right then down.
        let mut w = GoalWrapper::new(FrozenLakeEnv::new(false));
        w.reset(0);
        w.set_goal(GoalSpec::new(
            Observation::Discrete(frozen::GOAL),
            DEFAULT_TOLERANCE,
        ))
        .unwrap();
        let out = w.step(1).unwrap(); // 0 -> 1
        assert!(!out.terminated);
        let out = w.step(2).unwrap(); // 1 -> 5 (hole)
        assert!(out.terminated);
        assert!(out.inner_terminated);
        assert!(!out.goal_success);
        assert_eq!(out.internal_reward, 0.0);
    }

    #[test]
    fn truncation_with_unreached_goal_passes_through() {
        let mut w = GoalWrapper::new(CliffWalkingEnv::new());
        w.reset(0);
        w.set_goal(GoalSpec::new(Observation::Discrete(0), DEFAULT_TOLERANCE))
            .unwrap();
        let mut last = None;
        for i in 0..cliff::STEP_LIMIT {
            // bounce between 36 and 24; never reaches cell 0
            last = Some(w.step(if i % 2 == 0 { 2 } else { 0 }).unwrap());
        }
        let last = last.unwrap();
        assert!(last.truncated);
        assert!(!last.terminated);
        assert!(!last.goal_success);
        assert_eq!(last.internal_reward, 0.0);
    }

    #[test]
    fn augmentation_is_observation_then_goal() {
        let mut w = GoalWrapper::new(FrozenLakeEnv::new(true));
        w.reset(9);
        w.set_goal(GoalSpec::new(Observation::Discrete(15), DEFAULT_TOLERANCE))
            .unwrap();
        assert_eq!(w.augmented_width(), 2 * 16);
        let aug = w.augment(&Observation::Discrete(3));
        assert_eq!(aug.len(), 32);
        assert_eq!(aug[3], 1.0);
        assert_eq!(aug[16 + 15], 1.0);
        assert_eq!(aug.iter().sum::<f32>(), 2.0);
        // goal slice decodes back to the goal exactly
        let space = w.space().clone();
        assert_eq!(space.decode(&aug[16..]), Observation::Discrete(15));
    }

    #[test]
    fn set_goal_mid_episode_is_a_contract_error() {
        let mut w = GoalWrapper::new(CliffWalkingEnv::new());
        w.reset(0);
        w.set_goal(GoalSpec::new(Observation::Discrete(30), DEFAULT_TOLERANCE))
            .unwrap();
        w.step(0).unwrap();
        let err = w
            .set_goal(GoalSpec::new(Observation::Discrete(31), DEFAULT_TOLERANCE))
            .unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn stepping_without_a_goal_is_a_contract_error() {
        let mut w = GoalWrapper::new(CliffWalkingEnv::new());
        w.reset(0);
        assert!(matches!(w.step(0), Err(Error::Contract(_))));
    }

    #[test]
    fn goal_outside_the_space_is_rejected() {
        let mut w = GoalWrapper::new(FrozenLakeEnv::new(true));
        w.reset(0);
        let err = w
            .set_goal(GoalSpec::new(Observation::Discrete(16), DEFAULT_TOLERANCE))
            .unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }
}
