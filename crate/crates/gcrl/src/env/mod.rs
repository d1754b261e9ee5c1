//! Environment abstraction: observation/action spaces, the step/reset
//! contract, and truncation bookkeeping.
//!
//! Observations are either a discrete state index or a real vector. For the
//! learner, discrete observations are one-hot encoded and vector observations
//! are min-max normalized to [0,1] per dimension using the space bounds; the
//! same normalization backs goal distances.

pub mod cliff;
pub mod frozen;
pub mod pmc;

pub use cliff::CliffWalkingEnv;
pub use frozen::FrozenLakeEnv;
pub use pmc::PathologicalMountainCarEnv;

use crate::error::{Error, Result};
use rand::Rng;

/// A point in an environment's observation space.
#[derive(Clone, Debug, PartialEq)]
pub enum Observation {
    Discrete(usize),
    Continuous(Vec<f64>),
}

impl Observation {
    pub fn as_discrete(&self) -> Option<usize> {
        match self {
            Observation::Discrete(i) => Some(*i),
            Observation::Continuous(_) => None,
        }
    }

    pub fn as_continuous(&self) -> Option<&[f64]> {
        match self {
            Observation::Discrete(_) => None,
            Observation::Continuous(v) => Some(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceDescriptor {
    Discrete { n: usize },
    Box { low: Vec<f64>, high: Vec<f64> },
}

impl SpaceDescriptor {
    pub fn discrete(n: usize) -> Self {
        assert!(n >= 1, "discrete space needs at least one state");
        SpaceDescriptor::Discrete { n }
    }

    pub fn bounded(low: Vec<f64>, high: Vec<f64>) -> Self {
        assert_eq!(low.len(), high.len(), "box bounds dimension mismatch");
        assert!(
            low.iter().zip(&high).all(|(l, h)| l < h),
            "box bounds must satisfy low < high"
        );
        SpaceDescriptor::Box { low, high }
    }

    /// Width of the learner encoding: one-hot size for discrete, dimension
    /// for box.
    pub fn encoding_width(&self) -> usize {
        match self {
            SpaceDescriptor::Discrete { n } => *n,
            SpaceDescriptor::Box { low, .. } => low.len(),
        }
    }

    pub fn contains(&self, obs: &Observation) -> bool {
        match (self, obs) {
            (SpaceDescriptor::Discrete { n }, Observation::Discrete(i)) => i < n,
            (SpaceDescriptor::Box { low, high }, Observation::Continuous(v)) => {
                v.len() == low.len()
                    && v.iter()
                        .zip(low.iter().zip(high))
                        .all(|(x, (l, h))| x >= l && x <= h)
            }
            _ => false,
        }
    }

    /// Min-max normalization of a box point to [0,1] per dimension.
    pub fn normalize(&self, point: &[f64]) -> Vec<f64> {
        match self {
            SpaceDescriptor::Box { low, high } => point
                .iter()
                .zip(low.iter().zip(high))
                .map(|(x, (l, h))| (x - l) / (h - l))
                .collect(),
            SpaceDescriptor::Discrete { .. } => panic!("normalize called on a discrete space"),
        }
    }

    /// Write the learner encoding of `obs` into `out` (length must equal
    /// [`SpaceDescriptor::encoding_width`]).
    pub fn encode_into(&self, obs: &Observation, out: &mut [f32]) {
        assert_eq!(out.len(), self.encoding_width(), "encoding buffer size mismatch");
        match (self, obs) {
            (SpaceDescriptor::Discrete { n }, Observation::Discrete(i)) => {
                assert!(i < n, "discrete observation {i} out of range (n={n})");
                out.fill(0.0);
                out[*i] = 1.0;
            }
            (SpaceDescriptor::Box { low, high }, Observation::Continuous(v)) => {
                assert_eq!(v.len(), low.len(), "observation dimension mismatch");
                for (o, (x, (l, h))) in out.iter_mut().zip(v.iter().zip(low.iter().zip(high))) {
                    *o = ((x - l) / (h - l)) as f32;
                }
            }
            _ => panic!("observation does not belong to this space"),
        }
    }

    pub fn encode(&self, obs: &Observation) -> Vec<f32> {
        let mut out = vec![0.0; self.encoding_width()];
        self.encode_into(obs, &mut out);
        out
    }

    /// Inverse of [`SpaceDescriptor::encode`]: argmax for one-hot, denormalize
    /// for box (exact for discrete, within f32 rounding for box).
    pub fn decode(&self, enc: &[f32]) -> Observation {
        assert_eq!(enc.len(), self.encoding_width(), "encoding size mismatch");
        match self {
            SpaceDescriptor::Discrete { .. } => {
                let (idx, _) = enc
                    .iter()
                    .enumerate()
                    .fold((0, f32::NEG_INFINITY), |(bi, bv), (i, &v)| {
                        if v > bv {
                            (i, v)
                        } else {
                            (bi, bv)
                        }
                    });
                Observation::Discrete(idx)
            }
            SpaceDescriptor::Box { low, high } => Observation::Continuous(
                enc.iter()
                    .zip(low.iter().zip(high))
                    .map(|(e, (l, h))| l + (*e as f64) * (h - l))
                    .collect(),
            ),
        }
    }

    pub fn sample_uniform(&self, rng: &mut impl Rng) -> Observation {
        match self {
            SpaceDescriptor::Discrete { n } => Observation::Discrete(rng.gen_range(0..*n)),
            SpaceDescriptor::Box { low, high } => Observation::Continuous(
                low.iter()
                    .zip(high)
                    .map(|(l, h)| rng.gen_range(*l..*h))
                    .collect(),
            ),
        }
    }
}

/// Result of one environment step. `terminated` and `truncated` are never
/// both set: truncation is only checked when the step did not terminate.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub next_obs: Observation,
    pub external_reward: f64,
    pub terminated: bool,
    pub truncated: bool,
}

pub trait Environment {
    fn space(&self) -> &SpaceDescriptor;
    fn n_actions(&self) -> usize;
    fn step_limit(&self) -> u32;
    /// Back to the start distribution; reseeds the environment RNG and zeroes
    /// the step counter.
    fn reset(&mut self, seed: u64) -> Observation;
    fn step(&mut self, action: usize) -> Result<StepOutcome>;
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn space(&self) -> &SpaceDescriptor {
        (**self).space()
    }
    fn n_actions(&self) -> usize {
        (**self).n_actions()
    }
    fn step_limit(&self) -> u32 {
        (**self).step_limit()
    }
    fn reset(&mut self, seed: u64) -> Observation {
        (**self).reset(seed)
    }
    fn step(&mut self, action: usize) -> Result<StepOutcome> {
        (**self).step(action)
    }
}

/// Step counting shared by the concrete environments: enforces the
/// step-after-end contract and fires truncation exactly at the limit.
#[derive(Clone, Debug)]
struct EpisodeClock {
    steps: u32,
    limit: u32,
    done: bool,
}

impl EpisodeClock {
    fn new(limit: u32) -> Self {
        EpisodeClock {
            steps: 0,
            limit,
            done: false,
        }
    }

    fn reset(&mut self) {
        self.steps = 0;
        self.done = false;
    }

    fn check_can_step(&self, n_actions: usize, action: usize) -> Result<()> {
        if self.done {
            return Err(Error::contract("step called after episode end without reset"));
        }
        if action >= n_actions {
            return Err(Error::contract(format!(
                "action {action} out of range (n_actions={n_actions})"
            )));
        }
        Ok(())
    }

    /// Advance one step; returns whether this step truncates (only when the
    /// transition itself did not terminate).
    fn tick(&mut self, terminated: bool) -> bool {
        self.steps += 1;
        let truncated = !terminated && self.steps >= self.limit;
        self.done = terminated || truncated;
        truncated
    }
}

/// Environment registry keyed by config name.
pub fn make_env(name: &str, pmc_tilt: f64) -> Result<Box<dyn Environment>> {
    match name {
        "cliff_walking" => Ok(Box::new(CliffWalkingEnv::new())),
        "frozen_lake" => Ok(Box::new(FrozenLakeEnv::new(true))),
        "pathological_mountain_car" => Ok(Box::new(PathologicalMountainCarEnv::new(pmc_tilt))),
        other => Err(Error::Config(format!(
            "unknown environment '{other}' (expected cliff_walking | frozen_lake | pathological_mountain_car)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_hot_encoding_round_trips() {
        let space = SpaceDescriptor::discrete(16);
        let enc = space.encode(&Observation::Discrete(15));
        assert_eq!(enc.len(), 16);
        assert_eq!(enc[15], 1.0);
        assert_eq!(enc.iter().sum::<f32>(), 1.0);
        assert_eq!(space.decode(&enc), Observation::Discrete(15));
    }

    #[test]
    fn box_encoding_normalizes_to_unit_interval() {
        let space = SpaceDescriptor::bounded(vec![-1.8, -0.07], vec![0.6, 0.07]);
        let enc = space.encode(&Observation::Continuous(vec![-1.8, 0.07]));
        assert_eq!(enc, vec![0.0, 1.0]);
        let enc = space.encode(&Observation::Continuous(vec![-0.6, 0.0]));
        assert!((enc[0] - 0.5).abs() < 1e-6);
        assert!((enc[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn factory_knows_all_three_environments() {
        for name in ["cliff_walking", "frozen_lake", "pathological_mountain_car"] {
            assert!(make_env(name, 0.0005).is_ok(), "{name}");
        }
        assert!(make_env("lunar_lander", 0.0).is_err());
    }

    proptest! {
        #[test]
        fn box_round_trip_within_f32_rounding(x in -1.8f64..0.6, v in -0.07f64..0.07) {
            let space = SpaceDescriptor::bounded(vec![-1.8, -0.07], vec![0.6, 0.07]);
            let obs = Observation::Continuous(vec![x, v]);
            let dec = space.decode(&space.encode(&obs));
            let dec = dec.as_continuous().unwrap();
            prop_assert!((dec[0] - x).abs() < 1e-6);
            prop_assert!((dec[1] - v).abs() < 1e-7);
        }

        #[test]
        fn uniform_samples_stay_in_space(seed in 0u64..1000) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let spaces = [
                SpaceDescriptor::discrete(48),
                SpaceDescriptor::bounded(vec![-1.8, -0.07], vec![0.6, 0.07]),
            ];
            for space in &spaces {
                let obs = space.sample_uniform(&mut rng);
                prop_assert!(space.contains(&obs));
            }
        }
    }
}
