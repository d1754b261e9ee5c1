//! Replay buffers.
//!
//! [`HerBuffer`] stores whole episodes and relabels at sampling time with the
//! "future" strategy: with probability 4/5 a drawn transition gets its goal
//! replaced by an observation from a uniformly drawn future step of the same
//! episode (the transition's own next observation being the minimal future
//! element), and its reward/terminal flags are recomputed against the new
//! goal. Relabeled goal achievement terminates, matching the live wrapper.
//!
//! [`UniformReplay`] is the plain per-step ring buffer the external-reward
//! baseline trains from.

use std::collections::VecDeque;

use rand::Rng;

use crate::env::{Observation, SpaceDescriptor};
use crate::error::{Error, Result};
use crate::goal::{evaluate_goal, GoalSpec};

/// One goal-conditioned step as stored in the buffer and replayed to the
/// learner. `terminal` is true iff the goal was reached at `next_obs` or the
/// inner environment terminated; truncation never sets it.
#[derive(Clone, Debug)]
pub struct Transition {
    pub obs: Observation,
    pub goal: GoalSpec,
    pub action: usize,
    pub internal_reward: f32,
    pub next_obs: Observation,
    pub terminal: bool,
    /// Environment-caused termination, independent of the goal. Needed to
    /// recompute `terminal` under a relabeled goal.
    pub inner_terminated: bool,
    pub episode_id: u64,
    pub step_in_episode: u32,
    episode_len: u32,
}

impl Transition {
    /// Bookkeeping fields (`episode_id`, `step_in_episode`) are assigned by
    /// [`HerBuffer::append_episode`].
    pub fn new(
        obs: Observation,
        goal: GoalSpec,
        action: usize,
        internal_reward: f32,
        next_obs: Observation,
        terminal: bool,
        inner_terminated: bool,
    ) -> Self {
        Transition {
            obs,
            goal,
            action,
            internal_reward,
            next_obs,
            terminal,
            inner_terminated,
            episode_id: 0,
            step_in_episode: 0,
            episode_len: 0,
        }
    }
}

/// Fraction of sampled transitions that get a hindsight goal: four relabeled
/// draws for every unaltered one.
pub const RELABEL_PROB: f64 = 0.8;

/// Episode-preserving ring buffer with hindsight relabeling at sampling time.
pub struct HerBuffer {
    data: VecDeque<Transition>,
    /// Lengths of stored episodes, oldest first. Episodes are contiguous in
    /// `data`, so future lookups are O(1) index arithmetic.
    episode_lens: VecDeque<u32>,
    capacity: usize,
    space: SpaceDescriptor,
    next_episode_id: u64,
    sampled: u64,
    relabeled: u64,
}

impl HerBuffer {
    pub fn new(capacity: usize, space: SpaceDescriptor) -> Self {
        assert!(capacity > 0, "buffer capacity must be positive");
        HerBuffer {
            data: VecDeque::new(),
            episode_lens: VecDeque::new(),
            capacity,
            space,
            next_episode_id: 0,
            sampled: 0,
            relabeled: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn episode_count(&self) -> usize {
        self.episode_lens.len()
    }

    /// `(sampled, relabeled)` counters since construction.
    pub fn sample_stats(&self) -> (u64, u64) {
        (self.sampled, self.relabeled)
    }

    /// Store one episode contiguously, assigning episode id and step numbers.
    /// Whole oldest episodes are evicted once capacity is exceeded.
    pub fn append_episode(&mut self, mut episode: Vec<Transition>) -> Result<()> {
        if episode.is_empty() {
            return Err(Error::contract("append_episode requires a non-empty episode"));
        }
        if episode.len() > self.capacity {
            return Err(Error::contract(format!(
                "episode of {} steps exceeds buffer capacity {}",
                episode.len(),
                self.capacity
            )));
        }
        let id = self.next_episode_id;
        self.next_episode_id += 1;
        let len = episode.len() as u32;
        for (i, t) in episode.iter_mut().enumerate() {
            t.episode_id = id;
            t.step_in_episode = i as u32;
            t.episode_len = len;
        }
        while self.data.len() + episode.len() > self.capacity {
            let oldest = self
                .episode_lens
                .pop_front()
                .expect("non-empty buffer over capacity");
            for _ in 0..oldest {
                self.data.pop_front();
            }
        }
        self.episode_lens.push_back(len);
        self.data.extend(episode);
        Ok(())
    }

    /// Draw `batch_size` transitions uniformly; each is relabeled with
    /// probability [`RELABEL_PROB`].
    pub fn sample_batch(&mut self, batch_size: usize, rng: &mut impl Rng) -> Vec<Transition> {
        assert!(!self.data.is_empty(), "sample_batch on an empty buffer");
        let mut out = Vec::with_capacity(batch_size);
        for _ in 0..batch_size {
            let idx = rng.gen_range(0..self.data.len());
            self.sampled += 1;
            if rng.gen::<f64>() < RELABEL_PROB {
                self.relabeled += 1;
                out.push(self.relabel(idx, rng));
            } else {
                out.push(self.data[idx].clone());
            }
        }
        out
    }

    /// "Future" relabeling: replacement goal drawn from the observations the
    /// episode actually produced after this step.
    fn relabel(&self, idx: usize, rng: &mut impl Rng) -> Transition {
        let t = &self.data[idx];
        let step = t.step_in_episode;
        let last = t.episode_len - 1;
        let future_step = rng.gen_range(step..=last);
        let future_idx = idx + (future_step - step) as usize;
        let new_point = self.data[future_idx].next_obs.clone();

        let mut relabeled = t.clone();
        relabeled.goal = GoalSpec::new(new_point, t.goal.tolerance);
        let success = evaluate_goal(&relabeled.next_obs, &relabeled.goal, &self.space);
        relabeled.internal_reward = if success { 1.0 } else { 0.0 };
        relabeled.terminal = success || relabeled.inner_terminated;
        relabeled
    }
}

/// One baseline step: external reward, no goal.
#[derive(Clone, Debug)]
pub struct BaselineTransition {
    pub obs: Observation,
    pub action: usize,
    pub reward: f32,
    pub next_obs: Observation,
    pub terminal: bool,
}

/// Plain uniform replay for the external-reward baseline.
pub struct UniformReplay {
    data: VecDeque<BaselineTransition>,
    capacity: usize,
}

impl UniformReplay {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "buffer capacity must be positive");
        UniformReplay {
            data: VecDeque::new(),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn push(&mut self, t: BaselineTransition) {
        if self.data.len() == self.capacity {
            self.data.pop_front();
        }
        self.data.push_back(t);
    }

    pub fn sample_batch(&self, batch_size: usize, rng: &mut impl Rng) -> Vec<BaselineTransition> {
        assert!(!self.data.is_empty(), "sample_batch on an empty buffer");
        (0..batch_size)
            .map(|_| self.data[rng.gen_range(0..self.data.len())].clone())
            .collect()
    }
}
