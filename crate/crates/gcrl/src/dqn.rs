//! Off-policy Q-learning: epsilon-greedy acting and TD-target training
//! against a periodically hard-copied target network.
//!
//! The same code path serves the goal-conditioned agent (internal reward,
//! observation+goal input) and the external-reward baseline (environment
//! reward, observation-only input); only the input width and the batch
//! source differ.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlp::{huber_loss, AdamState, Arch, QNetwork};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AgentHyperparams {
    pub gamma: f64,
    pub lr: f64,
    pub batch_size: usize,
    /// Run a training event every this many environment steps.
    pub train_freq: u64,
    /// Gradient steps per training event.
    pub gradient_steps: u32,
    /// Hard-copy the online network into the target every this many
    /// environment steps.
    pub target_update_interval: u64,
    pub epsilon_start: f64,
    pub epsilon_final: f64,
    /// Fraction of total training steps over which epsilon anneals linearly.
    pub epsilon_fraction: f64,
}

impl Default for AgentHyperparams {
    fn default() -> Self {
        AgentHyperparams {
            gamma: 0.95,
            lr: 0.001,
            batch_size: 512,
            train_freq: 512,
            gradient_steps: 64,
            target_update_interval: 10_000,
            epsilon_start: 1.0,
            epsilon_final: 0.05,
            epsilon_fraction: 0.1,
        }
    }
}

impl AgentHyperparams {
    /// Linear anneal from `epsilon_start` to `epsilon_final` over the first
    /// `epsilon_fraction` of training, then constant.
    pub fn epsilon_at(&self, env_steps: u64, total_steps: u64) -> f64 {
        let anneal = (total_steps as f64 * self.epsilon_fraction).max(1.0);
        let t = (env_steps as f64 / anneal).min(1.0);
        self.epsilon_start + t * (self.epsilon_final - self.epsilon_start)
    }
}

/// An encoded minibatch ready for one TD update.
pub struct TrainBatch {
    pub inputs: Array2<f32>,
    pub next_inputs: Array2<f32>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f32>,
    pub terminals: Vec<bool>,
}

pub struct DqnAgent {
    pub hp: AgentHyperparams,
    online: QNetwork<f32>,
    target: QNetwork<f32>,
    adam: AdamState<f32>,
    n_actions: usize,
    last_target_sync: u64,
    updates: u64,
}

impl DqnAgent {
    pub fn new(
        arch: Arch,
        input_width: usize,
        n_actions: usize,
        hp: AgentHyperparams,
        rng: &mut impl Rng,
    ) -> Self {
        let online = QNetwork::new(arch, input_width, n_actions, rng);
        let target = online.clone();
        let adam = AdamState::new(online.param_count(), hp.lr as f32);
        DqnAgent {
            hp,
            online,
            target,
            adam,
            n_actions,
            last_target_sync: 0,
            updates: 0,
        }
    }

    pub fn arch(&self) -> Arch {
        self.online.arch
    }

    pub fn input_width(&self) -> usize {
        self.online.input_width()
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn online_params(&self) -> Vec<f32> {
        self.online.params_flat()
    }

    /// Overwrite both networks with a flat parameter vector (checkpoint
    /// restore).
    pub fn load_params(&mut self, params: &[f32]) {
        self.online.set_params_flat(params);
        self.target.set_params_flat(params);
    }

    pub fn q_values(&self, input: &[f32]) -> Vec<f32> {
        self.online.forward_one(input)
    }

    /// Epsilon-greedy action; greedy ties break toward the lowest index.
    pub fn act(&self, input: &[f32], epsilon: f64, rng: &mut impl Rng) -> usize {
        if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
            rng.gen_range(0..self.n_actions)
        } else {
            argmax(&self.online.forward_one(input))
        }
    }

    pub fn greedy(&self, input: &[f32]) -> usize {
        argmax(&self.online.forward_one(input))
    }

    /// Greedy actions for a batch of inputs, one row each. Used by the
    /// lockstep evaluators.
    pub fn greedy_batch(&self, inputs: &Array2<f32>) -> Vec<usize> {
        let q = self.online.forward(inputs);
        q.rows()
            .into_iter()
            .map(|row| argmax(row.as_slice().expect("row contiguous")))
            .collect()
    }

    /// One TD update: `y = r + gamma * max_a Q_target(s', a)` for
    /// non-terminal transitions, `y = r` for terminal ones; Huber loss on the
    /// taken actions; one Adam step. Returns the scalar loss.
    pub fn train_step(&mut self, batch: &TrainBatch) -> Result<f64> {
        let n = batch.actions.len();
        assert_eq!(batch.inputs.nrows(), n, "batch size mismatch");
        assert_eq!(batch.next_inputs.nrows(), n, "batch size mismatch");
        assert_eq!(batch.rewards.len(), n);
        assert_eq!(batch.terminals.len(), n);

        let next_q = self.target.forward(&batch.next_inputs);
        let gamma = self.hp.gamma as f32;
        let targets: Vec<f32> = (0..n)
            .map(|i| {
                let r = batch.rewards[i];
                if batch.terminals[i] {
                    r
                } else {
                    let max = next_q.row(i).iter().copied().fold(f32::NEG_INFINITY, f32::max);
                    r + gamma * max
                }
            })
            .collect();

        let (q, cache) = self.online.forward_cached(&batch.inputs);
        let preds: Vec<f32> = (0..n).map(|i| q[[i, batch.actions[i]]]).collect();
        let (loss, dpred) = huber_loss(&preds, &targets);
        if !loss.is_finite() {
            return Err(Error::Diverged(format!("non-finite loss {loss}")));
        }

        let mut loss_grad = Array2::<f32>::zeros((n, self.n_actions));
        for i in 0..n {
            loss_grad[[i, batch.actions[i]]] = dpred[i];
        }
        let grad = self.online.backward(&cache, &loss_grad);
        let mut params = self.online.params_flat();
        self.adam.step(&mut params, &grad)?;
        self.online.set_params_flat(&params);
        self.updates += 1;
        Ok(loss)
    }

    /// Hard-copy online into target once `target_update_interval` environment
    /// steps have passed since the last sync. Returns whether a copy happened.
    pub fn maybe_update_target(&mut self, env_steps: u64) -> bool {
        if env_steps.saturating_sub(self.last_target_sync) >= self.hp.target_update_interval {
            self.target = self.online.clone();
            self.last_target_sync = env_steps;
            true
        } else {
            false
        }
    }
}

fn argmax(values: &[f32]) -> usize {
    let mut best = 0;
    let mut best_v = f32::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::Block;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn zeroed_agent(n_actions: usize) -> DqnAgent {
        let mut r = rng(0);
        let mut agent = DqnAgent::new(Arch::Simple3x256, 4, n_actions, AgentHyperparams::default(), &mut r);
        let zeros = vec![0.0; agent.online.param_count()];
        agent.load_params(&zeros);
        agent
    }

    /// Pin the output-layer bias so Q-values are hand-set constants.
    fn set_output_bias(agent: &mut DqnAgent, bias: &[f32]) {
        for net in [&mut agent.online, &mut agent.target] {
            if let Some(Block::Dense(l)) = net.net.blocks.last_mut() {
                l.bias = ndarray::Array1::from_vec(bias.to_vec());
            }
        }
    }

    #[test]
    fn epsilon_one_is_uniform_over_actions() {
        let agent = zeroed_agent(4);
        let mut r = rng(1);
        let n = 40_000;
        let mut counts = [0u32; 4];
        for _ in 0..n {
            counts[agent.act(&[0.0; 4], 1.0, &mut r)] += 1;
        }
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 / 4.0).abs() < 4.0 * sigma, "count {c}");
        }
    }

    #[test]
    fn greedy_takes_the_argmax() {
        let mut agent = zeroed_agent(3);
        set_output_bias(&mut agent, &[0.1, 0.9, 0.3]);
        let mut r = rng(2);
        assert_eq!(agent.act(&[0.0; 4], 0.0, &mut r), 1);
    }

    #[test]
    fn ties_break_toward_the_lowest_index() {
        let agent = zeroed_agent(3);
        let mut r = rng(3);
        assert_eq!(agent.act(&[0.5; 4], 0.0, &mut r), 0);
    }

    #[test]
    fn all_terminal_targets_equal_rewards() {
        // zeroed networks predict 0, so the loss is exactly huber(0, r)
        let mut agent = zeroed_agent(2);
        let rewards = vec![0.25_f32, -0.5, 1.0, 0.0];
        let batch = TrainBatch {
            inputs: Array2::zeros((4, 4)),
            next_inputs: Array2::zeros((4, 4)),
            actions: vec![0, 1, 0, 1],
            rewards: rewards.clone(),
            terminals: vec![true; 4],
        };
        let loss = agent.train_step(&batch).unwrap();
        let (expect, _) = huber_loss(&[0.0_f32; 4], &rewards);
        approx::assert_relative_eq!(loss, expect, max_relative = 1e-6);
    }

    #[test]
    fn single_transition_target_matches_hand_computation() {
        // target net fixed Q(s',.) = {0.2, 0.6}: y = 1 + 0.95 * 0.6 = 1.57;
        // pred = 0.2, |e| = 1.37 -> linear branch, loss = 0.87
        let mut agent = zeroed_agent(2);
        set_output_bias(&mut agent, &[0.2, 0.6]);
        let batch = TrainBatch {
            inputs: Array2::zeros((1, 4)),
            next_inputs: Array2::zeros((1, 4)),
            actions: vec![0],
            rewards: vec![1.0],
            terminals: vec![false],
        };
        let loss = agent.train_step(&batch).unwrap();
        approx::assert_relative_eq!(loss, 0.87, max_relative = 1e-5);
    }

    #[test]
    fn terminal_flag_cuts_the_bootstrap() {
        // same transition, terminal vs not: targets 1.0 vs 1.57
        for (terminal, expect_loss) in [(true, 0.8 * 0.8 / 2.0), (false, 0.87)] {
            let mut agent = zeroed_agent(2);
            set_output_bias(&mut agent, &[0.2, 0.6]);
            let batch = TrainBatch {
                inputs: Array2::zeros((1, 4)),
                next_inputs: Array2::zeros((1, 4)),
                actions: vec![0],
                rewards: vec![1.0],
                terminals: vec![terminal],
            };
            let loss = agent.train_step(&batch).unwrap();
            approx::assert_relative_eq!(loss, expect_loss, max_relative = 1e-5);
        }
    }

    #[test]
    fn identical_transitions_train_identically() {
        let mut r = rng(9);
        let mut agent = DqnAgent::new(Arch::Simple3x256, 4, 2, AgentHyperparams::default(), &mut r);
        let row = [0.3_f32, -0.2, 0.1, 0.9];
        let inputs = array![row, row];
        let batch = TrainBatch {
            inputs: inputs.clone(),
            next_inputs: inputs,
            actions: vec![1, 1],
            rewards: vec![0.5, 0.5],
            terminals: vec![false, false],
        };
        let loss = agent.train_step(&batch).unwrap();
        assert!(loss.is_finite());
        // both rows fed the same input: the updated net stays symmetric in them
        let q = agent.q_values(&row);
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn target_sync_happens_exactly_at_the_interval() {
        let mut r = rng(4);
        let mut agent = DqnAgent::new(
            Arch::Simple3x256,
            4,
            2,
            AgentHyperparams {
                target_update_interval: 100,
                ..Default::default()
            },
            &mut r,
        );
        // drift the online net
        let mut p = agent.online_params();
        p[0] += 1.0;
        agent.online.set_params_flat(&p);

        assert!(!agent.maybe_update_target(99));
        assert_ne!(agent.target.params_flat(), agent.online.params_flat());
        assert!(agent.maybe_update_target(100));
        assert_eq!(agent.target.params_flat(), agent.online.params_flat());
        // idempotent while online is frozen
        assert!(!agent.maybe_update_target(150));
        assert!(agent.maybe_update_target(200));
        assert_eq!(agent.target.params_flat(), agent.online.params_flat());
    }

    #[test]
    fn epsilon_schedule_is_linear_then_flat() {
        let hp = AgentHyperparams::default();
        assert_eq!(hp.epsilon_at(0, 1000), 1.0);
        approx::assert_relative_eq!(hp.epsilon_at(50, 1000), 0.525, max_relative = 1e-9);
        approx::assert_relative_eq!(hp.epsilon_at(100, 1000), 0.05, max_relative = 1e-9);
        approx::assert_relative_eq!(hp.epsilon_at(800, 1000), 0.05, max_relative = 1e-9);
    }
}
