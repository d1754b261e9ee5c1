//! Experiment orchestration: seeded training runs (goal-conditioned and
//! baseline), the evaluation protocols, metric emission, and checkpointing.
//!
//! A goal-conditioned run never feeds the environment's reward to the
//! learner: per episode it selects a goal, rolls out with the wrapper,
//! records grid statistics and the goal outcome, appends the episode to the
//! hindsight buffer, and trains on schedule. Every `eval_interval` steps the
//! greedy policy is evaluated on the external task (with the task goal
//! supplied as episode goal) and on a spread-out goal grid.
//!
//! Identical `(config, seed)` produces byte-identical CSV output: every
//! random stream is derived from the run seed in a fixed order, and
//! evaluation episodes get seeds derived from the evaluation step.

pub mod config;
pub mod metrics;

pub use config::{Mode, RunConfig};
pub use metrics::{smooth_series, EvalRecord};

use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dqn::{DqnAgent, TrainBatch};
use crate::env::{make_env, pmc, Environment, Observation, SpaceDescriptor, StepOutcome};
use crate::error::{Error, Result};
use crate::goal::{GoalSpec, GoalStepOutcome, GoalWrapper};
use crate::mlp;
use crate::replay::{BaselineTransition, HerBuffer, Transition, UniformReplay};
use crate::select::{select_goal, GridLayout, GridStats};

/// Everything a finished (or diverged) run produced.
pub struct RunOutcome {
    pub config: RunConfig,
    pub records: Vec<EvalRecord>,
    /// Evaluation goal set (empty in baseline mode) and its CSV column names.
    pub goal_set: Vec<GoalSpec>,
    pub goal_names: Vec<String>,
    /// True when training aborted on a divergence error; `records` then hold
    /// the partial output.
    pub diverged: bool,
    pub episodes: u64,
    /// Steps at which the environment's own task succeeded during training
    /// (e.g. Pathological Mountain Car hard-summit entries).
    pub train_task_successes: u64,
    /// Goal selections that fell back to uniform for lack of statistics.
    pub goal_fallbacks: u64,
    pub agent: DqnAgent,
}

struct RngStreams {
    init: ChaCha8Rng,
    action: ChaCha8Rng,
    goal: ChaCha8Rng,
    her: ChaCha8Rng,
    env_seeds: ChaCha8Rng,
    eval_base: u64,
}

fn derive_streams(seed: u64) -> RngStreams {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    RngStreams {
        init: ChaCha8Rng::seed_from_u64(master.gen()),
        action: ChaCha8Rng::seed_from_u64(master.gen()),
        goal: ChaCha8Rng::seed_from_u64(master.gen()),
        her: ChaCha8Rng::seed_from_u64(master.gen()),
        env_seeds: ChaCha8Rng::seed_from_u64(master.gen()),
        eval_base: master.gen(),
    }
}

/// The task the environment's own reward encodes, as an evaluation goal.
pub fn external_task_goal(env: &str, tolerance: f64) -> Result<GoalSpec> {
    let point = match env {
        "cliff_walking" => Observation::Discrete(crate::env::cliff::GOAL),
        "frozen_lake" => Observation::Discrete(crate::env::frozen::GOAL),
        "pathological_mountain_car" => Observation::Continuous(vec![pmc::HARD_GOAL_X, 0.0]),
        other => return Err(Error::Config(format!("unknown environment '{other}'"))),
    };
    Ok(GoalSpec::new(point, tolerance))
}

/// The spread-out goal set evaluated during training: every state for the
/// discrete environments; a fixed 4x3 position x velocity lattice (including
/// both summits at rest) for Pathological Mountain Car.
pub fn default_goal_set(env: &str, tolerance: f64) -> Result<Vec<GoalSpec>> {
    let goals = match env {
        "cliff_walking" => (0..crate::env::cliff::N_STATES)
            .map(|s| GoalSpec::new(Observation::Discrete(s), tolerance))
            .collect(),
        "frozen_lake" => (0..crate::env::frozen::N_STATES)
            .map(|s| GoalSpec::new(Observation::Discrete(s), tolerance))
            .collect(),
        "pathological_mountain_car" => {
            let positions = [pmc::HARD_GOAL_X, -0.9, -0.2, pmc::EASY_GOAL_X];
            let velocities = [-0.035, 0.0, 0.035];
            positions
                .iter()
                .flat_map(|&x| {
                    velocities
                        .iter()
                        .map(move |&v| GoalSpec::new(Observation::Continuous(vec![x, v]), tolerance))
                })
                .collect()
        }
        other => return Err(Error::Config(format!("unknown environment '{other}'"))),
    };
    Ok(goals)
}

/// Did this wrapped step complete the environment's own task?
fn task_success_goal(env: &str, out: &GoalStepOutcome) -> bool {
    match env {
        // the cliff environment only ever terminates on its goal cell
        "cliff_walking" => out.inner_terminated,
        "frozen_lake" => out.inner_terminated && out.hidden_external_reward == 1.0,
        "pathological_mountain_car" => {
            out.inner_terminated && out.hidden_external_reward == pmc::HARD_REWARD
        }
        _ => false,
    }
}

/// Same check on a raw (baseline) step.
fn task_success_raw(env: &str, out: &StepOutcome) -> bool {
    match env {
        "cliff_walking" => out.terminated,
        "frozen_lake" => out.terminated && out.external_reward == 1.0,
        "pathological_mountain_car" => out.terminated && out.external_reward == pmc::HARD_REWARD,
        _ => false,
    }
}

pub fn run_training(config: &RunConfig) -> Result<RunOutcome> {
    match config.mode {
        Mode::GoalConditioned => run_goal_conditioned(config),
        Mode::Baseline => run_baseline(config),
    }
}

fn encode_goal_batch(space: &SpaceDescriptor, sample: &[Transition]) -> TrainBatch {
    let enc = space.encoding_width();
    let n = sample.len();
    let mut inputs = Array2::<f32>::zeros((n, 2 * enc));
    let mut next_inputs = Array2::<f32>::zeros((n, 2 * enc));
    let mut actions = Vec::with_capacity(n);
    let mut rewards = Vec::with_capacity(n);
    let mut terminals = Vec::with_capacity(n);
    for (i, t) in sample.iter().enumerate() {
        {
            let mut row = inputs.row_mut(i);
            let row = row.as_slice_mut().expect("row contiguous");
            space.encode_into(&t.obs, &mut row[..enc]);
            space.encode_into(&t.goal.point, &mut row[enc..]);
        }
        {
            let mut row = next_inputs.row_mut(i);
            let row = row.as_slice_mut().expect("row contiguous");
            space.encode_into(&t.next_obs, &mut row[..enc]);
            space.encode_into(&t.goal.point, &mut row[enc..]);
        }
        actions.push(t.action);
        rewards.push(t.internal_reward);
        terminals.push(t.terminal);
    }
    TrainBatch {
        inputs,
        next_inputs,
        actions,
        rewards,
        terminals,
    }
}

fn encode_baseline_batch(space: &SpaceDescriptor, sample: &[BaselineTransition]) -> TrainBatch {
    let enc = space.encoding_width();
    let n = sample.len();
    let mut inputs = Array2::<f32>::zeros((n, enc));
    let mut next_inputs = Array2::<f32>::zeros((n, enc));
    let mut actions = Vec::with_capacity(n);
    let mut rewards = Vec::with_capacity(n);
    let mut terminals = Vec::with_capacity(n);
    for (i, t) in sample.iter().enumerate() {
        space.encode_into(&t.obs, inputs.row_mut(i).as_slice_mut().expect("row contiguous"));
        space.encode_into(&t.next_obs, next_inputs.row_mut(i).as_slice_mut().expect("row contiguous"));
        actions.push(t.action);
        rewards.push(t.reward);
        terminals.push(t.terminal);
    }
    TrainBatch {
        inputs,
        next_inputs,
        actions,
        rewards,
        terminals,
    }
}

fn run_goal_conditioned(config: &RunConfig) -> Result<RunOutcome> {
    let mut streams = derive_streams(config.seed);
    let probe = make_env(&config.env, config.pmc_tilt)?;
    let space = probe.space().clone();
    let n_actions = probe.n_actions();
    drop(probe);

    let enc = space.encoding_width();
    let mut agent = DqnAgent::new(config.network, 2 * enc, n_actions, config.agent, &mut streams.init);
    let mut wrapper = GoalWrapper::new(make_env(&config.env, config.pmc_tilt)?);
    let mut stats = GridStats::new(GridLayout::for_space(&space, config.grid_bins));
    let mut buffer = HerBuffer::new(config.buffer_capacity, space.clone());

    let goal_set = default_goal_set(&config.env, config.goal_tolerance)?;
    let goal_names: Vec<String> = goal_set.iter().map(metrics::goal_column_name).collect();

    let mut records = Vec::new();
    let mut steps: u64 = 0;
    let mut episodes: u64 = 0;
    let mut train_task_successes: u64 = 0;
    let mut goal_fallbacks: u64 = 0;
    let mut diverged = false;

    'training: while steps < config.total_steps {
        let mut obs = wrapper.reset(streams.env_seeds.gen());
        let picked = select_goal(
            config.strategy,
            &stats,
            &config.selection,
            &space,
            config.goal_tolerance,
            &mut streams.goal,
        );
        goal_fallbacks += picked.fallback as u64;
        let goal = picked.goal;
        wrapper.set_goal(goal.clone())?;

        let mut episode = Vec::new();
        let mut episode_success = false;
        loop {
            let input = wrapper.augment(&obs);
            let epsilon = config.agent.epsilon_at(steps, config.total_steps);
            let action = agent.act(&input, epsilon, &mut streams.action);
            let out = wrapper.step(action)?;
            steps += 1;
            stats.record_step(&out.next_obs);
            if task_success_goal(&config.env, &out) {
                train_task_successes += 1;
            }
            if out.goal_success {
                episode_success = true;
            }
            let next_obs = out.next_obs.clone();
            episode.push(Transition::new(
                obs,
                goal.clone(),
                action,
                out.internal_reward,
                out.next_obs,
                out.terminated,
                out.inner_terminated,
            ));

            if steps % config.agent.train_freq == 0 && buffer.len() >= config.agent.batch_size {
                for _ in 0..config.agent.gradient_steps {
                    let sample = buffer.sample_batch(config.agent.batch_size, &mut streams.her);
                    let batch = encode_goal_batch(&space, &sample);
                    match agent.train_step(&batch) {
                        Ok(_) => {}
                        Err(Error::Diverged(_)) => {
                            diverged = true;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            agent.maybe_update_target(steps);
            if !diverged && steps % config.eval_interval == 0 {
                records.push(evaluate(config, &agent, steps, streams.eval_base, &goal_set)?);
            }
            if diverged || out.terminated || out.truncated || steps >= config.total_steps {
                break;
            }
            obs = next_obs;
        }
        stats.record_goal_outcome(&goal, episode_success);
        buffer.append_episode(episode)?;
        episodes += 1;
        if diverged {
            break 'training;
        }
    }

    Ok(RunOutcome {
        config: config.clone(),
        records,
        goal_set,
        goal_names,
        diverged,
        episodes,
        train_task_successes,
        goal_fallbacks,
        agent,
    })
}

fn run_baseline(config: &RunConfig) -> Result<RunOutcome> {
    let mut streams = derive_streams(config.seed);
    let mut env = make_env(&config.env, config.pmc_tilt)?;
    let space = env.space().clone();
    let n_actions = env.n_actions();

    let enc = space.encoding_width();
    let mut agent = DqnAgent::new(config.network, enc, n_actions, config.agent, &mut streams.init);
    let mut replay = UniformReplay::new(config.buffer_capacity);

    let mut records = Vec::new();
    let mut steps: u64 = 0;
    let mut episodes: u64 = 0;
    let mut train_task_successes: u64 = 0;
    let mut diverged = false;

    'training: while steps < config.total_steps {
        let mut obs = env.reset(streams.env_seeds.gen());
        loop {
            let input = space.encode(&obs);
            let epsilon = config.agent.epsilon_at(steps, config.total_steps);
            let action = agent.act(&input, epsilon, &mut streams.action);
            let out = env.step(action)?;
            steps += 1;
            if task_success_raw(&config.env, &out) {
                train_task_successes += 1;
            }
            replay.push(BaselineTransition {
                obs,
                action,
                reward: out.external_reward as f32,
                next_obs: out.next_obs.clone(),
                terminal: out.terminated,
            });

            if steps % config.agent.train_freq == 0 && replay.len() >= config.agent.batch_size {
                for _ in 0..config.agent.gradient_steps {
                    let sample = replay.sample_batch(config.agent.batch_size, &mut streams.her);
                    let batch = encode_baseline_batch(&space, &sample);
                    match agent.train_step(&batch) {
                        Ok(_) => {}
                        Err(Error::Diverged(_)) => {
                            diverged = true;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            agent.maybe_update_target(steps);
            if !diverged && steps % config.eval_interval == 0 {
                records.push(evaluate(config, &agent, steps, streams.eval_base, &[])?);
            }
            if diverged || out.terminated || out.truncated || steps >= config.total_steps {
                break;
            }
            obs = out.next_obs;
        }
        episodes += 1;
        if diverged {
            break 'training;
        }
    }

    Ok(RunOutcome {
        config: config.clone(),
        records,
        goal_set: Vec::new(),
        goal_names: Vec::new(),
        diverged,
        episodes,
        train_task_successes,
        goal_fallbacks: 0,
        agent,
    })
}

fn evaluate(
    config: &RunConfig,
    agent: &DqnAgent,
    steps: u64,
    eval_base: u64,
    goal_set: &[GoalSpec],
) -> Result<EvalRecord> {
    let event_seed = eval_base ^ steps.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    match config.mode {
        Mode::GoalConditioned => {
            let (mean, std, success) =
                evaluate_external(config, agent, config.eval_episodes, event_seed)?;
            let per_goal =
                evaluate_goal_grid(config, agent, goal_set, config.eval_episodes, event_seed ^ 1)?;
            let avg = per_goal.iter().sum::<f64>() / per_goal.len().max(1) as f64;
            Ok(EvalRecord {
                env_steps: steps,
                ext_reward_mean: mean,
                ext_reward_std: std,
                ext_success: success,
                avg_goal_success: Some(avg),
                per_goal_success: per_goal,
            })
        }
        Mode::Baseline => {
            let (mean, std, success) =
                evaluate_external(config, agent, config.eval_episodes, event_seed)?;
            Ok(EvalRecord {
                env_steps: steps,
                ext_reward_mean: mean,
                ext_reward_std: std,
                ext_success: success,
                avg_goal_success: None,
                per_goal_success: Vec::new(),
            })
        }
    }
}

struct GoalRolloutResult {
    goal_success: bool,
    task_success: bool,
    ext_return: f64,
}

/// Greedy goal-conditioned rollouts, run in lockstep so the forward passes
/// batch across live episodes.
fn rollout_goal_episodes(
    config: &RunConfig,
    agent: &DqnAgent,
    jobs: &[(GoalSpec, u64)],
) -> Result<Vec<GoalRolloutResult>> {
    struct Live {
        wrapper: GoalWrapper<Box<dyn Environment>>,
        obs: Observation,
        result: GoalRolloutResult,
        done: bool,
    }
    let mut eps = Vec::with_capacity(jobs.len());
    for (goal, seed) in jobs {
        let mut wrapper = GoalWrapper::new(make_env(&config.env, config.pmc_tilt)?);
        let obs = wrapper.reset(*seed);
        wrapper.set_goal(goal.clone())?;
        eps.push(Live {
            wrapper,
            obs,
            result: GoalRolloutResult {
                goal_success: false,
                task_success: false,
                ext_return: 0.0,
            },
            done: false,
        });
    }
    let width = 2 * eps[0].wrapper.space().encoding_width();
    loop {
        let live: Vec<usize> = (0..eps.len()).filter(|&i| !eps[i].done).collect();
        if live.is_empty() {
            break;
        }
        let mut inputs = Array2::<f32>::zeros((live.len(), width));
        for (row, &i) in live.iter().enumerate() {
            let aug = eps[i].wrapper.augment(&eps[i].obs);
            inputs.row_mut(row).assign(&ArrayView::from(&aug[..]));
        }
        let actions = agent.greedy_batch(&inputs);
        for (row, &i) in live.iter().enumerate() {
            let e = &mut eps[i];
            let out = e.wrapper.step(actions[row])?;
            e.result.ext_return += out.hidden_external_reward;
            if out.goal_success {
                e.result.goal_success = true;
            }
            if task_success_goal(&config.env, &out) {
                e.result.task_success = true;
            }
            if out.terminated || out.truncated {
                e.done = true;
            } else {
                e.obs = out.next_obs;
            }
        }
    }
    Ok(eps.into_iter().map(|e| e.result).collect())
}

/// Greedy evaluation on the environment's own task. Goal-conditioned agents
/// get the external task goal as their episode goal; success counts either
/// the goal evaluation or the environment's own terminal task. Returns
/// `(reward mean, reward std, success rate)`.
pub fn evaluate_external(
    config: &RunConfig,
    agent: &DqnAgent,
    episodes: usize,
    seed: u64,
) -> Result<(f64, f64, f64)> {
    let mut seed_rng = ChaCha8Rng::seed_from_u64(seed);
    match config.mode {
        Mode::GoalConditioned => {
            let goal = external_task_goal(&config.env, config.goal_tolerance)?;
            let jobs: Vec<(GoalSpec, u64)> = (0..episodes).map(|_| (goal.clone(), seed_rng.gen())).collect();
            let results = rollout_goal_episodes(config, agent, &jobs)?;
            let returns: Vec<f64> = results.iter().map(|r| r.ext_return).collect();
            let (mean, std) = metrics::mean_std(&returns);
            let success = results
                .iter()
                .filter(|r| r.goal_success || r.task_success)
                .count() as f64
                / episodes as f64;
            Ok((mean, std, success))
        }
        Mode::Baseline => {
            let space = make_env(&config.env, config.pmc_tilt)?.space().clone();
            struct Live {
                env: Box<dyn Environment>,
                obs: Observation,
                ret: f64,
                success: bool,
                done: bool,
            }
            let mut eps = Vec::with_capacity(episodes);
            for _ in 0..episodes {
                let mut env = make_env(&config.env, config.pmc_tilt)?;
                let obs = env.reset(seed_rng.gen());
                eps.push(Live {
                    env,
                    obs,
                    ret: 0.0,
                    success: false,
                    done: false,
                });
            }
            let enc = space.encoding_width();
            loop {
                let live: Vec<usize> = (0..eps.len()).filter(|&i| !eps[i].done).collect();
                if live.is_empty() {
                    break;
                }
                let mut inputs = Array2::<f32>::zeros((live.len(), enc));
                for (row, &i) in live.iter().enumerate() {
                    space.encode_into(&eps[i].obs, inputs.row_mut(row).as_slice_mut().expect("row contiguous"));
                }
                let actions = agent.greedy_batch(&inputs);
                for (row, &i) in live.iter().enumerate() {
                    let e = &mut eps[i];
                    let out = e.env.step(actions[row])?;
                    e.ret += out.external_reward;
                    if task_success_raw(&config.env, &out) {
                        e.success = true;
                    }
                    if out.terminated || out.truncated {
                        e.done = true;
                    } else {
                        e.obs = out.next_obs;
                    }
                }
            }
            let returns: Vec<f64> = eps.iter().map(|e| e.ret).collect();
            let (mean, std) = metrics::mean_std(&returns);
            let success = eps.iter().filter(|e| e.success).count() as f64 / episodes as f64;
            Ok((mean, std, success))
        }
    }
}

/// Per-goal greedy success rates over `episodes_per_goal` rollouts each.
pub fn evaluate_goal_grid(
    config: &RunConfig,
    agent: &DqnAgent,
    goal_set: &[GoalSpec],
    episodes_per_goal: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    assert!(!goal_set.is_empty(), "goal grid needs at least one goal");
    let mut seed_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::with_capacity(goal_set.len() * episodes_per_goal);
    for goal in goal_set {
        for _ in 0..episodes_per_goal {
            jobs.push((goal.clone(), seed_rng.gen()));
        }
    }
    let results = rollout_goal_episodes(config, agent, &jobs)?;
    Ok(goal_set
        .iter()
        .enumerate()
        .map(|(g, _)| {
            let from = g * episodes_per_goal;
            let hits = results[from..from + episodes_per_goal]
                .iter()
                .filter(|r| r.goal_success)
                .count();
            hits as f64 / episodes_per_goal as f64
        })
        .collect())
}

/// Run and, when `config.out` is set, emit `metrics.csv`, `manifest.json`,
/// `checkpoint.ckpt`, and `checkpoint.manifest` into it. A diverged run still
/// emits its partial records, with the manifest marked accordingly.
pub fn run_and_emit(config: &RunConfig) -> Result<RunOutcome> {
    let outcome = run_training(config)?;
    if let Some(dir) = &config.out {
        emit(dir, &outcome)?;
    }
    Ok(outcome)
}

fn emit(dir: &Path, outcome: &RunOutcome) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    metrics::write_csv(&dir.join("metrics.csv"), &outcome.records, &outcome.goal_names)?;
    let manifest = serde_json::json!({
        "environment": outcome.config.env,
        "config": outcome.config,
        "crate_version": env!("CARGO_PKG_VERSION"),
        "diverged": outcome.diverged,
        "episodes": outcome.episodes,
        "train_task_successes": outcome.train_task_successes,
        "goal_selection_fallbacks": outcome.goal_fallbacks,
        "eval_points": outcome.records.len(),
        "goal_columns": outcome.goal_names,
    });
    metrics::write_manifest(&dir.join("manifest.json"), &manifest)?;
    save_agent_checkpoint(&dir.join("checkpoint.ckpt"), &outcome.agent, &outcome.config, outcome.final_steps())
}

impl RunOutcome {
    pub fn final_steps(&self) -> u64 {
        self.records.last().map_or(0, |r| r.env_steps)
    }

    /// The final record, when the run produced any.
    pub fn last_record(&self) -> Option<&EvalRecord> {
        self.records.last()
    }
}

/// Write the parameter file plus its human-readable key=value manifest
/// (`<stem>.manifest` beside the checkpoint).
pub fn save_agent_checkpoint(
    path: &Path,
    agent: &DqnAgent,
    config: &RunConfig,
    env_steps: u64,
) -> Result<()> {
    mlp::save_checkpoint(
        path,
        agent.arch(),
        agent.input_width(),
        agent.n_actions(),
        &agent.online_params(),
    )?;
    let manifest_path = path.with_extension("manifest");
    let mut lines = String::new();
    for (k, v) in config.to_key_values() {
        lines.push_str(&format!("{k} = {v}\n"));
    }
    lines.push_str(&format!("env_steps = {env_steps}\n"));
    std::fs::write(&manifest_path, lines).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(())
}

/// Rebuild an agent (and its run config) from `<ckpt>` + `<ckpt stem>.manifest`.
pub fn load_agent_checkpoint(path: &Path) -> Result<(DqnAgent, RunConfig, u64)> {
    let ckpt = mlp::load_checkpoint(path)?;
    let manifest_path = path.with_extension("manifest");
    let text = std::fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let pairs = config::parse_key_values(&text)?;
    let mut env_steps = 0;
    let config_pairs: Vec<(String, String)> = pairs
        .into_iter()
        .filter(|(k, v)| {
            if k == "env_steps" {
                env_steps = v.parse().unwrap_or(0);
                false
            } else {
                true
            }
        })
        .collect();
    let config = RunConfig::from_key_values(&config_pairs)?;
    if config.network != ckpt.arch {
        return Err(Error::Format {
            what: "checkpoint",
            detail: format!(
                "manifest network {} does not match checkpoint {}",
                config.network.name(),
                ckpt.arch.name()
            ),
        });
    }
    let probe = make_env(&config.env, config.pmc_tilt)?;
    let enc = probe.space().encoding_width();
    let expected_width = match config.mode {
        Mode::GoalConditioned => 2 * enc,
        Mode::Baseline => enc,
    };
    if ckpt.input_width != expected_width || ckpt.output_width != probe.n_actions() {
        return Err(Error::Format {
            what: "checkpoint",
            detail: format!(
                "checkpoint is {}x{}, expected {}x{} for {} in {} mode",
                ckpt.input_width,
                ckpt.output_width,
                expected_width,
                probe.n_actions(),
                config.env,
                config.mode.name()
            ),
        });
    }
    let mut init = ChaCha8Rng::seed_from_u64(0);
    let mut agent = DqnAgent::new(ckpt.arch, ckpt.input_width, ckpt.output_width, config.agent, &mut init);
    agent.load_params(&ckpt.params);
    Ok((agent, config, env_steps))
}

/// Parse an evaluation goals file: one goal per line, either a state index
/// (discrete spaces) or comma-separated coordinates (box spaces).
pub fn parse_goals_file(path: &Path, space: &SpaceDescriptor, tolerance: f64) -> Result<Vec<GoalSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut goals = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |detail: String| Error::Format {
            what: "goals file",
            detail: format!("line {}: {detail}", lineno + 1),
        };
        let point = match space {
            SpaceDescriptor::Discrete { .. } => Observation::Discrete(
                line.parse::<usize>()
                    .map_err(|e| bad(format!("expected a state index, got '{line}' ({e})")))?,
            ),
            SpaceDescriptor::Box { .. } => {
                let coords: std::result::Result<Vec<f64>, _> =
                    line.split(',').map(|f| f.trim().parse::<f64>()).collect();
                Observation::Continuous(coords.map_err(|e| bad(format!("bad coordinate: {e}")))?)
            }
        };
        if !space.contains(&point) {
            return Err(bad(format!("goal {line} lies outside the observation space")));
        }
        goals.push(GoalSpec::new(point, tolerance));
    }
    if goals.is_empty() {
        return Err(Error::Format {
            what: "goals file",
            detail: "no goals found".into(),
        });
    }
    Ok(goals)
}

/// Expand a glob over run directories or CSV files into metric CSV paths.
pub fn collect_run_csvs(pattern: &str) -> Result<Vec<PathBuf>> {
    let entries = glob::glob(pattern).map_err(|e| Error::Config(format!("bad glob '{pattern}': {e}")))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::Config(format!("glob error: {e}")))?;
        if path.is_dir() {
            let csv = path.join("metrics.csv");
            if csv.is_file() {
                paths.push(csv);
            }
        } else if path.extension().map_or(false, |e| e == "csv") {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Config(format!("no run CSVs matched '{pattern}'")));
    }
    Ok(paths)
}
