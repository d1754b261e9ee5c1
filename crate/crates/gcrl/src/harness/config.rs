//! Run configuration: presets, the flat key=value config format, and the
//! documented defaults.
//!
//! A config file is plain `key = value` lines (`#` starts a comment). It must
//! name a basis first — either `preset = <name>` or `env = <name>` (which
//! selects the environment's paper-scale preset) — and may override any other
//! key after that. Presets:
//!
//! | preset         | steps      | network         | notes                       |
//! |----------------|------------|-----------------|-----------------------------|
//! | `cliff-paper`  | 2,000,000  | residual4blocks | published training budget   |
//! | `cliff-small`  | 200,000    | residual4blocks | desk-scale, minutes per seed|
//! | `frozen-paper` | 1,000,000  | simple3x256     | published training budget   |
//! | `frozen-small` | 200,000    | simple3x256     | desk-scale                  |
//! | `pmc-paper`    | 10,000,000 | residual4blocks | published training budget   |
//! | `pmc-small`    | 1,000,000  | residual4blocks | desk-scale                  |
//!
//! Desk presets only shrink the step budget and the per-event gradient work;
//! every physical constant and learner hyperparameter keeps its documented
//! default.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dqn::AgentHyperparams;
use crate::error::{Error, Result};
use crate::mlp::Arch;
use crate::select::{SelectionParams, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Baseline,
    GoalConditioned,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::GoalConditioned => "goal_conditioned",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "baseline" => Ok(Mode::Baseline),
            "goal_conditioned" => Ok(Mode::GoalConditioned),
            other => Err(Error::Config(format!(
                "unknown mode '{other}' (expected baseline | goal_conditioned)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub env: String,
    pub mode: Mode,
    pub strategy: Strategy,
    pub network: Arch,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub total_steps: u64,
    /// Evaluate every this many environment steps.
    pub eval_interval: u64,
    /// Greedy episodes per evaluation unit (external task, and per goal in
    /// the goal grid).
    pub eval_episodes: usize,
    pub goal_tolerance: f64,
    pub pmc_tilt: f64,
    /// Statistics-grid bins per dimension for box spaces (discrete spaces
    /// always get one cell per state).
    pub grid_bins: usize,
    pub selection: SelectionParams,
    pub agent: AgentHyperparams,
    pub buffer_capacity: usize,
}

impl RunConfig {
    /// Paper-scale defaults for an environment.
    pub fn paper(env: &str) -> Result<RunConfig> {
        let (total_steps, network, target_success, eval_episodes) = match env {
            "cliff_walking" => (2_000_000, Arch::Residual4Blocks, 0.9, 20),
            "frozen_lake" => (1_000_000, Arch::Simple3x256, 0.75, 20),
            "pathological_mountain_car" => (10_000_000, Arch::Residual4Blocks, 0.75, 10),
            other => {
                return Err(Error::Config(format!("unknown environment '{other}'")));
            }
        };
        Ok(RunConfig {
            env: env.to_string(),
            mode: Mode::GoalConditioned,
            strategy: Strategy::Novelty,
            network,
            seed: 0,
            out: None,
            total_steps,
            eval_interval: total_steps / 100,
            eval_episodes,
            goal_tolerance: crate::goal::DEFAULT_TOLERANCE,
            pmc_tilt: crate::env::pmc::DEFAULT_TILT,
            grid_bins: 100,
            selection: SelectionParams {
                target_success,
                ..SelectionParams::default()
            },
            agent: AgentHyperparams::default(),
            buffer_capacity: 1_000_000,
        })
    }

    /// Named preset (see module docs).
    pub fn preset(name: &str) -> Result<RunConfig> {
        match name {
            "cliff-paper" => Self::paper("cliff_walking"),
            "frozen-paper" => Self::paper("frozen_lake"),
            "pmc-paper" => Self::paper("pathological_mountain_car"),
            "cliff-small" => {
                let mut c = Self::paper("cliff_walking")?;
                c.total_steps = 200_000;
                c.eval_interval = 2_000;
                c.eval_episodes = 4; // deterministic env: repeats add nothing
                c.agent.gradient_steps = 16;
                // value information crosses one TD step per hard sync; a short
                // run needs proportionally more syncs than the paper budget
                c.agent.target_update_interval = 2_000;
                Ok(c)
            }
            "frozen-small" => {
                let mut c = Self::paper("frozen_lake")?;
                c.total_steps = 200_000;
                c.eval_interval = 2_000;
                c.agent.gradient_steps = 16;
                c.agent.target_update_interval = 2_000;
                Ok(c)
            }
            "pmc-small" => {
                let mut c = Self::paper("pathological_mountain_car")?;
                c.total_steps = 1_000_000;
                c.eval_interval = 10_000;
                c.agent.gradient_steps = 8;
                c.agent.target_update_interval = 2_500;
                Ok(c)
            }
            other => Err(Error::Config(format!("unknown preset '{other}'"))),
        }
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<RunConfig> {
        let pairs = parse_key_values(text)?;
        Self::from_key_values(&pairs)
    }

    pub fn from_key_values(pairs: &[(String, String)]) -> Result<RunConfig> {
        let basis = pairs
            .iter()
            .find(|(k, _)| k == "preset" || k == "env")
            .ok_or_else(|| Error::Config("config needs a 'preset' or 'env' key".into()))?;
        let mut config = if basis.0 == "preset" {
            RunConfig::preset(&basis.1)?
        } else {
            RunConfig::paper(&basis.1)?
        };
        for (key, value) in pairs {
            config.apply(key, value)?;
        }
        Ok(config)
    }

    /// Apply one `key = value` override.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value
                .parse()
                .map_err(|e| Error::Config(format!("bad value '{value}' for {key}: {e}")))
        }
        match key {
            "preset" => {} // basis, handled by from_key_values
            "env" => {
                // allow switching env only via a fresh basis
                if value != self.env {
                    *self = RunConfig::paper(value)?;
                }
            }
            "mode" => self.mode = Mode::from_name(value)?,
            "strategy" => self.strategy = Strategy::from_name(value)?,
            "network" => self.network = Arch::from_name(value)?,
            "seed" => self.seed = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "total_steps" => self.total_steps = num(key, value)?,
            "eval_interval" => self.eval_interval = num(key, value)?,
            "eval_episodes" => self.eval_episodes = num(key, value)?,
            "goal_tolerance" => self.goal_tolerance = num(key, value)?,
            "pmc_tilt" => self.pmc_tilt = num(key, value)?,
            "grid_bins" => self.grid_bins = num(key, value)?,
            "sel_epsilon" => self.selection.epsilon = num(key, value)?,
            "sel_exponent" => self.selection.exponent = num(key, value)?,
            "target_success" => self.selection.target_success = num(key, value)?,
            "uniform_mix" => self.selection.uniform_mix = num(key, value)?,
            "gamma" => self.agent.gamma = num(key, value)?,
            "lr" => self.agent.lr = num(key, value)?,
            "batch_size" => self.agent.batch_size = num(key, value)?,
            "train_freq" => self.agent.train_freq = num(key, value)?,
            "gradient_steps" => self.agent.gradient_steps = num(key, value)?,
            "target_update_interval" => self.agent.target_update_interval = num(key, value)?,
            "epsilon_start" => self.agent.epsilon_start = num(key, value)?,
            "epsilon_final" => self.agent.epsilon_final = num(key, value)?,
            "epsilon_fraction" => self.agent.epsilon_fraction = num(key, value)?,
            "buffer_capacity" => self.buffer_capacity = num(key, value)?,
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        self.validate()
    }

    fn validate(&self) -> Result<()> {
        if self.total_steps == 0 || self.eval_interval == 0 {
            return Err(Error::Config("step counts must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.agent.gamma) {
            return Err(Error::Config("gamma must be in (0, 1)".into()));
        }
        if self.agent.batch_size > self.buffer_capacity {
            return Err(Error::Config("batch_size exceeds buffer capacity".into()));
        }
        if self.goal_tolerance <= 0.0 {
            return Err(Error::Config("goal_tolerance must be positive".into()));
        }
        let s = &self.selection;
        if s.epsilon <= 0.0 || !(0.0..=1.0).contains(&s.target_success) || !(0.0..=1.0).contains(&s.uniform_mix) {
            return Err(Error::Config("selection params out of range".into()));
        }
        Ok(())
    }

    /// The flat key=value form (checkpoint manifests, documentation).
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv: Vec<(String, String)> = vec![
            ("env".into(), self.env.clone()),
            ("mode".into(), self.mode.name().into()),
            ("strategy".into(), self.strategy.name().into()),
            ("network".into(), self.network.name().into()),
            ("seed".into(), self.seed.to_string()),
            ("total_steps".into(), self.total_steps.to_string()),
            ("eval_interval".into(), self.eval_interval.to_string()),
            ("eval_episodes".into(), self.eval_episodes.to_string()),
            ("goal_tolerance".into(), self.goal_tolerance.to_string()),
            ("pmc_tilt".into(), self.pmc_tilt.to_string()),
            ("grid_bins".into(), self.grid_bins.to_string()),
            ("sel_epsilon".into(), self.selection.epsilon.to_string()),
            ("sel_exponent".into(), self.selection.exponent.to_string()),
            ("target_success".into(), self.selection.target_success.to_string()),
            ("uniform_mix".into(), self.selection.uniform_mix.to_string()),
            ("gamma".into(), self.agent.gamma.to_string()),
            ("lr".into(), self.agent.lr.to_string()),
            ("batch_size".into(), self.agent.batch_size.to_string()),
            ("train_freq".into(), self.agent.train_freq.to_string()),
            ("gradient_steps".into(), self.agent.gradient_steps.to_string()),
            ("target_update_interval".into(), self.agent.target_update_interval.to_string()),
            ("epsilon_start".into(), self.agent.epsilon_start.to_string()),
            ("epsilon_final".into(), self.agent.epsilon_final.to_string()),
            ("epsilon_fraction".into(), self.agent.epsilon_fraction.to_string()),
            ("buffer_capacity".into(), self.buffer_capacity.to_string()),
        ];
        if let Some(out) = &self.out {
            kv.push(("out".into(), out.display().to_string()));
        }
        kv
    }
}

/// Parse `key = value` lines; `#` comments and blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
            what: "config",
            detail: format!("line {}: expected 'key = value', got '{raw}'", lineno + 1),
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_carry_the_documented_defaults() {
        let c = RunConfig::preset("cliff-paper").unwrap();
        assert_eq!(c.total_steps, 2_000_000);
        assert_eq!(c.network, Arch::Residual4Blocks);
        assert_eq!(c.selection.target_success, 0.9);
        assert_eq!(c.agent.batch_size, 512);
        assert_eq!(c.agent.train_freq, 512);
        assert_eq!(c.agent.gamma, 0.95);
        assert_eq!(c.agent.lr, 0.001);
        assert_eq!(c.buffer_capacity, 1_000_000);

        let c = RunConfig::preset("frozen-paper").unwrap();
        assert_eq!(c.total_steps, 1_000_000);
        assert_eq!(c.network, Arch::Simple3x256);
        assert_eq!(c.selection.target_success, 0.75);

        let c = RunConfig::preset("pmc-paper").unwrap();
        assert_eq!(c.total_steps, 10_000_000);
        assert_eq!(c.network, Arch::Residual4Blocks);
        assert_eq!(c.selection.target_success, 0.75);
        assert_eq!(c.grid_bins, 100);
    }

    #[test]
    fn config_file_overrides_preset() {
        let text = "\n# comment\npreset = cliff-small\nseed = 7\nstrategy = intermediate\nuniform_mix = 0.2\n";
        let c = RunConfig::from_str(text).unwrap();
        assert_eq!(c.total_steps, 200_000);
        assert_eq!(c.seed, 7);
        assert_eq!(c.strategy, Strategy::Intermediate);
        assert_eq!(c.selection.uniform_mix, 0.2);
    }

    #[test]
    fn env_key_selects_paper_defaults() {
        let c = RunConfig::from_str("env = frozen_lake\nmode = baseline\n").unwrap();
        assert_eq!(c.total_steps, 1_000_000);
        assert_eq!(c.mode, Mode::Baseline);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_str("preset = cliff-small\nlearning_rate = 0.1\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn missing_basis_is_rejected() {
        assert!(RunConfig::from_str("seed = 3\n").is_err());
    }

    #[test]
    fn key_values_round_trip() {
        let mut c = RunConfig::preset("pmc-small").unwrap();
        c.seed = 11;
        c.agent.gradient_steps = 4;
        let kv = c.to_key_values();
        let back = RunConfig::from_key_values(&kv).unwrap();
        assert_eq!(back.seed, 11);
        assert_eq!(back.agent.gradient_steps, 4);
        assert_eq!(back.total_steps, c.total_steps);
        assert_eq!(back.network, c.network);
    }

    #[test]
    fn invalid_values_are_rejected() {
        let mut c = RunConfig::preset("cliff-small").unwrap();
        assert!(c.apply("gamma", "1.5").is_err());
        assert!(c.apply("goal_tolerance", "-1").is_err());
        assert!(c.apply("batch_size", "2000000000").is_err());
    }
}
