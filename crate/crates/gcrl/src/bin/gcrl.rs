//! Thin command-line front end over the library: training runs, checkpoint
//! evaluation, cross-seed aggregation, and smoothed reports.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use gcrl::env::make_env;
use gcrl::harness::{
    self, collect_run_csvs, load_agent_checkpoint, metrics, parse_goals_file, Mode, RunConfig,
};

#[derive(Parser)]
#[command(name = "gcrl", version, about = "Reward-free goal-conditioned RL runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded training run from a config file and emit metrics,
    /// manifest, and checkpoint into the output directory.
    Train {
        /// Config file (`key = value` lines; see the shipped presets/).
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a checkpoint on a set of goals (one per line: a state index,
    /// or comma-separated coordinates for box spaces).
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        goals: PathBuf,
        /// Greedy episodes per goal.
        #[arg(long, default_value_t = 20)]
        episodes: usize,
        /// Seed for evaluation episode streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Align per-seed run CSVs and write mean / one standard deviation per
    /// evaluation point.
    Aggregate {
        /// Glob over run directories or metrics CSV files.
        #[arg(long)]
        runs: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate runs and Gaussian-smooth the mean columns for plotting.
    /// Raw run CSVs are never smoothed.
    Report {
        #[arg(long)]
        runs: String,
        #[arg(long, default_value_t = 2.0)]
        smooth_sigma: f64,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Train { config, seed, out } => train(config, seed, out),
        Command::Eval {
            checkpoint,
            goals,
            episodes,
            seed,
        } => eval(checkpoint, goals, episodes, seed),
        Command::Aggregate { runs, out } => aggregate(&runs, &out),
        Command::Report {
            runs,
            smooth_sigma,
            out,
        } => report(&runs, smooth_sigma, out),
    }
}

fn train(config_path: PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> anyhow::Result<()> {
    let mut config = RunConfig::from_file(&config_path)
        .with_context(|| format!("loading {}", config_path.display()))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(out) = out {
        config.out = Some(out);
    }
    if config.out.is_none() {
        config.out = Some(PathBuf::from(format!(
            "runs/{}-{}-seed{}",
            config.env,
            config.mode.name(),
            config.seed
        )));
    }
    eprintln!(
        "training {} ({}, strategy {}, seed {}) for {} steps -> {}",
        config.env,
        config.mode.name(),
        config.strategy.name(),
        config.seed,
        config.total_steps,
        config.out.as_ref().unwrap().display()
    );
    let outcome = harness::run_and_emit(&config)?;
    for r in &outcome.records {
        let goal_part = r
            .avg_goal_success
            .map(|v| format!("  avg_goal_success={v:.3}"))
            .unwrap_or_default();
        eprintln!(
            "  step {:>9}  ext_reward={:>10.2}  ext_success={:.2}{}",
            r.env_steps, r.ext_reward_mean, r.ext_success, goal_part
        );
    }
    if outcome.diverged {
        bail!("run diverged; partial output written");
    }
    Ok(())
}

fn eval(checkpoint: PathBuf, goals: PathBuf, episodes: usize, seed: u64) -> anyhow::Result<()> {
    let (agent, config, env_steps) = load_agent_checkpoint(&checkpoint)?;
    if config.mode != Mode::GoalConditioned {
        bail!("goal evaluation needs a goal-conditioned checkpoint");
    }
    let space = make_env(&config.env, config.pmc_tilt)?.space().clone();
    let goal_set = parse_goals_file(&goals, &space, config.goal_tolerance)?;
    eprintln!(
        "evaluating {} checkpoint at {} steps on {} goals, {} episodes each",
        config.env,
        env_steps,
        goal_set.len(),
        episodes
    );
    let rates = harness::evaluate_goal_grid(&config, &agent, &goal_set, episodes, seed)?;
    println!("goal,success_rate");
    for (goal, rate) in goal_set.iter().zip(&rates) {
        println!("{},{rate}", metrics::goal_column_name(goal));
    }
    let avg = rates.iter().sum::<f64>() / rates.len() as f64;
    println!("average,{avg}");
    Ok(())
}

fn aggregate(runs: &str, out: &PathBuf) -> anyhow::Result<()> {
    let paths = collect_run_csvs(runs)?;
    eprintln!("aggregating {} runs", paths.len());
    let tables = paths
        .iter()
        .map(|p| metrics::read_csv(p))
        .collect::<gcrl::Result<Vec<_>>>()?;
    let agg = metrics::aggregate_tables(&tables)?;
    metrics::write_table(out, &agg)?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn report(runs: &str, smooth_sigma: f64, out: Option<PathBuf>) -> anyhow::Result<()> {
    let paths = collect_run_csvs(runs)?;
    let tables = paths
        .iter()
        .map(|p| metrics::read_csv(p))
        .collect::<gcrl::Result<Vec<_>>>()?;
    let mut agg = metrics::aggregate_tables(&tables)?;
    // smooth the mean columns only; std columns stay raw
    for c in 0..agg.columns.len() {
        if agg.columns[c].ends_with("_mean") {
            let series: Vec<f64> = agg.rows.iter().map(|r| r[c]).collect();
            let smoothed = metrics::smooth_series(&series, smooth_sigma);
            for (row, v) in agg.rows.iter_mut().zip(smoothed) {
                row[c] = v;
            }
        }
    }
    match out {
        Some(path) => {
            metrics::write_table(&path, &agg)?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            println!("{}", agg.columns.join(","));
            for row in &agg.rows {
                let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                println!("{}", fields.join(","));
            }
        }
    }
    Ok(())
}
