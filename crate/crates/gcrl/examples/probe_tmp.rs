use gcrl::harness::{run_training, RunConfig};
use std::time::Instant;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let preset = args.get(1).map(String::as_str).unwrap_or("cliff-small");
    let steps: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(40_000);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0);
    let gsteps: u32 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(0);
    let tgt: u64 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(0);
    let mode = args.get(6).map(String::as_str).unwrap_or("goal");

    let mut config = RunConfig::preset(preset)?;
    config.total_steps = steps;
    config.eval_interval = steps / 20;
    config.seed = seed;
    if gsteps > 0 {
        config.agent.gradient_steps = gsteps;
    }
    if tgt > 0 {
        config.agent.target_update_interval = tgt;
    }
    if mode == "baseline" {
        config.mode = gcrl::harness::Mode::Baseline;
    }
    eprintln!(
        "preset={preset} steps={steps} seed={seed} G={} tgt={} mode={}",
        config.agent.gradient_steps,
        config.agent.target_update_interval,
        config.mode.name()
    );
    let t0 = Instant::now();
    let out = run_training(&config)?;
    for r in &out.records {
        println!(
            "{:>8} ext_mean={:>9.2} ext_succ={:.2} avg_goal={}",
            r.env_steps,
            r.ext_reward_mean,
            r.ext_success,
            r.avg_goal_success.map(|v| format!("{v:.3}")).unwrap_or_default()
        );
    }
    eprintln!(
        "wall={:.1}s episodes={} task_hits={} fallbacks={} diverged={}",
        t0.elapsed().as_secs_f64(),
        out.episodes,
        out.train_task_successes,
        out.goal_fallbacks,
        out.diverged
    );
    Ok(())
}
