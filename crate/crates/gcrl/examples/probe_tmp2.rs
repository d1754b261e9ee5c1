use gcrl::dqn::DqnAgent;
use gcrl::env::Observation;
use gcrl::goal::GoalSpec;
use gcrl::harness::{evaluate_goal_grid, RunConfig};
use rand::SeedableRng;

fn main() -> anyhow::Result<()> {
    let config = RunConfig::preset("cliff-small")?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut agent = DqnAgent::new(config.network, 96, 4, config.agent, &mut rng);
    // zero the parameters: greedy action is always 0 (up)
    agent.load_params(&vec![0.0; agent.online_params().len()]);

    // with "always up" from start 36: visits 24, 12, 0 -> those goals succeed
    let goals: Vec<GoalSpec> = [24usize, 12, 0, 36, 47]
        .iter()
        .map(|&s| GoalSpec::new(Observation::Discrete(s), 0.1))
        .collect();
    let rates = evaluate_goal_grid(&config, &agent, &goals, 2, 123)?;
    for (g, r) in goals.iter().zip(&rates) {
        println!("goal {:?} -> {r}", g.point);
    }
    Ok(())
}
