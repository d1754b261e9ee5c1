use gcrl::env::{make_env, Observation};
use gcrl::goal::{GoalSpec, GoalWrapper};
use gcrl::harness::{run_training, RunConfig};

fn main() -> anyhow::Result<()> {
    let mut config = RunConfig::preset("cliff-small")?;
    config.total_steps = 8_000;
    config.eval_interval = 4_000;
    config.agent.gradient_steps = 16;
    let out = run_training(&config)?;
    let agent = out.agent;

    for goal_state in [24usize, 36, 12, 40] {
        let mut w = GoalWrapper::new(make_env("cliff_walking", 0.0)?);
        let obs0 = w.reset(0);
        w.set_goal(GoalSpec::new(Observation::Discrete(goal_state), 0.1))?;
        let mut obs = obs0;
        let mut traj = vec![obs.as_discrete().unwrap()];
        for _ in 0..25 {
            let input = w.augment(&obs);
            let a = agent.greedy(&input);
            let o = w.step(a)?;
            traj.push(o.next_obs.as_discrete().unwrap());
            if o.terminated || o.truncated {
                break;
            }
            obs = o.next_obs;
        }
        println!("goal {goal_state}: traj {traj:?}");
        let q = agent.q_values(&w.augment(&Observation::Discrete(36)));
        println!("  q(start, goal {goal_state}): {q:?}");
    }
    Ok(())
}
