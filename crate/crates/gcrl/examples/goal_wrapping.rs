//! Goal-conditioning a plain environment: the wrapper augments observations
//! with an encoded goal, pays an internal 0/1 reward, terminates on goal
//! success, and keeps the environment's own reward on a hidden channel.

use gcrl::env::{make_env, Observation};
use gcrl::goal::{GoalSpec, GoalWrapper, DEFAULT_TOLERANCE};

fn main() -> anyhow::Result<()> {
    let mut wrapper = GoalWrapper::new(make_env("cliff_walking", 0.0)?);
    let start = wrapper.reset(0);
    println!("observation space encodes to {} values", wrapper.space().encoding_width());
    println!("augmented learner input is {} wide (observation + goal)", wrapper.augmented_width());

    // aim two cells above the start
    let goal = GoalSpec::new(Observation::Discrete(12), DEFAULT_TOLERANCE);
    wrapper.set_goal(goal)?;
    println!("start {start:?}, goal 12; walking up:");

    let mut obs = start;
    loop {
        let out = wrapper.step(0)?; // up
        println!(
            "  -> {:?}  internal_reward {}  goal_success {}  terminated {}  (hidden external reward {})",
            out.next_obs, out.internal_reward, out.goal_success, out.terminated, out.hidden_external_reward
        );
        if out.terminated || out.truncated {
            break;
        }
        obs = out.next_obs;
    }
    let _ = obs;

    // goals are fixed per episode: re-selecting mid-episode is refused
    let mut wrapper = GoalWrapper::new(make_env("cliff_walking", 0.0)?);
    wrapper.reset(0);
    wrapper.set_goal(GoalSpec::new(Observation::Discrete(30), DEFAULT_TOLERANCE))?;
    wrapper.step(0)?;
    let err = wrapper
        .set_goal(GoalSpec::new(Observation::Discrete(31), DEFAULT_TOLERANCE))
        .unwrap_err();
    println!("mid-episode goal change is rejected: {err}");

    // box-space goals succeed within a normalized distance
    let mut wrapper = GoalWrapper::new(make_env("pathological_mountain_car", 0.0005)?);
    wrapper.reset(3);
    wrapper.set_goal(GoalSpec::new(
        Observation::Continuous(vec![-0.52, 0.0]),
        DEFAULT_TOLERANCE,
    ))?;
    let out = wrapper.step(1)?; // coast: the start position is near the goal
    println!(
        "mountain car near-goal step: obs {:?}, goal_success {}",
        out.next_obs, out.goal_success
    );
    Ok(())
}
