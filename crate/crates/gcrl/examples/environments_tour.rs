//! A quick pass over the three environments: layouts, rewards, termination,
//! and the Pathological Mountain Car asymmetry between its two summits.

use gcrl::env::{cliff, frozen, make_env, pmc, Environment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    println!("== cliff walking (4x12, start {}, goal {}) ==", cliff::START, cliff::GOAL);
    let mut env = make_env("cliff_walking", 0.0)?;
    env.reset(0);
    for action in [0, 1, 1, 2] {
        let out = env.step(action)?;
        println!(
            "  action {action}: obs {:?}, reward {}, terminated {}",
            out.next_obs, out.external_reward, out.terminated
        );
    }

    println!("== frozen lake (slippery 4x4, holes {:?}) ==", frozen::HOLES);
    let mut env = make_env("frozen_lake", 0.0)?;
    env.reset(42);
    let mut steps = 0;
    loop {
        let out = env.step(rng.gen_range(0..4))?;
        steps += 1;
        if out.terminated || out.truncated {
            println!(
                "  random walk ended after {steps} steps at {:?} (reward {})",
                out.next_obs, out.external_reward
            );
            break;
        }
    }

    println!("== pathological mountain car ==");
    println!(
        "  summits: hard x <= {} pays {}, easy x >= {} pays {}",
        pmc::HARD_GOAL_X,
        pmc::HARD_REWARD,
        pmc::EASY_GOAL_X,
        pmc::EASY_REWARD
    );
    // pushing with the velocity reaches the easy summit quickly
    let (mut x, mut v) = (-0.5, 0.0);
    let mut t_easy = 0;
    for t in 1..=1000 {
        let a = if v >= 0.0 { 2 } else { 0 };
        let (x2, v2) = pmc::update(x, v, a, pmc::DEFAULT_TILT);
        x = x2;
        v = v2;
        if x >= pmc::EASY_GOAL_X {
            t_easy = t;
            break;
        }
    }
    println!("  push-with-velocity reaches the easy summit in {t_easy} steps");

    // the hard summit needs regulated pumping: turn around short of the easy
    // terminal, then commit left
    let potential = |x: f64| pmc::GRAVITY * (3.0 * x).sin() / 3.0 - pmc::DEFAULT_TILT * x;
    let e_star = potential(0.3);
    let (mut x, mut v) = (-0.5, 0.0);
    let mut t_hard = 0;
    for t in 1..=1000 {
        let energy = potential(x) + 0.5 * v * v;
        let a = if v < 0.0 || energy > e_star { 0 } else { 2 };
        let (x2, v2) = pmc::update(x, v, a, pmc::DEFAULT_TILT);
        x = x2;
        v = v2;
        if x <= pmc::HARD_GOAL_X {
            t_hard = t;
            break;
        }
    }
    println!("  energy-regulated pumping reaches the hard summit in {t_hard} steps");
    Ok(())
}
