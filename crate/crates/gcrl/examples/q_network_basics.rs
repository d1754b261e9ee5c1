//! The dense-network core on its own: the two Q-network architectures,
//! a finite-difference check of backprop, and a few Adam steps on a toy
//! regression target.

use gcrl::mlp::{huber_loss, AdamState, Arch, Network, QNetwork};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    for arch in [Arch::Simple3x256, Arch::Residual4Blocks] {
        let q: QNetwork<f32> = QNetwork::new(arch, 8, 3, &mut rng);
        println!("{}: {} parameters", arch.name(), q.param_count());
    }

    // gradient check at f64: analytic backprop vs central differences
    let mut net: Network<f64> = Network::new(4);
    net.push_residual(&mut rng);
    let params: Vec<f64> = (0..net.param_count()).map(|_| rng.gen_range(-0.3..0.3)).collect();
    net.set_params_flat(&params);

    let x = Array2::from_shape_fn((2, 4), |(i, j)| 0.2 * (i as f64 + 1.0) * (j as f64 - 1.5));
    let loss_grad = Array2::from_elem((2, 4), 0.5);
    let (_, cache) = net.forward_cached(&x);
    let analytic = net.backward(&cache, &loss_grad);

    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for idx in (0..net.param_count()).step_by(net.param_count() / 7) {
        let mut p = params.clone();
        p[idx] += h;
        net.set_params_flat(&p);
        let up = (net.forward(&x) * &loss_grad).sum();
        p[idx] -= 2.0 * h;
        net.set_params_flat(&p);
        let down = (net.forward(&x) * &loss_grad).sum();
        let numeric = (up - down) / (2.0 * h);
        let rel = (analytic[idx] - numeric).abs() / analytic[idx].abs().max(numeric.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    net.set_params_flat(&params);
    println!("gradient check, worst relative error over probes: {worst:.2e}");

    // fit Q(x) toward a fixed target vector with Huber + Adam
    let mut q: QNetwork<f32> = QNetwork::new(Arch::Simple3x256, 4, 2, &mut rng);
    let mut adam = AdamState::new(q.param_count(), 0.001);
    let x = Array2::from_shape_fn((16, 4), |(i, j)| ((i * 4 + j) as f32 * 0.13).sin());
    let target: Vec<f32> = (0..32).map(|i| if i % 2 == 0 { 0.8 } else { -0.3 }).collect();
    for step in 0..400 {
        let (out, cache) = q.forward_cached(&x);
        let preds: Vec<f32> = out.iter().copied().collect();
        let (loss, dpred) = huber_loss(&preds, &target);
        let loss_grad = Array2::from_shape_vec((16, 2), dpred).unwrap();
        let grad = q.backward(&cache, &loss_grad);
        let mut p = q.params_flat();
        adam.step(&mut p, &grad).unwrap();
        q.set_params_flat(&p);
        if step % 100 == 0 {
            println!("adam step {step:>3}: huber loss {loss:.6}");
        }
    }
}
