//! Bias-corrected Adam over a flat parameter vector.

use super::{c, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct AdamState<F: Scalar> {
    pub lr: F,
    pub beta1: F,
    pub beta2: F,
    pub eps: F,
    pub t: u64,
    m: Vec<F>,
    v: Vec<F>,
}

impl<F: Scalar> AdamState<F> {
    /// beta1=0.9, beta2=0.999, eps=1e-8.
    pub fn new(param_count: usize, lr: F) -> Self {
        assert!(lr > F::zero(), "learning rate must be positive");
        AdamState {
            lr,
            beta1: c(0.9),
            beta2: c(0.999),
            eps: c(1e-8),
            t: 0,
            m: vec![F::zero(); param_count],
            v: vec![F::zero(); param_count],
        }
    }

    /// One update in place. Non-finite gradient entries abort with
    /// [`Error::Diverged`] before touching any state.
    pub fn step(&mut self, params: &mut [F], grad: &[F]) -> Result<()> {
        assert_eq!(params.len(), self.m.len(), "parameter length mismatch");
        assert_eq!(grad.len(), self.m.len(), "gradient length mismatch");
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::Diverged(format!(
                "non-finite gradient entry at index {i}"
            )));
        }

        self.t += 1;
        let one = F::one();
        let bc1 = one - self.beta1.powi(self.t as i32);
        let bc2 = one - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = self.beta1 * self.m[i] + (one - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (one - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] = params[i] - self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut adam: AdamState<f32> = AdamState::new(3, 0.001);
        let mut params = vec![0.5, -0.25, 1.0];
        adam.step(&mut params, &[0.0; 3]).unwrap();
        assert_eq!(params, vec![0.5, -0.25, 1.0]);
        assert_eq!(adam.t, 1);
    }

    #[test]
    fn single_step_matches_hand_value() {
        // w=0, g=1, lr=0.001, defaults: bias correction makes the first step
        // exactly -lr (up to eps).
        let mut adam: AdamState<f64> = AdamState::new(1, 0.001);
        let mut params = vec![0.0];
        adam.step(&mut params, &[1.0]).unwrap();
        assert_relative_eq!(params[0], -0.001, max_relative = 1e-6);
    }

    #[test]
    fn identical_parameters_get_identical_updates() {
        let mut adam: AdamState<f32> = AdamState::new(2, 0.01);
        let mut params = vec![0.3, 0.3];
        for _ in 0..7 {
            adam.step(&mut params, &[0.2, 0.2]).unwrap();
            assert_eq!(params[0], params[1]);
        }
    }

    #[test]
    fn non_finite_gradient_is_a_divergence_error() {
        let mut adam: AdamState<f32> = AdamState::new(2, 0.001);
        let mut params = vec![0.0, 0.0];
        let err = adam.step(&mut params, &[0.1, f32::NAN]).unwrap_err();
        assert!(matches!(err, Error::Diverged(_)));
        // state untouched
        assert_eq!(adam.t, 0);
        assert_eq!(params, vec![0.0, 0.0]);
    }
}
