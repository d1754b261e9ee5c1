//! Huber loss (delta = 1), mean-reduced.

use super::Scalar;

/// Returns `(loss, dLoss/dPred)`. Loss is accumulated in f64 regardless of
/// the parameter scalar type. Panics on length mismatch.
pub fn huber_loss<F: Scalar>(pred: &[F], target: &[F]) -> (f64, Vec<F>) {
    assert_eq!(pred.len(), target.len(), "huber: length mismatch");
    assert!(!pred.is_empty(), "huber: empty input");
    let n = pred.len() as f64;
    let inv_n = F::from_f64(1.0 / n).unwrap();
    let one = F::one();
    let half = F::from_f64(0.5).unwrap();

    let mut loss = 0.0_f64;
    let mut grad = Vec::with_capacity(pred.len());
    for (&p, &t) in pred.iter().zip(target.iter()) {
        let e = p - t;
        if e.abs() <= one {
            loss += 0.5 * (e * e).to_f64().unwrap();
            grad.push(e * inv_n);
        } else {
            loss += (e.abs() - half).to_f64().unwrap();
            grad.push(e.signum() * inv_n);
        }
    }
    (loss / n, grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_prediction_is_zero_loss_zero_grad() {
        let (loss, grad) = huber_loss(&[1.0_f32, -2.0, 0.5], &[1.0, -2.0, 0.5]);
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn quadratic_branch_hand_value() {
        let (loss, grad) = huber_loss(&[0.5_f64], &[0.0]);
        assert_relative_eq!(loss, 0.125);
        assert_relative_eq!(grad[0], 0.5);
    }

    #[test]
    fn linear_branch_hand_value() {
        let (loss, grad) = huber_loss(&[3.0_f64], &[0.0]);
        assert_relative_eq!(loss, 2.5);
        assert_relative_eq!(grad[0], 1.0);
    }

    #[test]
    fn mean_reduction_scales_gradient() {
        let (loss, grad) = huber_loss(&[0.5_f64, 0.5], &[0.0, 0.0]);
        assert_relative_eq!(loss, 0.125);
        assert_relative_eq!(grad[0], 0.25);
        assert_relative_eq!(grad[1], 0.25);
    }

    #[test]
    #[should_panic(expected = "length mismatch")]
    fn length_mismatch_panics() {
        huber_loss(&[1.0_f32], &[1.0, 2.0]);
    }
}
