use crate::scalar::Real;

/// Numerically stable softmax (max subtraction).
pub fn softmax<F: Real>(logits: &[F]) -> Vec<F> {
    let max = logits
        .iter()
        .cloned()
        .fold(F::neg_infinity(), |a, b| if b > a { b } else { a });
    let exps: Vec<F> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: F = exps.iter().cloned().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Negative log-likelihood of class `y` under `softmax(logits)`.
pub fn softmax_xent_forward<F: Real>(logits: &[F], y: usize) -> (F, Vec<F>) {
    assert!(logits.len() >= 2, "need at least two classes");
    assert!(y < logits.len(), "label out of range");
    let p = softmax(logits);
    // -log p[y] computed from the shifted logits to stay finite when
    // p[y] underflows.
    let max = logits
        .iter()
        .cloned()
        .fold(F::neg_infinity(), |a, b| if b > a { b } else { a });
    let log_sum: F = logits
        .iter()
        .map(|&z| (z - max).exp())
        .sum::<F>()
        .ln();
    let loss = log_sum - (logits[y] - max);
    (loss, p)
}

/// `dlogits = p - onehot(y)`.
pub fn softmax_xent_backward<F: Real>(p: &[F], y: usize) -> Vec<F> {
    let mut d = p.to_vec();
    d[y] -= F::one();
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_binary_case() {
        let (loss, p) = softmax_xent_forward(&[0.0, 0.0], 0);
        assert_relative_eq!(loss, std::f64::consts::LN_2, max_relative = 1e-12);
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn backward_is_p_minus_onehot() {
        assert_eq!(softmax_xent_backward(&[0.5, 0.5], 0), vec![-0.5, 0.5]);
    }

    #[test]
    fn stable_under_large_logits() {
        let (loss, _) = softmax_xent_forward(&[1000.0f64, 0.0], 0);
        assert!(loss.is_finite());
        assert!(loss < 1e-12);
        let (loss_bad, _) = softmax_xent_forward(&[1000.0f64, 0.0], 1);
        assert!(loss_bad.is_finite());
    }

    #[test]
    fn loss_nonnegative_zero_iff_certain() {
        for logits in [[0.3, -0.4], [5.0, 5.0], [-2.0, 7.0]] {
            for y in 0..2 {
                let (loss, p) = softmax_xent_forward(&logits, y);
                assert!(loss >= 0.0);
                if p[y] == 1.0 {
                    assert_eq!(loss, 0.0);
                } else {
                    assert!(loss > 0.0);
                }
            }
        }
    }
}
