//! Adam with bias correction and inverse-time learning-rate decay,
//! `eta_t = eta / (1 + d * t)`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::netcore::params::ParamGroup;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct AdamState<F> {
    pub lr: F,
    pub decay: F,
    pub beta1: F,
    pub beta2: F,
    pub eps: F,
    t: u64,
    m: Vec<Matrix<F>>,
    v: Vec<Matrix<F>>,
}

impl<F: Real> AdamState<F> {
    pub fn new<P: ParamGroup<F>>(params: &P, lr: F, decay: F) -> Self {
        let m: Vec<Matrix<F>> = params.entries().iter().map(|(_, p)| p.zeros_like()).collect();
        let v = m.clone();
        AdamState {
            lr,
            decay,
            beta1: F::of(0.9),
            beta2: F::of(0.999),
            eps: F::of(1e-8),
            t: 0,
            m,
            v,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One Adam update. A non-finite gradient aborts before touching anything;
/// an all-zero gradient is the identity (state included), which keeps a
/// lambda=0 adversary step from perturbing the shared parameters.
pub fn adam_step<F: Real, P: ParamGroup<F>>(
    params: &mut P,
    grads: &P,
    state: &mut AdamState<F>,
) -> Result<()> {
    if !grads.all_finite() {
        return Err(Error::NonFiniteGradient);
    }
    if grads.all_zero() {
        return Ok(());
    }
    state.t += 1;
    let t = F::of(state.t as f64);
    let lr_t = state.lr / (F::one() + state.decay * t);
    let bc1 = F::one() - state.beta1.powi(state.t as i32);
    let bc2 = F::one() - state.beta2.powi(state.t as i32);
    let one = F::one();
    for (idx, ((_, p), (_, g))) in params
        .entries_mut()
        .into_iter()
        .zip(grads.entries())
        .enumerate()
    {
        let m = &mut state.m[idx];
        let v = &mut state.v[idx];
        for ((pv, gv), (mv, vv)) in p
            .as_mut_slice()
            .iter_mut()
            .zip(g.as_slice())
            .zip(m.as_mut_slice().iter_mut().zip(v.as_mut_slice()))
        {
            *mv = state.beta1 * *mv + (one - state.beta1) * *gv;
            *vv = state.beta2 * *vv + (one - state.beta2) * *gv * *gv;
            let m_hat = *mv / bc1;
            let v_hat = *vv / bc2;
            *pv -= lr_t * m_hat / (v_hat.sqrt() + state.eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[derive(Clone)]
    struct One(Matrix<f64>);

    impl ParamGroup<f64> for One {
        fn entries(&self) -> Vec<(&'static str, &Matrix<f64>)> {
            vec![("w", &self.0)]
        }
        fn entries_mut(&mut self) -> Vec<(&'static str, &mut Matrix<f64>)> {
            vec![("w", &mut self.0)]
        }
    }

    #[test]
    fn first_step_magnitude_is_learning_rate() {
        let mut p = One(Matrix::zeros(1, 1));
        let g = One(Matrix::from_vec(1, 1, vec![1.0]));
        let mut state = AdamState::new(&p, 0.001, 0.0);
        adam_step(&mut p, &g, &mut state).unwrap();
        // Bias correction gives m_hat = v_hat = 1 at t=1.
        assert_relative_eq!(p.0.get(0, 0), -0.001, max_relative = 1e-7);
    }

    #[test]
    fn zero_gradient_is_identity() {
        let mut p = One(Matrix::from_vec(1, 2, vec![0.4, -0.2]));
        let g = One(Matrix::zeros(1, 2));
        let mut state = AdamState::new(&p, 0.01, 1e-6);
        // Warm the state so m and v are nonzero.
        let g1 = One(Matrix::from_vec(1, 2, vec![1.0, -1.0]));
        adam_step(&mut p, &g1, &mut state).unwrap();
        let snapshot = p.0.clone();
        let t = state.step_count();
        adam_step(&mut p, &g, &mut state).unwrap();
        assert_eq!(p.0, snapshot);
        assert_eq!(state.step_count(), t);
    }

    #[test]
    fn non_finite_gradient_rejected_without_partial_update() {
        let mut p = One(Matrix::from_vec(1, 2, vec![0.4, -0.2]));
        let snapshot = p.0.clone();
        let g = One(Matrix::from_vec(1, 2, vec![1.0, f64::NAN]));
        let mut state = AdamState::new(&p, 0.01, 0.0);
        assert!(adam_step(&mut p, &g, &mut state).is_err());
        assert_eq!(p.0, snapshot);
        assert_eq!(state.step_count(), 0);
    }

    #[test]
    fn two_steps_match_hand_rolled_recurrences() {
        let (lr, d, b1, b2, eps) = (0.001f64, 1e-6, 0.9, 0.999, 1e-8);
        let g = 0.5f64;
        // Scalar reference evaluation of the update recurrences.
        let mut theta = 1.0f64;
        let (mut m, mut v) = (0.0f64, 0.0f64);
        for t in 1..=2u32 {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let m_hat = m / (1.0 - b1.powi(t as i32));
            let v_hat = v / (1.0 - b2.powi(t as i32));
            theta -= lr / (1.0 + d * t as f64) * m_hat / (v_hat.sqrt() + eps);
        }

        let mut p = One(Matrix::from_vec(1, 1, vec![1.0]));
        let grads = One(Matrix::from_vec(1, 1, vec![g]));
        let mut state = AdamState::new(&p, lr, d);
        adam_step(&mut p, &grads, &mut state).unwrap();
        adam_step(&mut p, &grads, &mut state).unwrap();
        assert_relative_eq!(p.0.get(0, 0), theta, max_relative = 1e-14);
    }
}
