//! Single-hop structured self-attention over token states:
//! `a = softmax(w2^T tanh(W1 H^T))`, `m = a^T H`.

use crate::error::Result;
use crate::linalg::{dot, Matrix};
use crate::netcore::params::ParamGroup;
use crate::netcore::softmax::softmax;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct AttentionParams<F> {
    /// `d_a x 2u`.
    pub w1: Matrix<F>,
    /// `d_a x 1` context vector.
    pub w2: Matrix<F>,
}

impl<F: Real> AttentionParams<F> {
    pub fn zeros(d_a: usize, state: usize) -> Self {
        AttentionParams {
            w1: Matrix::zeros(d_a, state),
            w2: Matrix::zero_vector(d_a),
        }
    }

    pub fn state_size(&self) -> usize {
        self.w1.cols()
    }
}

impl<F: Real> ParamGroup<F> for AttentionParams<F> {
    fn entries(&self) -> Vec<(&'static str, &Matrix<F>)> {
        vec![("w_s1", &self.w1), ("w_s2", &self.w2)]
    }

    fn entries_mut(&mut self) -> Vec<(&'static str, &mut Matrix<F>)> {
        vec![("w_s1", &mut self.w1), ("w_s2", &mut self.w2)]
    }
}

#[derive(Debug, Clone)]
pub struct AttentionCache<F> {
    tanh_z: Vec<Vec<F>>,
    a: Vec<F>,
}

/// Returns the pooled vector `m`, the attention distribution `a`, and the
/// backward cache. `h` has one row per non-PAD token.
pub fn self_attention_forward<F: Real>(
    p: &AttentionParams<F>,
    h: &Matrix<F>,
) -> Result<(Vec<F>, Vec<F>, AttentionCache<F>)> {
    let n = h.rows();
    assert!(n >= 1, "attention over empty state sequence");
    p.w1.check_shape(p.w1.rows(), h.cols())?;
    let mut scores = Vec::with_capacity(n);
    let mut tanh_z = Vec::with_capacity(n);
    for t in 0..n {
        let z: Vec<F> = p.w1.matvec(h.row(t)).into_iter().map(|v| v.tanh()).collect();
        scores.push(dot(p.w2.as_slice(), &z));
        tanh_z.push(z);
    }
    let a = softmax(&scores);
    let mut m = vec![F::zero(); h.cols()];
    for t in 0..n {
        for (mv, hv) in m.iter_mut().zip(h.row(t)) {
            *mv += a[t] * *hv;
        }
    }
    Ok((m, a.clone(), AttentionCache { tanh_z, a }))
}

/// Backward given `dm = dL/dm`. Returns parameter gradients and `dH`.
pub fn self_attention_backward<F: Real>(
    p: &AttentionParams<F>,
    h: &Matrix<F>,
    cache: &AttentionCache<F>,
    dm: &[F],
) -> (AttentionParams<F>, Matrix<F>) {
    let n = h.rows();
    let a = &cache.a;
    let mut grads = p.zeros_like();
    let mut dh = h.zeros_like();

    // m = sum_t a_t h_t
    let mut da = vec![F::zero(); n];
    for t in 0..n {
        da[t] = dot(dm, h.row(t));
        for (dhv, dmv) in dh.row_mut(t).iter_mut().zip(dm) {
            *dhv += a[t] * *dmv;
        }
    }
    // softmax backward: ds_t = a_t (da_t - sum_k a_k da_k)
    let mut mean = F::zero();
    for t in 0..n {
        mean += a[t] * da[t];
    }
    for t in 0..n {
        let ds = a[t] * (da[t] - mean);
        // s_t = w2 . tanh(z_t)
        for (g, tz) in grads.w2.as_mut_slice().iter_mut().zip(&cache.tanh_z[t]) {
            *g += ds * *tz;
        }
        // dz_t = ds * w2 (.) (1 - tanh^2 z_t)
        let dz: Vec<F> = p
            .w2
            .as_slice()
            .iter()
            .zip(&cache.tanh_z[t])
            .map(|(&w, &tz)| ds * w * (F::one() - tz * tz))
            .collect();
        grads.w1.add_outer(&dz, h.row(t));
        let dh_t = p.w1.matvec_t(&dz);
        for (dhv, v) in dh.row_mut(t).iter_mut().zip(&dh_t) {
            *dhv += *v;
        }
    }
    (grads, dh)
}
