//! Differentiable layer primitives with explicit forward and backward
//! passes. No autodiff graph: every layer returns a cache sufficient for an
//! exact backward pass, and every backward pass is checked against central
//! finite differences in the test suites.

mod adam;
mod attention;
mod linear;
mod lstm;
mod params;
mod softmax;

pub use adam::{adam_step, AdamState};
pub use attention::{
    self_attention_backward, self_attention_forward, AttentionCache, AttentionParams,
};
pub use linear::{linear_backward, linear_forward, LinearGrads};
pub use lstm::{
    bilstm_backward, bilstm_forward, lstm_cell_backward, lstm_cell_forward, BilstmCache,
    LstmCache, LstmParams,
};
pub use params::{init_uniform, ParamGroup};
pub use softmax::{softmax, softmax_xent_backward, softmax_xent_forward};

use crate::scalar::Real;

/// Backward rule of the gradient-reversal layer: identity on activations in
/// the forward pass, `-lambda * g` on the way back.
pub fn grad_reverse<F: Real>(g: &[F], lambda: F) -> Vec<F> {
    g.iter().map(|&x| -lambda * x).collect()
}
