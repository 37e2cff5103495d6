//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, NumAssignOps};

/// Real scalar usable by every layer and optimizer in [`crate::netcore`].
pub trait Real: Float + NumAssignOps + Sum<Self> + Display + Debug + Send + Sync + 'static {
    /// Lossy conversion from `f64`, for constants and hyperparameters.
    fn of(x: f64) -> Self {
        Self::from(x).expect("f64 constant representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
