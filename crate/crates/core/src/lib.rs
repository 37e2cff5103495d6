//! Adversarially debiased satire classification.
//!
//! A shared feature extractor (word embeddings -> bidirectional LSTM ->
//! single-hop self-attention) feeds two softmax heads: a binary satire
//! detector and a multi-class publication identifier. The publication head
//! is trained as an adversary via gradient reversal so the shared features
//! stop carrying publication-source signal while keeping satire signal.
//!
//! The numeric core is generic over the scalar type (`f32`/`f64` through
//! [`scalar::Real`]); the pipeline itself runs in `f64`, see [`Scalar`].

pub mod attnreport;
pub mod checkpoint;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod linalg;
pub mod manifest;
pub mod metrics;
pub mod model;
pub mod netcore;
pub mod rng;
pub mod scalar;
pub mod synthgen;
pub mod trainer;

/// Scalar type used by the end-to-end pipeline.
pub type Scalar = f64;
/// Matrix of pipeline scalars.
pub type Mat = linalg::Matrix<Scalar>;

pub use error::Error;
