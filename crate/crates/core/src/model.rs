//! Full model: shared feature extractor (embedding lookup -> biLSTM ->
//! self-attention) feeding a binary satire head and a K-way publication
//! head, with exact gradients for both losses and the algebraic form of the
//! gradient-reversal update.

use rand::Rng;

use crate::corpus::{EncodedDocument, PAD_INDEX};
use crate::embeddings::EmbeddingMatrix;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::netcore::{
    self_attention_backward, self_attention_forward, bilstm_backward, bilstm_forward,
    init_uniform, linear_backward, linear_forward, softmax_xent_backward, softmax_xent_forward,
    AttentionCache, AttentionParams, BilstmCache, LstmParams, ParamGroup,
};
use crate::Scalar;

/// Layer sizes. Defaults: 300-dim embeddings, 300 hidden units per
/// direction, attention hidden size 600.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ModelDims {
    pub embedding: usize,
    pub hidden: usize,
    pub attention: usize,
    pub publications: usize,
}

impl ModelDims {
    pub fn full_defaults(publications: usize) -> Self {
        ModelDims {
            embedding: 300,
            hidden: 300,
            attention: 600,
            publications,
        }
    }

    pub fn state_size(&self) -> usize {
        2 * self.hidden
    }
}

/// theta_f: both LSTM directions plus the attention parameters.
#[derive(Debug, Clone)]
pub struct FeatureExtractorParams {
    pub fwd: LstmParams<Scalar>,
    pub bwd: LstmParams<Scalar>,
    pub attention: AttentionParams<Scalar>,
}

impl FeatureExtractorParams {
    pub fn zeros(dims: &ModelDims) -> Self {
        FeatureExtractorParams {
            fwd: LstmParams::zeros(dims.embedding, dims.hidden),
            bwd: LstmParams::zeros(dims.embedding, dims.hidden),
            attention: AttentionParams::zeros(dims.attention, dims.state_size()),
        }
    }

    /// uniform(-0.08, 0.08) weights, zero biases.
    pub fn init<R: Rng>(dims: &ModelDims, rng: &mut R) -> Self {
        let mut p = Self::zeros(dims);
        for (name, m) in p.fwd.entries_mut().into_iter().chain(p.bwd.entries_mut()) {
            if name.starts_with("w_") {
                init_uniform(m, rng, 0.08);
            }
        }
        init_uniform(&mut p.attention.w1, rng, 0.08);
        init_uniform(&mut p.attention.w2, rng, 0.08);
        p
    }
}

impl ParamGroup<Scalar> for FeatureExtractorParams {
    fn entries(&self) -> Vec<(&'static str, &Matrix<Scalar>)> {
        let mut v = Vec::with_capacity(26);
        for (name, m) in self.fwd.entries() {
            v.push((fwd_name(name), m));
        }
        for (name, m) in self.bwd.entries() {
            v.push((bwd_name(name), m));
        }
        v.extend(self.attention.entries());
        v
    }

    fn entries_mut(&mut self) -> Vec<(&'static str, &mut Matrix<Scalar>)> {
        let mut v = Vec::with_capacity(26);
        for (name, m) in self.fwd.entries_mut() {
            v.push((fwd_name(name), m));
        }
        for (name, m) in self.bwd.entries_mut() {
            v.push((bwd_name(name), m));
        }
        v.extend(self.attention.entries_mut());
        v
    }
}

fn fwd_name(name: &'static str) -> &'static str {
    match name {
        "w_xi" => "fwd.w_xi",
        "w_hi" => "fwd.w_hi",
        "w_xf" => "fwd.w_xf",
        "w_hf" => "fwd.w_hf",
        "w_xg" => "fwd.w_xg",
        "w_hg" => "fwd.w_hg",
        "w_xo" => "fwd.w_xo",
        "w_ho" => "fwd.w_ho",
        "b_i" => "fwd.b_i",
        "b_f" => "fwd.b_f",
        "b_g" => "fwd.b_g",
        "b_o" => "fwd.b_o",
        other => other,
    }
}

fn bwd_name(name: &'static str) -> &'static str {
    match name {
        "w_xi" => "bwd.w_xi",
        "w_hi" => "bwd.w_hi",
        "w_xf" => "bwd.w_xf",
        "w_hf" => "bwd.w_hf",
        "w_xg" => "bwd.w_xg",
        "w_hg" => "bwd.w_hg",
        "w_xo" => "bwd.w_xo",
        "w_ho" => "bwd.w_ho",
        "b_i" => "bwd.b_i",
        "b_f" => "bwd.b_f",
        "b_g" => "bwd.b_g",
        "b_o" => "bwd.b_o",
        other => other,
    }
}

/// One softmax head: `K x 2u` weights plus bias.
#[derive(Debug, Clone)]
pub struct HeadParams {
    pub w: Matrix<Scalar>,
    pub b: Matrix<Scalar>,
}

impl HeadParams {
    pub fn zeros(classes: usize, state: usize) -> Self {
        HeadParams {
            w: Matrix::zeros(classes, state),
            b: Matrix::zero_vector(classes),
        }
    }

    pub fn init<R: Rng>(classes: usize, state: usize, rng: &mut R) -> Self {
        let mut h = Self::zeros(classes, state);
        init_uniform(&mut h.w, rng, 0.08);
        h
    }

    pub fn classes(&self) -> usize {
        self.w.rows()
    }
}

impl ParamGroup<Scalar> for HeadParams {
    fn entries(&self) -> Vec<(&'static str, &Matrix<Scalar>)> {
        vec![("w", &self.w), ("b", &self.b)]
    }

    fn entries_mut(&mut self) -> Vec<(&'static str, &mut Matrix<Scalar>)> {
        vec![("w", &mut self.w), ("b", &mut self.b)]
    }
}

/// All three parameter groups.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub dims: ModelDims,
    pub extractor: FeatureExtractorParams,
    pub satire: HeadParams,
    pub publication: HeadParams,
}

impl ModelParams {
    pub fn init<R: Rng>(dims: ModelDims, rng: &mut R) -> Self {
        ModelParams {
            extractor: FeatureExtractorParams::init(&dims, rng),
            satire: HeadParams::init(2, dims.state_size(), rng),
            publication: HeadParams::init(dims.publications, dims.state_size(), rng),
            dims,
        }
    }
}

/// Forward caches for one document.
pub struct FeatureCache {
    pub states: Matrix<Scalar>,
    pub bilstm: BilstmCache<Scalar>,
    pub attention: AttentionCache<Scalar>,
}

/// Attention-pooled document vector over non-PAD positions. Returns the
/// pooled vector `m`, the attention weights `a` (one per non-PAD token),
/// and the backward cache.
pub fn extract_features(
    extractor: &FeatureExtractorParams,
    doc: &EncodedDocument,
    embeddings: &EmbeddingMatrix,
) -> Result<(Vec<Scalar>, Vec<Scalar>, FeatureCache)> {
    assert!(doc.true_len >= 1, "document must have at least one token");
    let xs: Vec<Vec<Scalar>> = doc.indices[..doc.true_len]
        .iter()
        .map(|&i| embeddings.row(i).to_vec())
        .collect();
    let (states, bilstm) = bilstm_forward(&extractor.fwd, &extractor.bwd, &xs, doc.true_len)?;
    let (m, a, attention) = self_attention_forward(&extractor.attention, &states)?;
    Ok((m, a, FeatureCache { states, bilstm, attention }))
}

/// Gradients flowing out of one loss evaluation.
pub struct LossGrads {
    pub head: HeadParams,
    pub extractor: FeatureExtractorParams,
    /// Gradient w.r.t. the embedding vector at each non-PAD position; used
    /// only when embeddings are fine-tuned.
    pub input: Vec<Vec<Scalar>>,
}

pub struct LossOutput {
    pub loss: Scalar,
    pub probabilities: Vec<Scalar>,
    pub predicted: usize,
    pub attention: Vec<Scalar>,
    pub grads: LossGrads,
}

fn head_loss(
    extractor: &FeatureExtractorParams,
    head: &HeadParams,
    doc: &EncodedDocument,
    embeddings: &EmbeddingMatrix,
    label: usize,
) -> Result<LossOutput> {
    let (m, a, cache) = extract_features(extractor, doc, embeddings)?;
    let logits = linear_forward(&head.w, head.b.as_slice(), &m)?;
    let (loss, p) = softmax_xent_forward(&logits, label);
    let predicted = argmax(&p);

    let dlogits = softmax_xent_backward(&p, label);
    let lin = linear_backward(&head.w, &m, &dlogits)?;
    let head_grads = HeadParams {
        w: lin.dw,
        b: Matrix::from_vec(lin.db.len(), 1, lin.db),
    };
    let (attn_grads, dstates) =
        self_attention_backward(&extractor.attention, &cache.states, &cache.attention, &lin.dx);
    let (gfwd, gbwd, dxs) =
        bilstm_backward(&extractor.fwd, &extractor.bwd, &cache.bilstm, &dstates)?;
    Ok(LossOutput {
        loss,
        probabilities: p,
        predicted,
        attention: a,
        grads: LossGrads {
            head: head_grads,
            extractor: FeatureExtractorParams { fwd: gfwd, bwd: gbwd, attention: attn_grads },
            input: dxs,
        },
    })
}

/// J_s = -log p_s(y_s) with exact gradients over theta_s and theta_f.
pub fn satire_loss(
    extractor: &FeatureExtractorParams,
    satire_head: &HeadParams,
    doc: &EncodedDocument,
    embeddings: &EmbeddingMatrix,
) -> Result<LossOutput> {
    head_loss(extractor, satire_head, doc, embeddings, doc.satire)
}

/// J_p = -log p_p(y_p) with exact gradients over theta_p and theta_f.
pub fn publication_loss(
    extractor: &FeatureExtractorParams,
    publication_head: &HeadParams,
    doc: &EncodedDocument,
    embeddings: &EmbeddingMatrix,
) -> Result<LossOutput> {
    head_loss(extractor, publication_head, doc, embeddings, doc.publication)
}

/// Combined shared-feature gradient of the adversarial update:
/// `dJ_s/dtheta_f - lambda * dJ_p/dtheta_f`, elementwise.
pub fn adversarial_feature_grad(
    satire_grad: &FeatureExtractorParams,
    publication_grad: &FeatureExtractorParams,
    lambda: Scalar,
) -> FeatureExtractorParams {
    let mut combined = satire_grad.clone();
    combined.axpy(-lambda, publication_grad);
    combined
}

pub fn argmax(values: &[Scalar]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Batch-mean loss and gradients over a fixed document order.
pub struct BatchResult {
    pub mean_loss: Scalar,
    pub head: HeadParams,
    pub extractor: FeatureExtractorParams,
    /// (vocabulary index, gradient) pairs for embedding fine-tuning.
    pub embedding_grads: Vec<(usize, Vec<Scalar>)>,
}

pub enum Task {
    Satire,
    Publication,
}

pub fn batch_loss(
    extractor: &FeatureExtractorParams,
    head: &HeadParams,
    docs: &[&EncodedDocument],
    embeddings: &EmbeddingMatrix,
    task: Task,
    collect_embedding_grads: bool,
) -> Result<BatchResult> {
    assert!(!docs.is_empty());
    let scale = 1.0 / docs.len() as Scalar;
    let mut total = 0.0;
    let mut head_acc = head.zeros_like();
    let mut ext_acc = extractor.zeros_like();
    let mut emb_grads = Vec::new();
    for doc in docs {
        let out = match task {
            Task::Satire => satire_loss(extractor, head, doc, embeddings)?,
            Task::Publication => publication_loss(extractor, head, doc, embeddings)?,
        };
        total += out.loss;
        head_acc.axpy(scale, &out.grads.head);
        ext_acc.axpy(scale, &out.grads.extractor);
        if collect_embedding_grads {
            for (pos, dx) in out.grads.input.iter().enumerate() {
                let index = doc.indices[pos];
                if index == PAD_INDEX {
                    continue;
                }
                let mut g = dx.clone();
                g.iter_mut().for_each(|v| *v *= scale);
                emb_grads.push((index, g));
            }
        }
    }
    Ok(BatchResult {
        mean_loss: total * scale,
        head: head_acc,
        extractor: ext_acc,
        embedding_grads: emb_grads,
    })
}
