//! Shared helpers for integration tests: central finite-difference
//! gradient oracle and small random fixtures.

#![allow(dead_code)]

use rand::Rng;

use satire_debias::corpus::EncodedDocument;
use satire_debias::embeddings::EmbeddingMatrix;
use satire_debias::model::ModelDims;
use satire_debias::netcore::ParamGroup;
use satire_debias::rng;
use satire_debias::Scalar;

pub const FD_STEP: Scalar = 1e-5;
pub const FD_TOL: Scalar = 1e-5;

/// Relative error with an absolute floor so that near-zero gradient pairs
/// are compared absolutely at the same tolerance scale.
pub fn rel_err(a: Scalar, b: Scalar) -> Scalar {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
}

/// Central finite differences over every element of every array in the
/// group; panics with array/element coordinates on the first mismatch.
/// Returns the maximum relative error observed.
pub fn assert_group_grads<P, F>(params: &P, analytic: &P, mut eval: F, context: &str) -> Scalar
where
    P: ParamGroup<Scalar>,
    F: FnMut(&P) -> Scalar,
{
    let mut p = params.clone();
    let n_entries = params.entries().len();
    let mut worst = 0.0_f64;
    for ei in 0..n_entries {
        let len = params.entries()[ei].1.as_slice().len();
        let name = params.entries()[ei].0;
        for j in 0..len {
            let orig = p.entries()[ei].1.as_slice()[j];
            p.entries_mut()[ei].1.as_mut_slice()[j] = orig + FD_STEP;
            let fp = eval(&p);
            p.entries_mut()[ei].1.as_mut_slice()[j] = orig - FD_STEP;
            let fm = eval(&p);
            p.entries_mut()[ei].1.as_mut_slice()[j] = orig;
            let numeric = (fp - fm) / (2.0 * FD_STEP);
            let ana = analytic.entries()[ei].1.as_slice()[j];
            let err = rel_err(numeric, ana);
            assert!(
                err < FD_TOL,
                "{context}: {name}[{j}] numeric {numeric} vs analytic {ana} (rel {err})"
            );
            worst = worst.max(err);
        }
    }
    worst
}

/// Finite differences over a flat slice of values with a matching analytic
/// gradient slice.
pub fn assert_slice_grads<F>(
    values: &mut [Scalar],
    analytic: &[Scalar],
    mut eval: F,
    context: &str,
) where
    F: FnMut(&[Scalar]) -> Scalar,
{
    assert_eq!(values.len(), analytic.len());
    for j in 0..values.len() {
        let orig = values[j];
        values[j] = orig + FD_STEP;
        let fp = eval(values);
        values[j] = orig - FD_STEP;
        let fm = eval(values);
        values[j] = orig;
        let numeric = (fp - fm) / (2.0 * FD_STEP);
        let err = rel_err(numeric, analytic[j]);
        assert!(
            err < FD_TOL,
            "{context}: input[{j}] numeric {numeric} vs analytic {} (rel {err})",
            analytic[j]
        );
    }
}

/// Reduced layer sizes used throughout the gradient checks.
pub fn check_dims(publications: usize) -> ModelDims {
    ModelDims { embedding: 4, hidden: 3, attention: 5, publications }
}

/// Random embeddings with a zero padding row.
pub fn random_embeddings(vocab: usize, dim: usize, seed: u64) -> EmbeddingMatrix {
    let mut e = EmbeddingMatrix::zeros(vocab, dim);
    let mut r = rng::stream(seed, "test-embeddings");
    for i in 1..vocab {
        for v in e.vectors.row_mut(i) {
            *v = r.gen_range(-0.5..0.5);
        }
    }
    e
}

/// Random document of 1..=max_tokens non-special indices.
pub fn random_doc(
    vocab: usize,
    max_tokens: usize,
    publications: usize,
    seed: u64,
) -> EncodedDocument {
    let mut r = rng::stream(seed, "test-doc");
    let len = r.gen_range(1..=max_tokens);
    let indices: Vec<usize> = (0..len).map(|_| r.gen_range(2..vocab)).collect();
    EncodedDocument {
        id: format!("doc-{seed}"),
        true_len: indices.len(),
        indices,
        publication: r.gen_range(0..publications),
        satire: r.gen_range(0..2),
    }
}

// ---------------------------------------------------------------------------
// Layer-by-layer gradient-check suite, shared by the gradient tests and the
// timed acceptance run.

use satire_debias::linalg::{dot, Matrix};
use satire_debias::model::{
    publication_loss, satire_loss, FeatureExtractorParams, HeadParams,
};
use satire_debias::netcore::{
    bilstm_backward, bilstm_forward, init_uniform, linear_backward, linear_forward,
    lstm_cell_backward, lstm_cell_forward, self_attention_backward, self_attention_forward,
    softmax_xent_backward, softmax_xent_forward, AttentionParams, LstmParams,
};

pub fn random_vec<R: Rng>(n: usize, r: &mut R) -> Vec<Scalar> {
    (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()
}

fn random_lstm<R: Rng>(input: usize, hidden: usize, r: &mut R) -> LstmParams<Scalar> {
    let mut p = LstmParams::zeros(input, hidden);
    for (_, m) in p.entries_mut() {
        init_uniform(m, r, 0.4);
    }
    p
}

fn random_attention<R: Rng>(d_a: usize, state: usize, r: &mut R) -> AttentionParams<Scalar> {
    let mut p = AttentionParams::zeros(d_a, state);
    init_uniform(&mut p.w1, r, 0.4);
    init_uniform(&mut p.w2, r, 0.4);
    p
}

pub fn gradcheck_linear(seed: u64) {
    let mut r = rng::stream(seed, "gc-linear");
    let (rows, cols) = (3, 4);
    let mut w = Matrix::zeros(rows, cols);
    init_uniform(&mut w, &mut r, 0.5);
    let b = random_vec(rows, &mut r);
    let mut x = random_vec(cols, &mut r);
    let c = random_vec(rows, &mut r);
    // Scalar objective: c . (W x + b).
    let g = linear_backward(&w, &x, &c).unwrap();
    assert_slice_grads(
        &mut x,
        &g.dx,
        |x| dot(&c, &linear_forward(&w, &b, x).unwrap()),
        "linear dx",
    );
    let mut w_flat = w.as_slice().to_vec();
    assert_slice_grads(
        &mut w_flat,
        g.dw.as_slice(),
        |wf| {
            let wm = Matrix::from_vec(rows, cols, wf.to_vec());
            dot(&c, &linear_forward(&wm, &b, &x).unwrap())
        },
        "linear dw",
    );
    let mut b_flat = b.clone();
    assert_slice_grads(
        &mut b_flat,
        &g.db,
        |bf| dot(&c, &linear_forward(&w, bf, &x).unwrap()),
        "linear db",
    );
}

pub fn gradcheck_softmax_xent(seed: u64) {
    let mut r = rng::stream(seed, "gc-softmax");
    let k = r.gen_range(2..=6);
    let y = r.gen_range(0..k);
    let mut logits = random_vec(k, &mut r);
    let (_, p) = softmax_xent_forward(&logits, y);
    let dlogits = softmax_xent_backward(&p, y);
    assert_slice_grads(
        &mut logits,
        &dlogits,
        |l| softmax_xent_forward(l, y).0,
        "softmax-xent dlogits",
    );
}

pub fn gradcheck_lstm_cell(seed: u64) {
    let mut r = rng::stream(seed, "gc-lstm-cell");
    let (input, hidden) = (4, 3);
    let params = random_lstm(input, hidden, &mut r);
    let x = random_vec(input, &mut r);
    let h_prev = random_vec(hidden, &mut r);
    let c_prev = random_vec(hidden, &mut r);
    let ch = random_vec(hidden, &mut r);
    let cc = random_vec(hidden, &mut r);
    // Scalar objective: ch . h + cc . c.
    let eval = |p: &LstmParams<Scalar>, x: &[Scalar], hp: &[Scalar], cp: &[Scalar]| {
        let (h, c, _) = lstm_cell_forward(p, x, hp, cp, 0).unwrap();
        dot(&ch, &h) + dot(&cc, &c)
    };
    let (_, _, cache) = lstm_cell_forward(&params, &x, &h_prev, &c_prev, 0).unwrap();
    let mut grads = params.zeros_like();
    let (dx, dh_prev, dc_prev) = lstm_cell_backward(&params, &cache, &ch, &cc, &mut grads);
    assert_group_grads(
        &params,
        &grads,
        |p| eval(p, &x, &h_prev, &c_prev),
        "lstm-cell params",
    );
    let mut xv = x.clone();
    assert_slice_grads(&mut xv, &dx, |x| eval(&params, x, &h_prev, &c_prev), "lstm-cell dx");
    let mut hv = h_prev.clone();
    assert_slice_grads(
        &mut hv,
        &dh_prev,
        |h| eval(&params, &x, h, &c_prev),
        "lstm-cell dh_prev",
    );
    let mut cv = c_prev.clone();
    assert_slice_grads(
        &mut cv,
        &dc_prev,
        |c| eval(&params, &x, &h_prev, c),
        "lstm-cell dc_prev",
    );
}

pub fn gradcheck_bilstm(seed: u64) {
    let mut r = rng::stream(seed, "gc-bilstm");
    let (input, hidden) = (4, 3);
    let fwd = random_lstm(input, hidden, &mut r);
    let bwd = random_lstm(input, hidden, &mut r);
    let len = r.gen_range(1..=6);
    let xs: Vec<Vec<Scalar>> = (0..len).map(|_| random_vec(input, &mut r)).collect();
    let c = Matrix::from_vec(len, 2 * hidden, random_vec(len * 2 * hidden, &mut r));
    // Scalar objective: sum of C (elementwise) H.
    let eval = |f: &LstmParams<Scalar>, b: &LstmParams<Scalar>, xs: &[Vec<Scalar>]| {
        let (h, _) = bilstm_forward(f, b, xs, xs.len()).unwrap();
        dot(c.as_slice(), h.as_slice())
    };
    let (_, cache) = bilstm_forward(&fwd, &bwd, &xs, len).unwrap();
    let (gf, gb, dxs) = bilstm_backward(&fwd, &bwd, &cache, &c).unwrap();
    assert_group_grads(&fwd, &gf, |f| eval(f, &bwd, &xs), "bilstm fwd params");
    assert_group_grads(&bwd, &gb, |b| eval(&fwd, b, &xs), "bilstm bwd params");
    for t in 0..len {
        let mut xt = xs[t].clone();
        let xs_ref = &xs;
        assert_slice_grads(
            &mut xt,
            &dxs[t],
            |x| {
                let mut xs2 = xs_ref.clone();
                xs2[t] = x.to_vec();
                eval(&fwd, &bwd, &xs2)
            },
            "bilstm dx",
        );
    }
}

pub fn gradcheck_attention(seed: u64) {
    let mut r = rng::stream(seed, "gc-attention");
    let (state, d_a) = (6, 5);
    let params = random_attention(d_a, state, &mut r);
    let len = r.gen_range(1..=6);
    let h = Matrix::from_vec(len, state, random_vec(len * state, &mut r));
    let c = random_vec(state, &mut r);
    // Scalar objective: c . m.
    let eval = |p: &AttentionParams<Scalar>, h: &Matrix<Scalar>| {
        let (m, _, _) = self_attention_forward(p, h).unwrap();
        dot(&c, &m)
    };
    let (_, _, cache) = self_attention_forward(&params, &h).unwrap();
    let (grads, dh) = self_attention_backward(&params, &h, &cache, &c);
    assert_group_grads(&params, &grads, |p| eval(p, &h), "attention params");
    let mut h_flat = h.as_slice().to_vec();
    assert_slice_grads(
        &mut h_flat,
        dh.as_slice(),
        |hf| {
            let hm = Matrix::from_vec(len, state, hf.to_vec());
            eval(&params, &hm)
        },
        "attention dH",
    );
}

/// Full classification graphs (embedding lookup -> biLSTM -> attention ->
/// head -> softmax-CE) for both tasks, checking extractor parameters, head
/// parameters, and the input embedding vectors.
pub fn gradcheck_full_graphs(seed: u64) {
    let publications = 4;
    let dims = check_dims(publications);
    let mut r = rng::stream(seed, "gc-full");
    let ext = FeatureExtractorParams::init(&dims, &mut r);
    let mut satire_head = HeadParams::zeros(2, dims.state_size());
    init_uniform(&mut satire_head.w, &mut r, 0.4);
    init_uniform(&mut satire_head.b, &mut r, 0.4);
    let mut pub_head = HeadParams::zeros(publications, dims.state_size());
    init_uniform(&mut pub_head.w, &mut r, 0.4);
    init_uniform(&mut pub_head.b, &mut r, 0.4);

    let vocab = 12;
    let emb = random_embeddings(vocab, dims.embedding, seed ^ 0x5a5a);
    // Distinct token indices so each embedding row backs exactly one
    // position, which makes the per-position input gradient directly
    // comparable to a finite difference on the embedding table.
    let mut indices: Vec<usize> = (2..vocab).collect();
    use rand::seq::SliceRandom;
    indices.shuffle(&mut r);
    indices.truncate(r.gen_range(1..=6));
    let doc = EncodedDocument {
        id: "gc".into(),
        true_len: indices.len(),
        indices,
        publication: r.gen_range(0..publications),
        satire: r.gen_range(0..2),
    };

    // Satire graph.
    let out = satire_loss(&ext, &satire_head, &doc, &emb).unwrap();
    assert_group_grads(
        &ext,
        &out.grads.extractor,
        |e| satire_loss(e, &satire_head, &doc, &emb).unwrap().loss,
        "J_s extractor",
    );
    assert_group_grads(
        &satire_head,
        &out.grads.head,
        |h| satire_loss(&ext, h, &doc, &emb).unwrap().loss,
        "J_s head",
    );
    for (pos, dx) in out.grads.input.iter().enumerate() {
        let idx = doc.indices[pos];
        let mut row = emb.row(idx).to_vec();
        let emb_ref = &emb;
        assert_slice_grads(
            &mut row,
            dx,
            |row| {
                let mut e2 = emb_ref.clone();
                e2.vectors.row_mut(idx).copy_from_slice(row);
                satire_loss(&ext, &satire_head, &doc, &e2).unwrap().loss
            },
            "J_s input",
        );
    }

    // Publication graph.
    let out = publication_loss(&ext, &pub_head, &doc, &emb).unwrap();
    assert_group_grads(
        &ext,
        &out.grads.extractor,
        |e| publication_loss(e, &pub_head, &doc, &emb).unwrap().loss,
        "J_p extractor",
    );
    assert_group_grads(
        &pub_head,
        &out.grads.head,
        |h| publication_loss(&ext, h, &doc, &emb).unwrap().loss,
        "J_p head",
    );
}

/// Every layer plus both full graphs for one seed.
pub fn gradcheck_all(seed: u64) {
    gradcheck_linear(seed);
    gradcheck_softmax_xent(seed);
    gradcheck_lstm_cell(seed);
    gradcheck_bilstm(seed);
    gradcheck_attention(seed);
    gradcheck_full_graphs(seed);
}
