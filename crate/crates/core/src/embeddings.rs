//! Word-embedding pretraining: skip-gram with negative sampling over the
//! encoded corpus, plus the text interchange format ("V D" header, one
//! `token v1 .. vD` row per line).

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;

use crate::corpus::{EncodedDocument, Vocabulary, PAD_INDEX, UNK_INDEX};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::rng;
use crate::Scalar;

/// Input vectors of the vocabulary, one row per token. The PAD row is
/// all-zero and never updated.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub vectors: Matrix<Scalar>,
    pub dim: usize,
}

impl EmbeddingMatrix {
    pub fn zeros(vocab_size: usize, dim: usize) -> Self {
        EmbeddingMatrix {
            vectors: Matrix::zeros(vocab_size, dim),
            dim,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.vectors.rows()
    }

    pub fn row(&self, index: usize) -> &[Scalar] {
        self.vectors.row(index)
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SgnsConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 300,
            window: 5,
            negatives: 5,
            epochs: 5,
            lr: 0.025,
            seed: 0,
        }
    }
}

/// Negative-sampling table over the unigram distribution raised to 0.75.
/// PAD and UNK carry zero mass.
pub struct NegativeTable {
    cumulative: Vec<f64>,
}

impl NegativeTable {
    pub fn build(vocab: &Vocabulary) -> Self {
        let mut cumulative = Vec::with_capacity(vocab.len());
        let mut acc = 0.0;
        for i in 0..vocab.len() {
            if i != PAD_INDEX && i != UNK_INDEX {
                acc += (vocab.count(i) as f64).powf(0.75);
            }
            cumulative.push(acc);
        }
        NegativeTable { cumulative }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.gen_range(0.0..total);
        self.cumulative.partition_point(|&c| c <= u)
    }

    pub fn probability(&self, index: usize) -> f64 {
        let total = *self.cumulative.last().unwrap();
        let prev = if index == 0 { 0.0 } else { self.cumulative[index - 1] };
        (self.cumulative[index] - prev) / total
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Loss of a single (center, context, negatives) example at the current
/// vectors: `-log s(u_ctx.v) - sum_neg log s(-u_neg.v)`.
pub fn pair_loss(
    input: &Matrix<Scalar>,
    output: &Matrix<Scalar>,
    center: usize,
    context: usize,
    negatives: &[usize],
) -> f64 {
    let v = input.row(center);
    let mut loss = -sigmoid(dot(output.row(context), v)).ln();
    for &neg in negatives {
        loss -= sigmoid(-dot(output.row(neg), v)).ln();
    }
    loss
}

/// One SGD update of the pair objective; returns the example's loss before
/// the update.
pub fn pair_update(
    input: &mut Matrix<Scalar>,
    output: &mut Matrix<Scalar>,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: f64,
) -> f64 {
    let dim = input.cols();
    let loss = pair_loss(input, output, center, context, negatives);
    let mut v_grad = vec![0.0; dim];
    // Positive pair: d/dz -log s(z) = s(z) - 1.
    {
        let v = input.row(center).to_vec();
        let u = output.row_mut(context);
        let coef = sigmoid(dot(u, &v)) - 1.0;
        for k in 0..dim {
            v_grad[k] += coef * u[k];
            u[k] -= lr * coef * v[k];
        }
    }
    for &neg in negatives {
        let v = input.row(center).to_vec();
        let u = output.row_mut(neg);
        let coef = sigmoid(dot(u, &v));
        for k in 0..dim {
            v_grad[k] += coef * u[k];
            u[k] -= lr * coef * v[k];
        }
    }
    let v = input.row_mut(center);
    for k in 0..dim {
        v[k] -= lr * v_grad[k];
    }
    loss
}

/// Pretrain embeddings on the encoded corpus. Deterministic for a fixed
/// seed; the learning rate decays linearly over the processed positions.
pub fn sgns_train(
    corpus: &[EncodedDocument],
    vocab: &Vocabulary,
    config: &SgnsConfig,
) -> Result<EmbeddingMatrix> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if config.window < 1 || config.negatives < 1 {
        return Err(Error::InvalidConfig(
            "window and negatives must be >= 1".into(),
        ));
    }
    let v = vocab.len();
    let mut input = Matrix::zeros(v, config.dim);
    let mut output = Matrix::zeros(v, config.dim);
    let mut init_rng = rng::stream(config.seed, "sgns-init");
    let scale = 0.5 / config.dim as f64;
    for i in 0..v {
        if i == PAD_INDEX {
            continue;
        }
        for x in input.row_mut(i) {
            *x = init_rng.gen_range(-scale..scale);
        }
    }
    let table = NegativeTable::build(vocab);
    let mut rng = rng::stream(config.seed, "sgns");

    let total_positions: usize =
        corpus.iter().map(|d| d.true_len).sum::<usize>() * config.epochs;
    let mut processed = 0usize;
    for _epoch in 0..config.epochs {
        for doc in corpus {
            let seq = &doc.indices[..doc.true_len];
            for (center_pos, &center) in seq.iter().enumerate() {
                processed += 1;
                if center == PAD_INDEX {
                    continue;
                }
                let lr = config.lr
                    * (1.0 - processed as f64 / (total_positions + 1) as f64).max(1e-4);
                let lo = center_pos.saturating_sub(config.window);
                let hi = (center_pos + config.window + 1).min(seq.len());
                for ctx_pos in lo..hi {
                    if ctx_pos == center_pos || seq[ctx_pos] == PAD_INDEX {
                        continue;
                    }
                    let negatives: Vec<usize> = (0..config.negatives)
                        .map(|_| table.sample(&mut rng))
                        .collect();
                    pair_update(&mut input, &mut output, center, seq[ctx_pos], &negatives, lr);
                }
            }
        }
    }
    // Postprocess: remove the shared mean direction and rescale to unit
    // mean row norm. On small corpora the negative-sampling optimum packs
    // every vector around one common direction (all pairwise cosines near
    // 1), which starves downstream layers of input variation; centering
    // keeps only the informative residual. The PAD row stays zero.
    let mut mean = vec![0.0; config.dim];
    let trained = v - 1; // every row but PAD
    for i in 0..v {
        if i == PAD_INDEX {
            continue;
        }
        for (m, x) in mean.iter_mut().zip(input.row(i)) {
            *m += x / trained as f64;
        }
    }
    let mut norm_sum = 0.0;
    for i in 0..v {
        if i == PAD_INDEX {
            continue;
        }
        let row = input.row_mut(i);
        for (x, m) in row.iter_mut().zip(&mean) {
            *x -= m;
        }
        norm_sum += row.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    let mean_norm = norm_sum / trained as f64;
    if mean_norm > 1e-12 {
        for i in 0..v {
            if i == PAD_INDEX {
                continue;
            }
            for x in input.row_mut(i) {
                *x /= mean_norm;
            }
        }
    }

    debug_assert!(input.row(PAD_INDEX).iter().all(|&x| x == 0.0));
    Ok(EmbeddingMatrix {
        vectors: input,
        dim: config.dim,
    })
}

/// Text format: header "V D", then one `token v1 .. vD` row per line.
/// Values are printed with 17 significant digits so save->load round-trips
/// bit-identically.
pub fn save_embeddings(e: &EmbeddingMatrix, vocab: &Vocabulary, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{} {}", e.vocab_size(), e.dim)?;
    for i in 0..e.vocab_size() {
        write!(out, "{}", vocab.token(i))?;
        for v in e.row(i) {
            write!(out, " {:.16e}", v)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Tokens present in the vocabulary but absent from the file fall back to
/// the UNK vector.
pub fn load_embeddings(path: &Path, vocab: &Vocabulary, expected_dim: usize) -> Result<EmbeddingMatrix> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::EmbeddingFormat("empty file".into()))??;
    let mut parts = header.split_whitespace();
    let _v: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::EmbeddingFormat("bad header".into()))?;
    let dim: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::EmbeddingFormat("bad header".into()))?;
    if dim != expected_dim {
        return Err(Error::EmbeddingFormat(format!(
            "dimension mismatch: file has {}, expected {}",
            dim, expected_dim
        )));
    }
    let mut vectors = Matrix::zeros(vocab.len(), dim);
    let mut present = vec![false; vocab.len()];
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(' ');
        let token = fields
            .next()
            .ok_or_else(|| Error::EmbeddingFormat(format!("line {}: empty", lineno + 2)))?;
        let Some(index) = vocab.index(token) else {
            continue; // token not in this vocabulary
        };
        let row = vectors.row_mut(index);
        let mut k = 0;
        for field in fields {
            if k >= dim {
                return Err(Error::EmbeddingFormat(format!(
                    "line {}: too many values",
                    lineno + 2
                )));
            }
            row[k] = field.parse().map_err(|_| {
                Error::EmbeddingFormat(format!("line {}: bad value {:?}", lineno + 2, field))
            })?;
            k += 1;
        }
        if k != dim {
            return Err(Error::EmbeddingFormat(format!(
                "line {}: expected {} values, got {}",
                lineno + 2,
                dim,
                k
            )));
        }
        present[index] = true;
    }
    if !present[UNK_INDEX] {
        return Err(Error::EmbeddingFormat("missing <UNK> row".into()));
    }
    let unk = vectors.row(UNK_INDEX).to_vec();
    for i in 0..vocab.len() {
        if !present[i] && i != PAD_INDEX {
            vectors.row_mut(i).copy_from_slice(&unk);
        }
    }
    // PAD stays zero regardless of file contents.
    vectors.row_mut(PAD_INDEX).fill(0.0);
    Ok(EmbeddingMatrix { vectors, dim })
}
