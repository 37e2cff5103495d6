//! Training loops: the alternating-minibatch adversarial loop, the
//! no-adversary baseline with a frozen-feature publication probe, lambda
//! sweeps, the majority baseline, and early stopping on dev satire F1.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::EncodedDocument;
use crate::embeddings::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::metrics::{
    build_report, satire_prf, weighted_macro_prf, ConfusionCounts, MetricsReport, Prf,
};
use crate::model::{
    adversarial_feature_grad, argmax, batch_loss, extract_features, FeatureExtractorParams,
    HeadParams, ModelDims, ModelParams, Task,
};
use crate::netcore::{
    adam_step, linear_backward, linear_forward, softmax_xent_backward, softmax_xent_forward,
    AdamState, ParamGroup,
};
use crate::rng;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainMode {
    Adversarial,
    Baseline,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dims: ModelDims,
    pub mode: TrainMode,
    /// Weight of the reversed publication gradient in the shared-feature
    /// update.
    pub lambda: Scalar,
    /// Initial Adam learning rate.
    pub lr: Scalar,
    /// Inverse-time learning-rate decay.
    pub decay: Scalar,
    pub batch_size: usize,
    pub max_len: usize,
    pub max_epochs: usize,
    /// Evaluations without dev satire-F1 improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    /// Update the embedding table through the classifier losses (off by
    /// default; the heads and extractor always train).
    pub fine_tune_embeddings: bool,
}

impl TrainConfig {
    pub fn defaults(dims: ModelDims, mode: TrainMode, seed: u64) -> Self {
        TrainConfig {
            dims,
            mode,
            lambda: 0.0,
            lr: 1e-4,
            decay: 1e-6,
            batch_size: 32,
            max_len: 500,
            max_epochs: 100,
            patience: 5,
            seed,
            fine_tune_embeddings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 {
            return Err(Error::InvalidConfig("lambda must be >= 0".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        if self.patience < 1 {
            return Err(Error::InvalidConfig("patience must be >= 1".into()));
        }
        if self.max_epochs < 1 {
            return Err(Error::InvalidConfig("max_epochs must be >= 1".into()));
        }
        if !(self.lr > 0.0) || self.decay < 0.0 {
            return Err(Error::InvalidConfig("need lr > 0 and decay >= 0".into()));
        }
        Ok(())
    }
}

/// One dev evaluation, taken once per epoch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRecord {
    pub epoch: usize,
    pub step: u64,
    pub dev_satire: Prf,
    pub dev_publication: Prf,
    pub mean_satire_loss: Scalar,
    pub mean_publication_loss: Scalar,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainLog {
    pub records: Vec<EvalRecord>,
    /// Index into `records` of the evaluation whose checkpoint is returned.
    pub best_index: Option<usize>,
}

impl TrainLog {
    /// One JSON object per line: the evaluation records in order, then one
    /// trailer object pointing at the best checkpoint.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).unwrap());
            out.push('\n');
        }
        if let Some(i) = self.best_index {
            let best = &self.records[i];
            out.push_str(
                &serde_json::to_string(&serde_json::json!({
                    "best_epoch": best.epoch,
                    "best_step": best.step,
                    "best_dev_satire_f1": best.dev_satire.f1,
                }))
                .unwrap(),
            );
            out.push('\n');
        }
        out
    }
}

/// Trained model plus its log and the embedding table actually used (only
/// changed from the input when fine-tuning is on).
pub struct TrainOutcome {
    pub params: ModelParams,
    pub embeddings: EmbeddingMatrix,
    pub log: TrainLog,
}

fn shuffled_indices(n: usize, seed: u64, name: &str) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut r = rng::stream(seed, name);
    order.shuffle(&mut r);
    order
}

fn gather<'a>(docs: &'a [EncodedDocument], indices: &[usize]) -> Vec<&'a EncodedDocument> {
    indices.iter().map(|&i| &docs[i]).collect()
}

/// Class predictions for one document under both heads.
pub fn predict(
    params: &ModelParams,
    doc: &EncodedDocument,
    embeddings: &EmbeddingMatrix,
) -> Result<(usize, usize)> {
    let (m, _, _) = extract_features(&params.extractor, doc, embeddings)?;
    let s = linear_forward(&params.satire.w, params.satire.b.as_slice(), &m)?;
    let p = linear_forward(&params.publication.w, params.publication.b.as_slice(), &m)?;
    Ok((argmax(&s), argmax(&p)))
}

pub fn satire_class_names() -> Vec<String> {
    vec!["regular".to_string(), "satire".to_string()]
}

/// Full metrics over a split under both heads.
pub fn evaluate_model(
    params: &ModelParams,
    docs: &[EncodedDocument],
    embeddings: &EmbeddingMatrix,
    publication_names: &[String],
) -> Result<MetricsReport> {
    let mut sat_conf = ConfusionCounts::new(2, satire_class_names());
    let mut pub_conf = ConfusionCounts::new(publication_names.len(), publication_names.to_vec());
    let mut pub_preds = Vec::with_capacity(docs.len());
    for doc in docs {
        let (s, p) = predict(params, doc, embeddings)?;
        sat_conf.record(doc.satire, s);
        pub_conf.record(doc.publication, p);
        pub_preds.push(p);
    }
    build_report(&sat_conf, &pub_conf, &pub_preds)
}

fn dev_prfs(
    params: &ModelParams,
    dev: &[EncodedDocument],
    embeddings: &EmbeddingMatrix,
    publications: usize,
) -> Result<(Prf, Prf)> {
    let mut sat_conf = ConfusionCounts::new(2, satire_class_names());
    let names: Vec<String> = (0..publications).map(|i| i.to_string()).collect();
    let mut pub_conf = ConfusionCounts::new(publications, names);
    for doc in dev {
        let (s, p) = predict(params, doc, embeddings)?;
        sat_conf.record(doc.satire, s);
        pub_conf.record(doc.publication, p);
    }
    Ok((satire_prf(&sat_conf), weighted_macro_prf(&pub_conf)))
}

/// Plain SGD on the touched embedding rows with inverse-time lr decay,
/// used only when fine-tuning is enabled. `scale` folds in the reversal
/// factor for publication steps.
fn apply_embedding_sgd(
    embeddings: &mut EmbeddingMatrix,
    grads: &[(usize, Vec<Scalar>)],
    lr: Scalar,
    decay: Scalar,
    t: &mut u64,
    scale: Scalar,
) {
    if grads.is_empty() || scale == 0.0 {
        return;
    }
    *t += 1;
    let lr_t = lr / (1.0 + decay * *t as Scalar);
    for (index, g) in grads {
        let row = embeddings.vectors.row_mut(*index);
        for (r, gv) in row.iter_mut().zip(g) {
            *r -= lr_t * scale * gv;
        }
    }
}

struct LoopState {
    params: ModelParams,
    opt_extractor: AdamState<Scalar>,
    opt_satire: AdamState<Scalar>,
    opt_publication: AdamState<Scalar>,
    step: u64,
    emb_step: u64,
}

impl LoopState {
    fn new(config: &TrainConfig) -> Self {
        let mut init_rng = rng::stream(config.seed, "init");
        let params = ModelParams::init(config.dims, &mut init_rng);
        LoopState {
            opt_extractor: AdamState::new(&params.extractor, config.lr, config.decay),
            opt_satire: AdamState::new(&params.satire, config.lr, config.decay),
            opt_publication: AdamState::new(&params.publication, config.lr, config.decay),
            params,
            step: 0,
            emb_step: 0,
        }
    }
}

fn check_finite(loss: Scalar, step: u64) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::Diverged { step })
    }
}

/// Shared epoch/early-stopping driver. `run_epoch` performs all optimizer
/// steps of one epoch and returns (mean satire loss, mean publication
/// loss).
fn training_loop<F>(
    config: &TrainConfig,
    state: &mut LoopState,
    embeddings: &mut EmbeddingMatrix,
    dev: &[EncodedDocument],
    log: &mut TrainLog,
    mut run_epoch: F,
) -> Result<(ModelParams, EmbeddingMatrix)>
where
    F: FnMut(usize, &mut LoopState, &mut EmbeddingMatrix) -> Result<(Scalar, Scalar)>,
{
    let mut best: Option<(Scalar, ModelParams, EmbeddingMatrix)> = None;
    let mut since_best = 0usize;
    for epoch in 1..=config.max_epochs {
        let (js, jp) = run_epoch(epoch, state, embeddings)?;
        let (dev_satire, dev_publication) =
            dev_prfs(&state.params, dev, embeddings, config.dims.publications)?;
        log.records.push(EvalRecord {
            epoch,
            step: state.step,
            dev_satire,
            dev_publication,
            mean_satire_loss: js,
            mean_publication_loss: jp,
        });
        let improved = match &best {
            None => true,
            Some((f1, _, _)) => dev_satire.f1 > *f1,
        };
        if improved {
            best = Some((dev_satire.f1, state.params.clone(), embeddings.clone()));
            log.best_index = Some(log.records.len() - 1);
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                break;
            }
        }
    }
    let (_, params, emb) = best.expect("max_epochs >= 1 guarantees one evaluation");
    Ok((params, emb))
}

/// Alternating-minibatch adversarial training. Odd steps are satire steps
/// (satire head + shared features on the satire gradient); even steps are
/// publication steps (publication head on its own gradient, shared
/// features on the reversed, lambda-scaled publication gradient). The two
/// step kinds draw from independently shuffled passes over the training
/// set, and each parameter group has its own Adam state.
pub fn train_adversarial(
    train: &[EncodedDocument],
    dev: &[EncodedDocument],
    embeddings: &EmbeddingMatrix,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if train.is_empty() || dev.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut state = LoopState::new(config);
    let mut emb = embeddings.clone();
    let mut log = TrainLog::default();
    let lambda = config.lambda;
    let (params, emb) = training_loop(
        config,
        &mut state,
        &mut emb,
        dev,
        &mut log,
        |epoch, state, emb| {
            let satire_order =
                shuffled_indices(train.len(), config.seed, &format!("shuffle:satire:{epoch}"));
            let pub_order = shuffled_indices(
                train.len(),
                config.seed,
                &format!("shuffle:publication:{epoch}"),
            );
            let mut js_sum = 0.0;
            let mut jp_sum = 0.0;
            let mut batches = 0usize;
            for (sat_ix, pub_ix) in satire_order
                .chunks(config.batch_size)
                .zip(pub_order.chunks(config.batch_size))
            {
                // Satire step.
                let sat_docs = gather(train, sat_ix);
                let out = batch_loss(
                    &state.params.extractor,
                    &state.params.satire,
                    &sat_docs,
                    emb,
                    Task::Satire,
                    config.fine_tune_embeddings,
                )?;
                check_finite(out.mean_loss, state.step)?;
                js_sum += out.mean_loss;
                let step = state.step;
                adam_step(&mut state.params.satire, &out.head, &mut state.opt_satire)
                    .map_err(|_| Error::Diverged { step })?;
                adam_step(&mut state.params.extractor, &out.extractor, &mut state.opt_extractor)
                    .map_err(|_| Error::Diverged { step })?;
                if config.fine_tune_embeddings {
                    apply_embedding_sgd(
                        emb,
                        &out.embedding_grads,
                        config.lr,
                        config.decay,
                        &mut state.emb_step,
                        1.0,
                    );
                }
                state.step += 1;

                // Publication step.
                let pub_docs = gather(train, pub_ix);
                let out = batch_loss(
                    &state.params.extractor,
                    &state.params.publication,
                    &pub_docs,
                    emb,
                    Task::Publication,
                    config.fine_tune_embeddings,
                )?;
                check_finite(out.mean_loss, state.step)?;
                jp_sum += out.mean_loss;
                let step = state.step;
                adam_step(
                    &mut state.params.publication,
                    &out.head,
                    &mut state.opt_publication,
                )
                .map_err(|_| Error::Diverged { step })?;
                let reversed = adversarial_feature_grad(
                    &state.params.extractor.zeros_like(),
                    &out.extractor,
                    lambda,
                );
                adam_step(&mut state.params.extractor, &reversed, &mut state.opt_extractor)
                    .map_err(|_| Error::Diverged { step })?;
                if config.fine_tune_embeddings {
                    apply_embedding_sgd(
                        emb,
                        &out.embedding_grads,
                        config.lr,
                        config.decay,
                        &mut state.emb_step,
                        -lambda,
                    );
                }
                state.step += 1;
                batches += 1;
            }
            let n = batches.max(1) as Scalar;
            Ok((js_sum / n, jp_sum / n))
        },
    )?;
    Ok(TrainOutcome { params, embeddings: emb, log })
}

/// Frozen-feature publication probe: pooled feature vectors are computed
/// once under the fixed extractor, then a fresh publication head is trained
/// on them with early stopping on dev publication weighted F1. The
/// extractor and embeddings are never modified.
pub fn train_probe(
    extractor: &FeatureExtractorParams,
    train: &[EncodedDocument],
    dev: &[EncodedDocument],
    embeddings: &EmbeddingMatrix,
    config: &TrainConfig,
    log: &mut TrainLog,
    start_step: u64,
) -> Result<HeadParams> {
    config.validate()?;
    let features = |docs: &[EncodedDocument]| -> Result<Vec<Vec<Scalar>>> {
        docs.iter()
            .map(|d| extract_features(extractor, d, embeddings).map(|(m, _, _)| m))
            .collect()
    };
    let train_feats = features(train)?;
    let dev_feats = features(dev)?;
    let classes = config.dims.publications;

    let mut init_rng = rng::stream(config.seed, "probe-init");
    let mut head = HeadParams::init(classes, config.dims.state_size(), &mut init_rng);
    let mut opt = AdamState::new(&head, config.lr, config.decay);
    let mut step = start_step;
    let epoch_offset = log.records.last().map(|r| r.epoch).unwrap_or(0);
    let frozen_satire = log
        .records
        .last()
        .map(|r| r.dev_satire)
        .unwrap_or(Prf { precision: 0.0, recall: 0.0, f1: 0.0 });

    let mut best: Option<(Scalar, HeadParams)> = None;
    let mut best_probe_index = None;
    let mut since_best = 0usize;
    for epoch in 1..=config.max_epochs {
        let order =
            shuffled_indices(train.len(), config.seed, &format!("shuffle:probe:{epoch}"));
        let mut jp_sum = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let scale = 1.0 / chunk.len() as Scalar;
            let mut grad = head.zeros_like();
            let mut total = 0.0;
            for &i in chunk {
                let m = &train_feats[i];
                let logits = linear_forward(&head.w, head.b.as_slice(), m)?;
                let (loss, p) = softmax_xent_forward(&logits, train[i].publication);
                total += loss;
                let dlogits = softmax_xent_backward(&p, train[i].publication);
                let lin = linear_backward(&head.w, m, &dlogits)?;
                grad.axpy(
                    scale,
                    &HeadParams {
                        w: lin.dw,
                        b: crate::linalg::Matrix::from_vec(lin.db.len(), 1, lin.db),
                    },
                );
            }
            check_finite(total * scale, step)?;
            jp_sum += total * scale;
            adam_step(&mut head, &grad, &mut opt).map_err(|_| Error::Diverged { step })?;
            step += 1;
            batches += 1;
        }
        // Dev publication metrics under the probe.
        let names: Vec<String> = (0..classes).map(|i| i.to_string()).collect();
        let mut conf = ConfusionCounts::new(classes, names);
        for (doc, m) in dev.iter().zip(&dev_feats) {
            let logits = linear_forward(&head.w, head.b.as_slice(), m)?;
            conf.record(doc.publication, argmax(&logits));
        }
        let dev_publication = weighted_macro_prf(&conf);
        log.records.push(EvalRecord {
            epoch: epoch_offset + epoch,
            step,
            dev_satire: frozen_satire,
            dev_publication,
            mean_satire_loss: 0.0,
            mean_publication_loss: jp_sum / batches.max(1) as Scalar,
        });
        let improved = match &best {
            None => true,
            Some((f1, _)) => dev_publication.f1 > *f1,
        };
        if improved {
            best = Some((dev_publication.f1, head.clone()));
            best_probe_index = Some(log.records.len() - 1);
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                break;
            }
        }
    }
    let _ = best_probe_index;
    Ok(best.expect("max_epochs >= 1").1)
}

/// No-adversary baseline: phase 1 trains the extractor and satire head on
/// the satire loss alone (publication steps never happen, so with a shared
/// seed its shared-feature trajectory matches adversarial training at
/// lambda = 0); phase 2 freezes the extractor and trains the publication
/// head as a probe.
pub fn train_baseline(
    train: &[EncodedDocument],
    dev: &[EncodedDocument],
    embeddings: &EmbeddingMatrix,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if train.is_empty() || dev.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut state = LoopState::new(config);
    let mut emb = embeddings.clone();
    let mut log = TrainLog::default();
    let (mut params, emb) = training_loop(
        config,
        &mut state,
        &mut emb,
        dev,
        &mut log,
        |epoch, state, emb| {
            let order =
                shuffled_indices(train.len(), config.seed, &format!("shuffle:satire:{epoch}"));
            let mut js_sum = 0.0;
            let mut batches = 0usize;
            for chunk in order.chunks(config.batch_size) {
                let docs = gather(train, chunk);
                let out = batch_loss(
                    &state.params.extractor,
                    &state.params.satire,
                    &docs,
                    emb,
                    Task::Satire,
                    config.fine_tune_embeddings,
                )?;
                check_finite(out.mean_loss, state.step)?;
                js_sum += out.mean_loss;
                let step = state.step;
                adam_step(&mut state.params.satire, &out.head, &mut state.opt_satire)
                    .map_err(|_| Error::Diverged { step })?;
                adam_step(&mut state.params.extractor, &out.extractor, &mut state.opt_extractor)
                    .map_err(|_| Error::Diverged { step })?;
                if config.fine_tune_embeddings {
                    apply_embedding_sgd(
                        emb,
                        &out.embedding_grads,
                        config.lr,
                        config.decay,
                        &mut state.emb_step,
                        1.0,
                    );
                }
                state.step += 1;
                batches += 1;
            }
            Ok((js_sum / batches.max(1) as Scalar, 0.0))
        },
    )?;
    let last_step = log.records.last().map(|r| r.step).unwrap_or(0);
    params.publication = train_probe(
        &params.extractor,
        train,
        dev,
        &emb,
        config,
        &mut log,
        last_step,
    )?;
    Ok(TrainOutcome { params, embeddings: emb, log })
}

pub fn train(
    train_docs: &[EncodedDocument],
    dev: &[EncodedDocument],
    embeddings: &EmbeddingMatrix,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    match config.mode {
        TrainMode::Adversarial => train_adversarial(train_docs, dev, embeddings, config),
        TrainMode::Baseline => train_baseline(train_docs, dev, embeddings, config),
    }
}

/// One sweep entry: the trained model for one lambda and its dev metrics.
pub struct SweepRow {
    pub lambda: Scalar,
    pub outcome: TrainOutcome,
    pub dev_report: MetricsReport,
}

pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Row with the best dev satire F1; ties go to the smaller lambda.
    pub best_index: usize,
}

impl SweepResult {
    pub fn best(&self) -> &SweepRow {
        &self.rows[self.best_index]
    }

    /// Rows whose dev satire F1 trails the best by more than the given
    /// margin, in sweep order.
    pub fn degraded_indices(&self, margin: f64) -> Vec<usize> {
        let best_f1 = self.best().dev_report.satire.f1;
        (0..self.rows.len())
            .filter(|&i| best_f1 - self.rows[i].dev_report.satire.f1 > margin)
            .collect()
    }
}

/// Train one adversarial model per lambda under the same base config and
/// seed, and mark the one with the best dev satire F1.
pub fn sweep_lambda(
    train_docs: &[EncodedDocument],
    dev: &[EncodedDocument],
    embeddings: &EmbeddingMatrix,
    base: &TrainConfig,
    lambdas: &[Scalar],
) -> Result<SweepResult> {
    if lambdas.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one lambda".into()));
    }
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let config = TrainConfig { lambda, mode: TrainMode::Adversarial, ..base.clone() };
        let outcome = train_adversarial(train_docs, dev, embeddings, &config)?;
        let names: Vec<String> = (0..base.dims.publications).map(|i| i.to_string()).collect();
        let dev_report = evaluate_model(&outcome.params, dev, &outcome.embeddings, &names)?;
        rows.push(SweepRow { lambda, outcome, dev_report });
    }
    let mut best_index = 0;
    for i in 1..rows.len() {
        if rows[i].dev_report.satire.f1 > rows[best_index].dev_report.satire.f1 {
            best_index = i;
        }
    }
    Ok(SweepResult { rows, best_index })
}

/// Dev results table for a sweep, with the selected row marked and a note
/// about satire-F1 degradation (used to gate the collapse analysis).
pub fn render_sweep_report(result: &SweepResult, degradation_margin: f64) -> String {
    use std::fmt::Write as _;
    let labels: Vec<String> = result
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let marker = if i == result.best_index { " *best*" } else { "" };
            format!("adv lambda={}{}", r.lambda, marker)
        })
        .collect();
    let mut out = crate::metrics::render_results_table(
        labels
            .iter()
            .map(|l| l.as_str())
            .zip(result.rows.iter().map(|r| &r.dev_report)),
    );
    let degraded = result.degraded_indices(degradation_margin);
    if degraded.is_empty() {
        writeln!(
            out,
            "note: no swept lambda degrades dev satire F1 by more than {degradation_margin} \
             from the best; collapse analysis is vacuous for this sweep."
        )
        .unwrap();
    } else {
        for i in degraded {
            let row = &result.rows[i];
            writeln!(
                out,
                "note: lambda={} degrades dev satire F1 by more than {degradation_margin} \
                 (modal publication prediction share {:.3}).",
                row.lambda, row.dev_report.publication_histogram.modal_share
            )
            .unwrap();
        }
    }
    out
}

/// Constant predictor: the modal satire class and modal publication class
/// of the training split. Publication ties resolve to the smaller class
/// index, i.e. the lexicographically smaller name under sorted publication
/// tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityBaseline {
    pub satire_class: usize,
    pub publication_class: usize,
}

pub fn majority_baseline(train: &[EncodedDocument], publications: usize) -> Result<MajorityBaseline> {
    if train.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut sat = [0u64; 2];
    let mut pubs = vec![0u64; publications];
    for d in train {
        sat[d.satire] += 1;
        pubs[d.publication] += 1;
    }
    let modal = |counts: &[u64]| {
        (0..counts.len())
            .max_by(|&a, &b| counts[a].cmp(&counts[b]).then(b.cmp(&a)))
            .unwrap()
    };
    Ok(MajorityBaseline {
        satire_class: modal(&sat),
        publication_class: modal(&pubs),
    })
}

pub fn evaluate_majority(
    baseline: MajorityBaseline,
    docs: &[EncodedDocument],
    publication_names: &[String],
) -> Result<MetricsReport> {
    let mut sat_conf = ConfusionCounts::new(2, satire_class_names());
    let mut pub_conf = ConfusionCounts::new(publication_names.len(), publication_names.to_vec());
    let mut pub_preds = Vec::with_capacity(docs.len());
    for doc in docs {
        sat_conf.record(doc.satire, baseline.satire_class);
        pub_conf.record(doc.publication, baseline.publication_class);
        pub_preds.push(baseline.publication_class);
    }
    build_report(&sat_conf, &pub_conf, &pub_preds)
}
