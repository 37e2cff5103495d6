//! Command-line entry point: corpus statistics, embedding pretraining,
//! baseline/adversarial training, lambda sweeps, evaluation, attention
//! reports, and synthetic-corpus generation. Exit codes: 0 success, 1 usage
//! error, 2 runtime error.

use std::collections::HashSet;
use std::io::{BufRead, Write as _};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use satire_debias::attnreport::{
    extract_attention, render_heatmap, AttentionMap, HeatmapFormat,
};
use satire_debias::checkpoint::{self, load_checkpoint, save_checkpoint, Checkpoint};
use satire_debias::corpus::{
    corpus_stats, encode, load_corpus, save_corpus, split, write_stats_csv, Article,
    EncodedDocument, PublicationTable, SplitSpec, Vocabulary,
};
use satire_debias::embeddings::{
    load_embeddings, save_embeddings, sgns_train, SgnsConfig,
};
use satire_debias::error::Error;
use satire_debias::manifest::RunManifest;
use satire_debias::metrics::render_results_table;
use satire_debias::model::{ModelDims, ModelParams};
use satire_debias::synthgen::{describe, generate, SynthSpec};
use satire_debias::trainer::{
    evaluate_majority, evaluate_model, majority_baseline, render_sweep_report, sweep_lambda,
    train as run_training, TrainConfig, TrainMode,
};

#[derive(Parser)]
#[command(
    name = "satire-debias",
    version,
    about = "Satire classification with an adversarial publication branch"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Adversarial,
    Baseline,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitArg {
    Train,
    Dev,
    Test,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Html,
    Ansi,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with planted publication markers and
    /// satire cues.
    Synth {
        /// Fixture name; "A" is 4 publications (2 satire), 200 articles
        /// each, cue rates 0.9.
        #[arg(long, default_value = "A")]
        fixture: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Corpus statistics per publication plus pooled regular/satire rows.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Pretrain word embeddings with skip-gram negative sampling on the
    /// training split.
    Pretrain {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 300)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        window: usize,
        #[arg(long, default_value_t = 5)]
        negatives: usize,
        #[arg(long, default_value_t = 5)]
        epochs: usize,
        #[arg(long, default_value_t = 0.025)]
        lr: f64,
        #[arg(long, default_value_t = 2)]
        min_count: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train the classifier, either the no-adversary baseline or the
    /// adversarial model.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long, value_enum, default_value = "adversarial")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 300)]
        hidden: usize,
        #[arg(long, default_value_t = 600)]
        attention: usize,
        #[arg(long, default_value_t = 1e-4)]
        lr: f64,
        #[arg(long, default_value_t = 1e-6)]
        decay: f64,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        #[arg(long, default_value_t = 500)]
        max_len: usize,
        #[arg(long, default_value_t = 100)]
        max_epochs: usize,
        #[arg(long, default_value_t = 5)]
        patience: usize,
        #[arg(long, default_value_t = 2)]
        min_count: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = false)]
        fine_tune_embeddings: bool,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train one adversarial model per lambda and report dev metrics.
    Sweep {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        /// Comma-separated lambda values.
        #[arg(long, default_value = "0.2,0.3,0.5,0.7")]
        lambdas: String,
        #[arg(long, default_value_t = 300)]
        hidden: usize,
        #[arg(long, default_value_t = 600)]
        attention: usize,
        #[arg(long, default_value_t = 1e-4)]
        lr: f64,
        #[arg(long, default_value_t = 1e-6)]
        decay: f64,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        #[arg(long, default_value_t = 500)]
        max_len: usize,
        #[arg(long, default_value_t = 100)]
        max_epochs: usize,
        #[arg(long, default_value_t = 5)]
        patience: usize,
        #[arg(long, default_value_t = 2)]
        min_count: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Evaluate a checkpoint (or the majority baseline) on a split.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        /// Checkpoint path prefix (without .json/.bin).
        #[arg(long, required_unless_present = "majority")]
        checkpoint: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "test")]
        split: SplitArg,
        /// Evaluate the constant majority predictor instead of a model.
        #[arg(long, default_value_t = false)]
        majority: bool,
        /// Split/vocabulary seed (majority mode only; models use the seed
        /// recorded in their checkpoint).
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        min_count: u64,
        #[arg(long, default_value_t = 500)]
        max_len: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Export attention heatmaps for chosen documents under one or more
    /// checkpoints.
    Attend {
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated checkpoint path prefixes.
        #[arg(long)]
        checkpoints: String,
        /// Comma-separated article ids.
        #[arg(long)]
        ids: String,
        #[arg(long, value_enum, default_value = "html")]
        format: FormatArg,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

enum RunError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(msg) => RunError::Usage(msg),
            other => RunError::Runtime(other),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successful exits.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => {}
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(RunError::Runtime(e)) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

/// Corpus loaded, split 80/10/10 per publication, vocabulary built on the
/// training split, and every split encoded.
struct Prepared {
    articles: Vec<Article>,
    pubs: PublicationTable,
    vocab: Vocabulary,
    train: Vec<EncodedDocument>,
    dev: Vec<EncodedDocument>,
    test: Vec<EncodedDocument>,
}

fn prepare(
    corpus_path: &Path,
    seed: u64,
    min_count: u64,
    max_len: usize,
) -> Result<Prepared, RunError> {
    let articles = load_corpus(corpus_path)?;
    let spec = SplitSpec::new(0.8, 0.1, 0.1, seed)?;
    let (train_a, dev_a, test_a) = split(&articles, &spec);
    let vocab = Vocabulary::build(&train_a, min_count)?;
    let pubs = PublicationTable::build(&articles);
    let enc = |arts: &[Article]| -> Result<Vec<EncodedDocument>, Error> {
        arts.iter().map(|a| encode(a, &vocab, &pubs, max_len)).collect()
    };
    let train = enc(&train_a)?;
    let dev = enc(&dev_a)?;
    let test = enc(&test_a)?;
    Ok(Prepared { pubs, train, dev, test, vocab, articles })
}

fn ensure_out_dir(out_dir: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(out_dir).map_err(|e| RunError::Runtime(Error::Io(e)))?;
    Ok(())
}

fn read_embedding_dim(path: &Path) -> Result<usize, Error> {
    let file = std::fs::File::open(path)?;
    let mut first = String::new();
    std::io::BufReader::new(file).read_line(&mut first)?;
    let dim = first
        .split_whitespace()
        .nth(1)
        .and_then(|d| d.parse::<usize>().ok())
        .ok_or(Error::EmbeddingFormat(
            "missing vocab-size/dimension header".into(),
        ))?;
    Ok(dim)
}

fn parse_lambdas(text: &str) -> Result<Vec<f64>, RunError> {
    let lambdas: Result<Vec<f64>, _> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect();
    let lambdas =
        lambdas.map_err(|_| RunError::Usage(format!("cannot parse lambda list {text:?}")))?;
    if lambdas.is_empty() {
        return Err(RunError::Usage("need at least one lambda".into()));
    }
    if lambdas.iter().any(|&l| l < 0.0) {
        return Err(RunError::Usage("lambda must be >= 0".into()));
    }
    Ok(lambdas)
}

/// Configuration envelope stored inside checkpoints so evaluation can
/// reconstruct the exact split, vocabulary, and encoding.
fn config_envelope(config: &TrainConfig, min_count: u64) -> serde_json::Value {
    serde_json::json!({ "train": config, "min_count": min_count })
}

fn write_text(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|e| RunError::Runtime(Error::Io(e)))?;
    Ok(())
}

fn dispatch(command: Command) -> Result<(), RunError> {
    match command {
        Command::Synth { fixture, seed, out_dir } => cmd_synth(&fixture, seed, &out_dir),
        Command::Stats { corpus, out_dir } => cmd_stats(&corpus, &out_dir),
        Command::Pretrain {
            corpus,
            dim,
            window,
            negatives,
            epochs,
            lr,
            min_count,
            seed,
            out_dir,
        } => cmd_pretrain(
            &corpus,
            SgnsConfig { dim, window, negatives, epochs, lr, seed },
            min_count,
            &out_dir,
        ),
        Command::Train {
            corpus,
            embeddings,
            mode,
            lambda,
            hidden,
            attention,
            lr,
            decay,
            batch_size,
            max_len,
            max_epochs,
            patience,
            min_count,
            seed,
            fine_tune_embeddings,
            threads,
            out_dir,
        } => {
            if threads != 1 {
                return Err(RunError::Usage(
                    "only --threads 1 (the deterministic path) is supported".into(),
                ));
            }
            let mode = match mode {
                ModeArg::Adversarial => TrainMode::Adversarial,
                ModeArg::Baseline => TrainMode::Baseline,
            };
            let partial = TrainConfig {
                lambda,
                lr,
                decay,
                batch_size,
                max_len,
                max_epochs,
                patience,
                seed,
                fine_tune_embeddings,
                ..TrainConfig::defaults(
                    ModelDims { embedding: 0, hidden, attention, publications: 0 },
                    mode,
                    seed,
                )
            };
            cmd_train(&corpus, &embeddings, partial, min_count, &out_dir)
        }
        Command::Sweep {
            corpus,
            embeddings,
            lambdas,
            hidden,
            attention,
            lr,
            decay,
            batch_size,
            max_len,
            max_epochs,
            patience,
            min_count,
            seed,
            out_dir,
        } => {
            let lambdas = parse_lambdas(&lambdas)?;
            let partial = TrainConfig {
                lr,
                decay,
                batch_size,
                max_len,
                max_epochs,
                patience,
                seed,
                ..TrainConfig::defaults(
                    ModelDims { embedding: 0, hidden, attention, publications: 0 },
                    TrainMode::Adversarial,
                    seed,
                )
            };
            cmd_sweep(&corpus, &embeddings, partial, &lambdas, min_count, &out_dir)
        }
        Command::Eval {
            corpus,
            checkpoint,
            split,
            majority,
            seed,
            min_count,
            max_len,
            out_dir,
        } => cmd_eval(&corpus, checkpoint.as_deref(), split, majority, seed, min_count, max_len, &out_dir),
        Command::Attend { corpus, checkpoints, ids, format, out_dir } => {
            cmd_attend(&corpus, &checkpoints, &ids, format, &out_dir)
        }
    }
}

fn cmd_synth(fixture: &str, seed: u64, out_dir: &Path) -> Result<(), RunError> {
    let spec = match fixture {
        "A" | "a" => SynthSpec::fixture_a(seed),
        other => return Err(RunError::Usage(format!("unknown fixture {other:?}"))),
    };
    ensure_out_dir(out_dir)?;
    let articles = generate(&spec)?;
    let cues = describe(&spec)?;
    let corpus_path = out_dir.join("corpus.jsonl");
    save_corpus(&articles, &corpus_path)?;
    write_text(
        &out_dir.join("cues.json"),
        &serde_json::to_string_pretty(&cues).map_err(Error::Json)?,
    )?;
    let manifest = RunManifest::new(
        "synth",
        seed,
        serde_json::to_value(&spec).map_err(Error::Json)?,
    );
    manifest.write(out_dir)?;
    println!(
        "wrote {} articles to {}",
        articles.len(),
        corpus_path.display()
    );
    Ok(())
}

fn cmd_stats(corpus: &Path, out_dir: &Path) -> Result<(), RunError> {
    ensure_out_dir(out_dir)?;
    let articles = load_corpus(corpus)?;
    let rows = corpus_stats(&articles);
    let mut csv = Vec::new();
    write_stats_csv(&rows, &mut csv)?;
    let csv = String::from_utf8(csv).expect("stats are UTF-8");
    write_text(&out_dir.join("stats.csv"), &csv)?;
    print!("{csv}");
    let mut manifest = RunManifest::new("stats", 0, serde_json::json!({}));
    manifest.add_input(corpus)?;
    manifest.write(out_dir)?;
    Ok(())
}

fn cmd_pretrain(
    corpus: &Path,
    config: SgnsConfig,
    min_count: u64,
    out_dir: &Path,
) -> Result<(), RunError> {
    ensure_out_dir(out_dir)?;
    let prepared = prepare(corpus, config.seed, min_count, usize::MAX)?;
    let emb = sgns_train(&prepared.train, &prepared.vocab, &config)?;
    let emb_path = out_dir.join("embeddings.txt");
    save_embeddings(&emb, &prepared.vocab, &emb_path)?;
    prepared.vocab.save(&out_dir.join("vocab.txt"))?;
    let mut manifest = RunManifest::new(
        "pretrain",
        config.seed,
        serde_json::json!({ "sgns": config, "min_count": min_count }),
    );
    manifest.add_input(corpus)?;
    manifest.write(out_dir)?;
    println!(
        "wrote {} x {} embeddings to {}",
        emb.vocab_size(),
        emb.dim,
        emb_path.display()
    );
    Ok(())
}

fn cmd_train(
    corpus: &Path,
    embeddings_path: &Path,
    mut config: TrainConfig,
    min_count: u64,
    out_dir: &Path,
) -> Result<(), RunError> {
    // Reject invalid configurations before touching the filesystem.
    config.validate()?;
    ensure_out_dir(out_dir)?;
    let prepared = prepare(corpus, config.seed, min_count, config.max_len)?;
    let dim = read_embedding_dim(embeddings_path)?;
    let emb = load_embeddings(embeddings_path, &prepared.vocab, dim)?;
    config.dims.embedding = dim;
    config.dims.publications = prepared.pubs.len();

    let outcome = run_training(&prepared.train, &prepared.dev, &emb, &config)?;
    let envelope = config_envelope(&config, min_count);
    save_checkpoint(
        &out_dir.join("model"),
        &outcome.params,
        &outcome.embeddings,
        config.seed,
        envelope.clone(),
        &prepared.vocab.digest(),
        prepared.pubs.names(),
    )?;
    write_text(&out_dir.join("train_log.jsonl"), &outcome.log.to_jsonl())?;

    let dev_report = evaluate_model(
        &outcome.params,
        &prepared.dev,
        &outcome.embeddings,
        prepared.pubs.names(),
    )?;
    let table = render_results_table([("dev", &dev_report)]);
    write_text(&out_dir.join("dev_results.txt"), &table)?;
    print!("{table}");

    let mut manifest = RunManifest::new("train", config.seed, envelope);
    manifest.add_input(corpus)?;
    manifest.add_input(embeddings_path)?;
    manifest.write(out_dir)?;
    Ok(())
}

fn cmd_sweep(
    corpus: &Path,
    embeddings_path: &Path,
    mut base: TrainConfig,
    lambdas: &[f64],
    min_count: u64,
    out_dir: &Path,
) -> Result<(), RunError> {
    base.validate()?;
    ensure_out_dir(out_dir)?;
    let prepared = prepare(corpus, base.seed, min_count, base.max_len)?;
    let dim = read_embedding_dim(embeddings_path)?;
    let emb = load_embeddings(embeddings_path, &prepared.vocab, dim)?;
    base.dims.embedding = dim;
    base.dims.publications = prepared.pubs.len();

    let result = sweep_lambda(&prepared.train, &prepared.dev, &emb, &base, lambdas)?;
    for row in &result.rows {
        let config = TrainConfig { lambda: row.lambda, ..base.clone() };
        save_checkpoint(
            &out_dir.join(format!("model_lambda_{}", row.lambda)),
            &row.outcome.params,
            &row.outcome.embeddings,
            base.seed,
            config_envelope(&config, min_count),
            &prepared.vocab.digest(),
            prepared.pubs.names(),
        )?;
        write_text(
            &out_dir.join(format!("train_log_lambda_{}.jsonl", row.lambda)),
            &row.outcome.log.to_jsonl(),
        )?;
    }
    let report = render_sweep_report(&result, 0.1);
    write_text(&out_dir.join("sweep_report.txt"), &report)?;
    print!("{report}");

    let mut manifest = RunManifest::new(
        "sweep",
        base.seed,
        serde_json::json!({
            "base": base,
            "lambdas": lambdas,
            "min_count": min_count,
        }),
    );
    manifest.add_input(corpus)?;
    manifest.add_input(embeddings_path)?;
    manifest.write(out_dir)?;
    Ok(())
}

fn select_split<'a>(prepared: &'a Prepared, split: SplitArg) -> &'a [EncodedDocument] {
    match split {
        SplitArg::Train => &prepared.train,
        SplitArg::Dev => &prepared.dev,
        SplitArg::Test => &prepared.test,
    }
}

fn split_name(split: SplitArg) -> &'static str {
    match split {
        SplitArg::Train => "train",
        SplitArg::Dev => "dev",
        SplitArg::Test => "test",
    }
}

/// Reconstruct the data pipeline a checkpoint was trained with, verifying
/// the vocabulary digest recorded in its manifest.
fn prepare_for_checkpoint(corpus: &Path, ckpt: &Checkpoint) -> Result<Prepared, RunError> {
    let train_cfg: TrainConfig =
        serde_json::from_value(ckpt.manifest.config["train"].clone()).map_err(|_| {
            RunError::Runtime(Error::Checkpoint(
                "checkpoint manifest lacks a train config".into(),
            ))
        })?;
    let min_count = ckpt.manifest.config["min_count"].as_u64().ok_or_else(|| {
        RunError::Runtime(Error::Checkpoint("checkpoint manifest lacks min_count".into()))
    })?;
    let prepared = prepare(corpus, ckpt.manifest.seed, min_count, train_cfg.max_len)?;
    if prepared.vocab.digest() != ckpt.manifest.vocab_sha256 {
        return Err(RunError::Runtime(Error::Checkpoint(
            "corpus vocabulary does not match the checkpoint's vocabulary hash".into(),
        )));
    }
    if prepared.pubs.names() != ckpt.manifest.publications.as_slice() {
        return Err(RunError::Runtime(Error::Checkpoint(
            "corpus publications do not match the checkpoint".into(),
        )));
    }
    Ok(prepared)
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    corpus: &Path,
    checkpoint: Option<&Path>,
    split: SplitArg,
    majority: bool,
    seed: u64,
    min_count: u64,
    max_len: usize,
    out_dir: &Path,
) -> Result<(), RunError> {
    ensure_out_dir(out_dir)?;
    let (label, report, manifest_config) = if majority {
        let prepared = prepare(corpus, seed, min_count, max_len)?;
        let mb = majority_baseline(&prepared.train, prepared.pubs.len())?;
        let report = evaluate_majority(mb, select_split(&prepared, split), prepared.pubs.names())?;
        (
            "majority".to_string(),
            report,
            serde_json::json!({
                "majority": mb,
                "split": split_name(split),
                "min_count": min_count,
                "max_len": max_len,
            }),
        )
    } else {
        let prefix = checkpoint.expect("clap enforces --checkpoint unless --majority");
        let ckpt = load_checkpoint(prefix)?;
        let prepared = prepare_for_checkpoint(corpus, &ckpt)?;
        let report = evaluate_model(
            &ckpt.params,
            select_split(&prepared, split),
            &ckpt.embeddings,
            prepared.pubs.names(),
        )?;
        let label = prefix
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".into());
        (
            label,
            report,
            serde_json::json!({
                "checkpoint": prefix.display().to_string(),
                "split": split_name(split),
            }),
        )
    };
    write_text(
        &out_dir.join("metrics.json"),
        &serde_json::to_string_pretty(&report).map_err(Error::Json)?,
    )?;
    let table = render_results_table([(label.as_str(), &report)]);
    write_text(&out_dir.join("results.txt"), &table)?;
    print!("{table}");

    let mut manifest = RunManifest::new("eval", seed, manifest_config);
    manifest.add_input(corpus)?;
    if let Some(prefix) = checkpoint {
        manifest.add_input(&checkpoint::manifest_path(prefix))?;
        manifest.add_input(&checkpoint::blob_path(prefix))?;
    }
    manifest.write(out_dir)?;
    Ok(())
}

fn cmd_attend(
    corpus: &Path,
    checkpoints: &str,
    ids: &str,
    format: FormatArg,
    out_dir: &Path,
) -> Result<(), RunError> {
    ensure_out_dir(out_dir)?;
    let prefixes: Vec<PathBuf> = checkpoints
        .split(',')
        .map(|s| PathBuf::from(s.trim()))
        .collect();
    let wanted: Vec<String> = ids.split(',').map(|s| s.trim().to_string()).collect();
    if prefixes.is_empty() || wanted.is_empty() {
        return Err(RunError::Usage("need at least one checkpoint and one id".into()));
    }

    let mut maps: Vec<AttentionMap> = Vec::new();
    for prefix in &prefixes {
        let ckpt = load_checkpoint(prefix)?;
        let prepared = prepare_for_checkpoint(corpus, &ckpt)?;
        let train_cfg: TrainConfig =
            serde_json::from_value(ckpt.manifest.config["train"].clone())
                .expect("validated by prepare_for_checkpoint");
        let tag = prefix
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".into());
        let params: ModelParams = ckpt.params;
        for id in &wanted {
            let article = prepared
                .articles
                .iter()
                .find(|a| &a.id == id)
                .ok_or_else(|| {
                    RunError::Usage(format!("article id {id:?} not found in the corpus"))
                })?;
            let doc = encode(article, &prepared.vocab, &prepared.pubs, train_cfg.max_len)?;
            let tokens: Vec<String> = article
                .title
                .iter()
                .chain(&article.body)
                .take(doc.true_len)
                .cloned()
                .collect();
            maps.push(extract_attention(
                &params.extractor,
                &doc,
                &tokens,
                &ckpt.embeddings,
                &tag,
            )?);
        }
    }
    // Group maps per document so model variants sit side by side.
    let mut ordered: Vec<AttentionMap> = Vec::with_capacity(maps.len());
    let mut seen: HashSet<String> = HashSet::new();
    for id in &wanted {
        if !seen.insert(id.clone()) {
            continue;
        }
        ordered.extend(maps.iter().filter(|m| &m.id == id).cloned());
    }

    write_text(
        &out_dir.join("attention.json"),
        &serde_json::to_string_pretty(&ordered).map_err(Error::Json)?,
    )?;
    let (fmt, file) = match format {
        FormatArg::Html => (HeatmapFormat::Html, "attention.html"),
        FormatArg::Ansi => (HeatmapFormat::Ansi, "attention.txt"),
    };
    let rendered = render_heatmap(&ordered, fmt);
    write_text(&out_dir.join(file), &rendered)?;
    if fmt == HeatmapFormat::Ansi {
        let mut stdout = std::io::stdout();
        let _ = stdout.write_all(rendered.as_bytes());
    }

    let mut manifest = RunManifest::new(
        "attend",
        0,
        serde_json::json!({
            "checkpoints": prefixes.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "ids": wanted,
            "format": file,
        }),
    );
    manifest.add_input(corpus)?;
    for prefix in &prefixes {
        manifest.add_input(&checkpoint::manifest_path(prefix))?;
        manifest.add_input(&checkpoint::blob_path(prefix))?;
    }
    manifest.write(out_dir)?;
    Ok(())
}
