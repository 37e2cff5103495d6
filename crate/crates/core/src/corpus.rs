//! Corpus handling: JSONL ingestion, tokenization, vocabulary construction,
//! document encoding, stratified splitting and corpus statistics.
//!
//! Tokenization is whitespace splitting followed by peeling leading and
//! trailing punctuation into their own tokens; case is preserved. Inner
//! punctuation (hyphenated compounds, abbreviations) stays attached.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub const PAD_TOKEN: &str = "<PAD>";
pub const UNK_TOKEN: &str = "<UNK>";
pub const PAD_INDEX: usize = 0;
pub const UNK_INDEX: usize = 1;

/// One news document with its distant labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub id: String,
    pub title: Vec<String>,
    pub body: Vec<String>,
    pub publication: String,
    pub satire: bool,
}

impl Article {
    fn validate(&self) -> Result<()> {
        if self.publication.is_empty() {
            return Err(Error::InvalidArticle {
                id: self.id.clone(),
                message: "empty publication".into(),
            });
        }
        if self.title.is_empty() && self.body.is_empty() {
            return Err(Error::InvalidArticle {
                id: self.id.clone(),
                message: "both title and body are empty".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    id: String,
    title: String,
    text: String,
    publication: String,
    satire: bool,
}

/// Whitespace split, then peel leading/trailing punctuation into separate
/// tokens. Deterministic; preserves case.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let chars: Vec<char> = word.chars().collect();
        let mut lo = 0;
        let mut hi = chars.len();
        while lo < hi && !chars[lo].is_alphanumeric() {
            out.push(chars[lo].to_string());
            lo += 1;
        }
        let mut tail = Vec::new();
        while hi > lo && !chars[hi - 1].is_alphanumeric() {
            tail.push(chars[hi - 1].to_string());
            hi -= 1;
        }
        if lo < hi {
            out.push(chars[lo..hi].iter().collect());
        }
        out.extend(tail.into_iter().rev());
    }
    out
}

/// Load a JSONL corpus: one object per line with keys
/// `id`, `title`, `text`, `publication`, `satire`.
pub fn load_corpus(path: &Path) -> Result<Vec<Article>> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut articles = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        if !seen.insert(raw.id.clone()) {
            return Err(Error::DuplicateId(raw.id));
        }
        let article = Article {
            id: raw.id,
            title: tokenize(&raw.title),
            body: tokenize(&raw.text),
            publication: raw.publication,
            satire: raw.satire,
        };
        article.validate()?;
        articles.push(article);
    }
    Ok(articles)
}

pub fn save_corpus(articles: &[Article], path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for a in articles {
        let raw = RawRecord {
            id: a.id.clone(),
            title: a.title.join(" "),
            text: a.body.join(" "),
            publication: a.publication.clone(),
            satire: a.satire,
        };
        serde_json::to_writer(&mut file, &raw)?;
        file.write_all(b"\n")?;
    }
    Ok(())
}

/// Token <-> index mapping with reserved `<PAD>` (0) and `<UNK>` (1).
/// Non-reserved indices are assigned by descending count, ties broken
/// lexicographically.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    index_of: HashMap<String, usize>,
    tokens: Vec<String>,
    counts: Vec<u64>,
    pub min_count: u64,
}

impl Vocabulary {
    pub fn build(articles: &[Article], min_count: u64) -> Result<Self> {
        if articles.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        assert!(min_count >= 1, "min_count must be >= 1");
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for a in articles {
            for tok in a.title.iter().chain(&a.body) {
                *counts.entry(tok).or_insert(0) += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count)
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        let mut tokens = vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()];
        let mut count_vec = vec![0u64, 0u64];
        for (tok, c) in kept {
            tokens.push(tok.to_string());
            count_vec.push(c);
        }
        let index_of = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            index_of,
            tokens,
            counts: count_vec,
            min_count,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn index(&self, token: &str) -> Option<usize> {
        self.index_of.get(token).copied()
    }

    /// Index of `token`, or `UNK_INDEX` for out-of-vocabulary tokens.
    pub fn index_or_unk(&self, token: &str) -> usize {
        self.index(token).unwrap_or(UNK_INDEX)
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    /// One `token<TAB>count` per line in index order; first two lines are
    /// the reserved entries.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        for (tok, c) in self.tokens.iter().zip(&self.counts) {
            writeln!(file, "{}\t{}", tok, c)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut tokens = Vec::new();
        let mut counts = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            let (tok, count) = line.split_once('\t').ok_or_else(|| {
                Error::VocabularyFormat(format!("line {}: missing tab separator", i + 1))
            })?;
            let count: u64 = count.parse().map_err(|_| {
                Error::VocabularyFormat(format!("line {}: bad count {:?}", i + 1, count))
            })?;
            tokens.push(tok.to_string());
            counts.push(count);
        }
        if tokens.len() < 2 || tokens[PAD_INDEX] != PAD_TOKEN || tokens[UNK_INDEX] != UNK_TOKEN {
            return Err(Error::VocabularyFormat(
                "first two entries must be <PAD> and <UNK>".into(),
            ));
        }
        let index_of = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            index_of,
            tokens,
            counts,
            min_count: 1,
        })
    }

    /// SHA-256 over the serialized vocabulary, for checkpoint manifests.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        for (tok, c) in self.tokens.iter().zip(&self.counts) {
            hasher.update(tok.as_bytes());
            hasher.update(b"\t");
            hasher.update(c.to_string().as_bytes());
            hasher.update(b"\n");
        }
        format!("{:x}", hasher.finalize())
    }
}

/// Publication name -> class index table, sorted by name.
#[derive(Debug, Clone)]
pub struct PublicationTable {
    names: Vec<String>,
    index_of: HashMap<String, usize>,
}

impl PublicationTable {
    pub fn build(articles: &[Article]) -> Self {
        let mut names: Vec<String> = articles
            .iter()
            .map(|a| a.publication.clone())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        names.sort();
        Self::from_names(names)
    }

    pub fn from_names(names: Vec<String>) -> Self {
        let index_of = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        PublicationTable { names, index_of }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.index_of.get(name).copied()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Index-encoded document: title tokens followed by body tokens, truncated
/// to `max_len`. No padding is stored; `true_len` is the usable prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedDocument {
    pub id: String,
    pub indices: Vec<usize>,
    pub true_len: usize,
    pub publication: usize,
    /// 0 = regular, 1 = satire.
    pub satire: usize,
}

pub fn encode(
    article: &Article,
    vocab: &Vocabulary,
    pubs: &PublicationTable,
    max_len: usize,
) -> Result<EncodedDocument> {
    assert!(max_len >= 1, "max_len must be >= 1");
    let mut indices: Vec<usize> = article
        .title
        .iter()
        .chain(&article.body)
        .map(|t| vocab.index_or_unk(t))
        .collect();
    if indices.is_empty() {
        return Err(Error::InvalidArticle {
            id: article.id.clone(),
            message: "no tokens to encode".into(),
        });
    }
    indices.truncate(max_len);
    let true_len = indices.len();
    let publication = pubs.index(&article.publication).ok_or_else(|| {
        Error::InvalidArticle {
            id: article.id.clone(),
            message: format!("unknown publication {:?}", article.publication),
        }
    })?;
    Ok(EncodedDocument {
        id: article.id.clone(),
        indices,
        true_len,
        publication,
        satire: article.satire as usize,
    })
}

/// Split fractions plus the seed of the stratified shuffle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, dev: f64, test: f64, seed: u64) -> Result<Self> {
        if train <= 0.0 || dev <= 0.0 || test <= 0.0 {
            return Err(Error::InvalidConfig("split fractions must be positive".into()));
        }
        if (train + dev + test - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig("split fractions must sum to 1".into()));
        }
        Ok(SplitSpec { train, dev, test, seed })
    }
}

/// Largest-remainder apportionment of `n` into three buckets; ties favor
/// the earlier bucket (train, dev, test). Train is kept nonempty.
fn apportion(n: usize, fractions: [f64; 3]) -> [usize; 3] {
    let mut counts = [0usize; 3];
    let mut remainders = [0f64; 3];
    let mut assigned = 0;
    for i in 0..3 {
        let exact = n as f64 * fractions[i];
        counts[i] = exact.floor() as usize;
        remainders[i] = exact - exact.floor();
        assigned += counts[i];
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| remainders[b].partial_cmp(&remainders[a]).unwrap().then(a.cmp(&b)));
    let mut leftover = n - assigned;
    for &i in &order {
        if leftover == 0 {
            break;
        }
        counts[i] += 1;
        leftover -= 1;
    }
    if counts[0] == 0 && n > 0 {
        let donor = if counts[1] >= counts[2] { 1 } else { 2 };
        counts[donor] -= 1;
        counts[0] += 1;
    }
    counts
}

/// Per-publication stratified shuffle split. Deterministic for a fixed seed.
pub fn split(
    articles: &[Article],
    spec: &SplitSpec,
) -> (Vec<Article>, Vec<Article>, Vec<Article>) {
    let mut groups: BTreeMap<&str, Vec<&Article>> = BTreeMap::new();
    for a in articles {
        groups.entry(&a.publication).or_default().push(a);
    }
    let mut train = Vec::new();
    let mut dev = Vec::new();
    let mut test = Vec::new();
    for (publication, mut group) in groups {
        let mut rng = rng::stream(spec.seed, &format!("split:{publication}"));
        group.shuffle(&mut rng);
        let [nt, nd, _] = apportion(group.len(), [spec.train, spec.dev, spec.test]);
        for (i, a) in group.into_iter().enumerate() {
            if i < nt {
                train.push(a.clone());
            } else if i < nt + nd {
                dev.push(a.clone());
            } else {
                test.push(a.clone());
            }
        }
    }
    (train, dev, test)
}

/// One row of the corpus statistics table. Lengths are in words; article
/// length counts body tokens, titles are reported separately.
#[derive(Debug, Clone, Serialize)]
pub struct StatsRow {
    pub publication: String,
    pub label: String,
    pub articles: usize,
    pub mean_article_len: f64,
    pub mean_sentence_len: f64,
    pub mean_title_len: f64,
}

fn sentence_lengths(body: &[String]) -> Vec<usize> {
    let mut lengths = Vec::new();
    let mut current = 0usize;
    for tok in body {
        if tok == "." || tok == "!" || tok == "?" {
            if current > 0 {
                lengths.push(current);
                current = 0;
            }
        } else {
            current += 1;
        }
    }
    if current > 0 {
        lengths.push(current);
    }
    lengths
}

fn stats_over<'a>(publication: &str, label: &str, group: &[&'a Article]) -> StatsRow {
    let n = group.len();
    let total_body: usize = group.iter().map(|a| a.body.len()).sum();
    let total_title: usize = group.iter().map(|a| a.title.len()).sum();
    let mut sent_total = 0usize;
    let mut sent_count = 0usize;
    for a in group {
        for len in sentence_lengths(&a.body) {
            sent_total += len;
            sent_count += 1;
        }
    }
    let div = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    StatsRow {
        publication: publication.to_string(),
        label: label.to_string(),
        articles: n,
        mean_article_len: div(total_body, n),
        mean_sentence_len: div(sent_total, sent_count),
        mean_title_len: div(total_title, n),
    }
}

/// Per-publication rows plus Regular/Satire aggregate rows.
pub fn corpus_stats(articles: &[Article]) -> Vec<StatsRow> {
    let mut groups: BTreeMap<&str, Vec<&Article>> = BTreeMap::new();
    for a in articles {
        groups.entry(&a.publication).or_default().push(a);
    }
    let mut rows = Vec::new();
    for (publication, group) in &groups {
        let label = if group[0].satire { "Satire" } else { "Regular" };
        rows.push(stats_over(publication, label, group));
    }
    for (label, satire) in [("Regular", false), ("Satire", true)] {
        let pooled: Vec<&Article> = articles.iter().filter(|a| a.satire == satire).collect();
        if !pooled.is_empty() {
            rows.push(stats_over(label, label, &pooled));
        }
    }
    rows
}

/// CSV mirroring the statistics table columns.
pub fn write_stats_csv<W: Write>(rows: &[StatsRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "label,publication,articles,avg_article_words,avg_sentence_words,avg_title_words"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.2},{:.2},{:.2}",
            r.label, r.publication, r.articles, r.mean_article_len, r.mean_sentence_len,
            r.mean_title_len
        )?;
    }
    Ok(())
}
