//! Evaluation metrics: satire-class P/R/F1, weighted macro P/R/F1 for
//! publication identification, prediction histograms, and the text results
//! table (percentages with one decimal).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// K x K matrix of (true, predicted) counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub classes: usize,
    pub counts: Vec<u64>,
    pub names: Vec<String>,
}

impl ConfusionCounts {
    pub fn new(classes: usize, names: Vec<String>) -> Self {
        assert!(classes >= 2);
        assert_eq!(names.len(), classes);
        ConfusionCounts {
            classes,
            counts: vec![0; classes * classes],
            names,
        }
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.counts[truth * self.classes + predicted] += 1;
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.classes + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn support(&self, class: usize) -> u64 {
        (0..self.classes).map(|p| self.get(class, p)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn prf_from_counts(tp: f64, fp: f64, fn_: f64) -> Prf {
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = ratio(2.0 * precision * recall, precision + recall);
    Prf { precision, recall, f1 }
}

/// P/R/F1 of the satire class (class index 1) from a 2x2 confusion matrix.
/// 0/0 conventions resolve to 0.
pub fn satire_prf(conf: &ConfusionCounts) -> Prf {
    assert_eq!(conf.classes, 2, "satire confusion matrix must be 2x2");
    let tp = conf.get(1, 1) as f64;
    let fp = conf.get(0, 1) as f64;
    let fn_ = conf.get(1, 0) as f64;
    prf_from_counts(tp, fp, fn_)
}

/// One-vs-rest P/R/F1 per class, averaged with weights equal to true-class
/// support shares.
pub fn weighted_macro_prf(conf: &ConfusionCounts) -> Prf {
    let total = conf.total() as f64;
    let mut out = Prf { precision: 0.0, recall: 0.0, f1: 0.0 };
    if total == 0.0 {
        return out;
    }
    for c in 0..conf.classes {
        let tp = conf.get(c, c) as f64;
        let fp: f64 = (0..conf.classes)
            .filter(|&t| t != c)
            .map(|t| conf.get(t, c) as f64)
            .sum();
        let fn_: f64 = (0..conf.classes)
            .filter(|&p| p != c)
            .map(|p| conf.get(c, p) as f64)
            .sum();
        let prf = prf_from_counts(tp, fp, fn_);
        let weight = conf.support(c) as f64 / total;
        out.precision += weight * prf.precision;
        out.recall += weight * prf.recall;
        out.f1 += weight * prf.f1;
    }
    out
}

/// Per-class fractions of the predicted labels plus the modal class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionHistogram {
    pub fractions: Vec<f64>,
    pub modal_class: usize,
    pub modal_share: f64,
}

pub fn prediction_histogram(predictions: &[usize], classes: usize) -> Result<PredictionHistogram> {
    if predictions.is_empty() {
        return Err(Error::EmptyPredictions);
    }
    let mut counts = vec![0u64; classes];
    for &p in predictions {
        counts[p] += 1;
    }
    let n = predictions.len() as f64;
    let fractions: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let modal_class = (0..classes).max_by(|&a, &b| {
        counts[a]
            .cmp(&counts[b])
            .then(b.cmp(&a)) // ties: smaller index
    })
    .unwrap();
    Ok(PredictionHistogram {
        modal_share: fractions[modal_class],
        fractions,
        modal_class,
    })
}

/// Full per-model evaluation payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub satire: Prf,
    pub publication: Prf,
    pub per_publication: Vec<(String, Prf)>,
    pub publication_histogram: PredictionHistogram,
    pub satire_accuracy: f64,
    pub publication_accuracy: f64,
}

pub fn build_report(satire_conf: &ConfusionCounts, pub_conf: &ConfusionCounts, pub_predictions: &[usize]) -> Result<MetricsReport> {
    let mut per_publication = Vec::new();
    for c in 0..pub_conf.classes {
        let tp = pub_conf.get(c, c) as f64;
        let fp: f64 = (0..pub_conf.classes)
            .filter(|&t| t != c)
            .map(|t| pub_conf.get(t, c) as f64)
            .sum();
        let fn_: f64 = (0..pub_conf.classes)
            .filter(|&p| p != c)
            .map(|p| pub_conf.get(c, p) as f64)
            .sum();
        per_publication.push((pub_conf.names[c].clone(), prf_from_counts(tp, fp, fn_)));
    }
    let accuracy = |conf: &ConfusionCounts| {
        let correct: u64 = (0..conf.classes).map(|c| conf.get(c, c)).sum();
        ratio(correct as f64, conf.total() as f64)
    };
    Ok(MetricsReport {
        satire: satire_prf(satire_conf),
        publication: weighted_macro_prf(pub_conf),
        per_publication,
        publication_histogram: prediction_histogram(pub_predictions, pub_conf.classes)?,
        satire_accuracy: accuracy(satire_conf),
        publication_accuracy: accuracy(pub_conf),
    })
}

/// Text table, one row per model: satire P/R/F1 then publication weighted
/// P/R/F1, as percentages with one decimal.
pub fn render_results_table<'a>(
    reports: impl IntoIterator<Item = (&'a str, &'a MetricsReport)>,
) -> String {
    let mut out = String::new();
    let pct = |x: f64| format!("{:5.1}", 100.0 * x);
    writeln!(
        out,
        "{:<24} | {:>5} {:>5} {:>5} | {:>5} {:>5} {:>5}",
        "Model", "SatP", "SatR", "SatF1", "PubP", "PubR", "PubF1"
    )
    .unwrap();
    writeln!(out, "{}", "-".repeat(24 + 3 + 17 + 3 + 17)).unwrap();
    for (name, r) in reports {
        writeln!(
            out,
            "{:<24} | {} {} {} | {} {} {}",
            name,
            pct(r.satire.precision),
            pct(r.satire.recall),
            pct(r.satire.f1),
            pct(r.publication.precision),
            pct(r.publication.recall),
            pct(r.publication.f1),
        )
        .unwrap();
    }
    out
}
