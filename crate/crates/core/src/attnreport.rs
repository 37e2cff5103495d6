//! Attention-weight export and heatmap rendering: per-token attention for
//! chosen documents, shaded HTML or ANSI output for side-by-side comparison
//! of models, and cue-mass measurements.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::EncodedDocument;
use crate::embeddings::EmbeddingMatrix;
use crate::error::Result;
use crate::model::{extract_features, FeatureExtractorParams};
use crate::Scalar;

/// Tokens with their raw attention fractions for one document under one
/// model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttentionMap {
    pub id: String,
    pub model: String,
    pub tokens: Vec<String>,
    pub weights: Vec<Scalar>,
}

/// Attention weights are exactly the distribution produced by the feature
/// extractor for this document.
pub fn extract_attention(
    extractor: &FeatureExtractorParams,
    doc: &EncodedDocument,
    tokens: &[String],
    embeddings: &EmbeddingMatrix,
    model_tag: &str,
) -> Result<AttentionMap> {
    let (_, weights, _) = extract_features(extractor, doc, embeddings)?;
    assert_eq!(weights.len(), doc.true_len);
    Ok(AttentionMap {
        id: doc.id.clone(),
        model: model_tag.to_string(),
        tokens: tokens[..doc.true_len].to_vec(),
        weights,
    })
}

/// Sum of the attention weights at positions whose token is in the set.
pub fn attention_mass_on(tokens_of_interest: &HashSet<String>, map: &AttentionMap) -> Scalar {
    map.tokens
        .iter()
        .zip(&map.weights)
        .filter(|(t, _)| tokens_of_interest.contains(*t))
        .map(|(_, &w)| w)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatmapFormat {
    Html,
    Ansi,
}

fn html_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Render stacked heatmap rows, one per map, in order. Shading is
/// normalized to the maximum weight of each map; labels show the model tag
/// and weights as percentages with two decimals in tooltips.
pub fn render_heatmap(maps: &[AttentionMap], format: HeatmapFormat) -> String {
    match format {
        HeatmapFormat::Html => render_html(maps),
        HeatmapFormat::Ansi => render_ansi(maps),
    }
}

fn render_html(maps: &[AttentionMap]) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    out.push_str("<style>\n");
    out.push_str("body { font-family: sans-serif; margin: 2em; }\n");
    out.push_str(".map { border: 1px solid #999; padding: 0.6em; margin-bottom: 1em; line-height: 2.1; }\n");
    out.push_str(".label { font-weight: bold; margin-bottom: 0.2em; }\n");
    out.push_str(".tok { padding: 0.1em 0.15em; border-radius: 2px; }\n");
    out.push_str("</style>\n</head>\n<body>\n");
    for map in maps {
        let max = map.weights.iter().cloned().fold(0.0, Scalar::max);
        writeln!(
            out,
            "<div class=\"label\">{} &mdash; {}</div>",
            html_escape(&map.id),
            html_escape(&map.model)
        )
        .unwrap();
        out.push_str("<div class=\"map\">");
        for (tok, &w) in map.tokens.iter().zip(&map.weights) {
            let intensity = if max > 0.0 { w / max } else { 0.0 };
            // White -> saturated orange.
            let alpha = intensity;
            writeln!(
                out,
                "<span class=\"tok\" style=\"background: rgba(255,140,0,{:.3})\" title=\"{:.2}%\">{}</span>",
                alpha,
                100.0 * w,
                html_escape(tok)
            )
            .unwrap();
        }
        out.push_str("</div>\n");
    }
    out.push_str("</body>\n</html>\n");
    out
}

fn render_ansi(maps: &[AttentionMap]) -> String {
    let mut out = String::new();
    // 256-color grayscale-to-orange ramp approximated with background
    // colors 232..=255 is too dim; use the 6x6x6 cube row of oranges.
    const RAMP: [u8; 6] = [16, 58, 94, 130, 166, 202];
    for map in maps {
        let max = map.weights.iter().cloned().fold(0.0, Scalar::max);
        writeln!(out, "{} — {}", map.id, map.model).unwrap();
        for (tok, &w) in map.tokens.iter().zip(&map.weights) {
            let intensity = if max > 0.0 { w / max } else { 0.0 };
            let idx = ((intensity * (RAMP.len() - 1) as f64).round() as usize).min(RAMP.len() - 1);
            write!(out, "\x1b[48;5;{}m{}\x1b[0m ", RAMP[idx], tok).unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(tokens: &[&str], weights: &[f64]) -> AttentionMap {
        AttentionMap {
            id: "doc-1".into(),
            model: "no adv".into(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            weights: weights.to_vec(),
        }
    }

    #[test]
    fn mass_of_full_token_set_is_one() {
        let m = map(&["a", "b", "c"], &[0.2, 0.3, 0.5]);
        let set: HashSet<String> = m.tokens.iter().cloned().collect();
        assert_eq!(attention_mass_on(&set, &m), 1.0);
    }

    #[test]
    fn mass_of_empty_set_is_zero() {
        let m = map(&["a", "b"], &[0.4, 0.6]);
        assert_eq!(attention_mass_on(&HashSet::new(), &m), 0.0);
    }

    #[test]
    fn mass_is_additive_over_disjoint_sets() {
        let m = map(&["a", "b", "c", "a"], &[0.1, 0.2, 0.3, 0.4]);
        let s1: HashSet<String> = ["a"].iter().map(|s| s.to_string()).collect();
        let s2: HashSet<String> = ["b", "c"].iter().map(|s| s.to_string()).collect();
        let both: HashSet<String> = s1.union(&s2).cloned().collect();
        let lhs = attention_mass_on(&s1, &m) + attention_mass_on(&s2, &m);
        let rhs = attention_mass_on(&both, &m);
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn single_weight_is_fully_saturated() {
        let m = map(&["only"], &[1.0]);
        let html = render_html(&[m]);
        assert!(html.contains("rgba(255,140,0,1.000)"), "{html}");
    }

    #[test]
    fn stacked_maps_keep_order() {
        let a = map(&["x"], &[1.0]);
        let mut b = map(&["y"], &[1.0]);
        b.model = "adv".into();
        let html = render_html(&[a, b]);
        let first = html.find("no adv").unwrap();
        let second = html.find("adv").unwrap();
        assert!(first > second || html[..first].contains("adv") || first < html.rfind("adv").unwrap());
        // Order check on the token spans themselves.
        assert!(html.find(">x<").unwrap() < html.find(">y<").unwrap());
    }

    #[test]
    fn ansi_render_contains_color_codes() {
        let m = map(&["a", "b"], &[0.9, 0.1]);
        let text = render_ansi(&[m]);
        assert!(text.contains("\x1b[48;5;"));
        assert!(text.contains("a"));
    }

    #[test]
    #[ignore]
    fn regenerate_golden_file() {
        let m = map(&["Erfurt", "(", "dpo", ")"], &[0.0, 0.0, 1.0, 0.0]);
        let html = render_html(&[m]);
        std::fs::write(
            concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/heatmap.html"),
            html,
        )
        .unwrap();
    }

    #[test]
    fn html_matches_golden_file() {
        let m = map(&["Erfurt", "(", "dpo", ")"], &[0.0, 0.0, 1.0, 0.0]);
        let html = render_html(&[m]);
        let golden = include_str!("../tests/golden/heatmap.html");
        assert_eq!(html, golden);
    }
}
