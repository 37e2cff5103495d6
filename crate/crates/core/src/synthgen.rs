//! Seeded synthetic corpora with a controllable confound between
//! publication cues and satire cues. Background text is uniform-random
//! tokens from a shared vocabulary; each publication owns a unique marker
//! token (standing in for the outlet's own name) and satire documents
//! additionally carry tokens from a shared satire-cue set.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Article;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PublicationSpec {
    pub name: String,
    pub satire: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub publications: Vec<PublicationSpec>,
    pub articles_per_publication: usize,
    pub vocab_size: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Probability a document contains its publication's marker token.
    pub publication_cue_rate: f64,
    /// Number of distinct satire-cue tokens shared by satire publications.
    pub satire_cue_count: usize,
    /// Probability a satire document contains a satire-cue token.
    pub satire_cue_rate: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Fixture "A": 4 publications (2 satire, 2 regular), 200 documents
    /// each, background vocabulary of 1,000 tokens, lengths 20-60, cue
    /// rates 0.9. Both tasks are learnable in minutes at these sizes.
    pub fn fixture_a(seed: u64) -> Self {
        SynthSpec {
            publications: vec![
                PublicationSpec { name: "regA".into(), satire: false },
                PublicationSpec { name: "regB".into(), satire: false },
                PublicationSpec { name: "satC".into(), satire: true },
                PublicationSpec { name: "satD".into(), satire: true },
            ],
            articles_per_publication: 200,
            vocab_size: 1000,
            min_len: 20,
            max_len: 60,
            publication_cue_rate: 0.9,
            satire_cue_count: 8,
            satire_cue_rate: 0.9,
            seed,
        }
    }

    pub fn marker_token(&self, publication: &str) -> String {
        format!("src_{publication}")
    }

    pub fn satire_cue_tokens(&self) -> Vec<String> {
        (0..self.satire_cue_count)
            .map(|i| format!("satcue_{i}"))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let satire = self.publications.iter().filter(|p| p.satire).count();
        let regular = self.publications.len() - satire;
        if self.publications.len() < 2 || satire < 1 || regular < 1 {
            return Err(Error::InvalidConfig(
                "need >= 2 publications with at least one satire and one regular".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.publication_cue_rate)
            || !(0.0..=1.0).contains(&self.satire_cue_rate)
        {
            return Err(Error::InvalidConfig("cue rates must lie in [0, 1]".into()));
        }
        if self.min_len < 3 || self.max_len < self.min_len {
            return Err(Error::InvalidConfig("bad document length range".into()));
        }
        if self.articles_per_publication == 0 || self.vocab_size == 0 {
            return Err(Error::InvalidConfig("empty corpus requested".into()));
        }
        if self.satire_cue_count == 0 {
            return Err(Error::InvalidConfig("need at least one satire cue token".into()));
        }
        let mut names: Vec<&str> = self.publications.iter().map(|p| p.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.publications.len() {
            return Err(Error::InvalidConfig("duplicate publication names".into()));
        }
        Ok(())
    }
}

/// Ground-truth cue inventory, for attention-mass measurements.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CueManifest {
    pub publication_markers: Vec<(String, String)>,
    pub satire_cues: Vec<String>,
}

pub fn describe(spec: &SynthSpec) -> Result<CueManifest> {
    spec.validate()?;
    Ok(CueManifest {
        publication_markers: spec
            .publications
            .iter()
            .map(|p| (p.name.clone(), spec.marker_token(&p.name)))
            .collect(),
        satire_cues: spec.satire_cue_tokens(),
    })
}

/// Generate the corpus. Deterministic per seed, with per-document seed
/// derivation so documents are independent of generation order.
pub fn generate(spec: &SynthSpec) -> Result<Vec<Article>> {
    spec.validate()?;
    let satire_cues = spec.satire_cue_tokens();
    let mut articles = Vec::with_capacity(spec.publications.len() * spec.articles_per_publication);
    for publication in &spec.publications {
        let marker = spec.marker_token(&publication.name);
        for i in 0..spec.articles_per_publication {
            let id = format!("{}-{:04}", publication.name, i);
            let mut rng = rng::stream(spec.seed, &format!("synth:{id}"));
            let len = rng.gen_range(spec.min_len..=spec.max_len);
            let mut body: Vec<String> = (0..len)
                .map(|_| format!("w{:04}", rng.gen_range(0..spec.vocab_size)))
                .collect();
            if rng.gen_bool(spec.publication_cue_rate) {
                let pos = rng.gen_range(0..=body.len());
                body.insert(pos, marker.clone());
            }
            if publication.satire && rng.gen_bool(spec.satire_cue_rate) {
                let cue = satire_cues[rng.gen_range(0..satire_cues.len())].clone();
                let pos = rng.gen_range(0..=body.len());
                body.insert(pos, cue);
            }
            let title: Vec<String> = (0..3)
                .map(|_| format!("w{:04}", rng.gen_range(0..spec.vocab_size)))
                .collect();
            articles.push(Article {
                id,
                title,
                body,
                publication: publication.name.clone(),
                satire: publication.satire,
            });
        }
    }
    Ok(articles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn tiny_spec(pub_rate: f64, satire_rate: f64) -> SynthSpec {
        SynthSpec {
            articles_per_publication: 50,
            publication_cue_rate: pub_rate,
            satire_cue_rate: satire_rate,
            ..SynthSpec::fixture_a(3)
        }
    }

    #[test]
    fn rate_one_plants_marker_exactly_once() {
        let spec = tiny_spec(1.0, 1.0);
        for a in generate(&spec).unwrap() {
            let marker = spec.marker_token(&a.publication);
            let n = a.body.iter().filter(|t| **t == marker).count();
            assert_eq!(n, 1, "article {} has {} markers", a.id, n);
        }
    }

    #[test]
    fn rate_zero_plants_nothing() {
        let spec = tiny_spec(0.0, 0.0);
        for a in generate(&spec).unwrap() {
            assert!(!a.body.iter().any(|t| t.starts_with("src_") || t.starts_with("satcue_")));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SynthSpec::fixture_a(7);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn corpus_invariants_hold() {
        let spec = tiny_spec(0.9, 0.9);
        let arts = generate(&spec).unwrap();
        let mut ids = HashSet::new();
        for a in &arts {
            assert!(ids.insert(a.id.clone()), "duplicate id {}", a.id);
            assert!(!a.body.is_empty());
            assert!(!a.publication.is_empty());
        }
        assert_eq!(arts.len(), 4 * 50);
    }

    #[test]
    fn labels_follow_publication_assignment() {
        let spec = tiny_spec(0.5, 0.5);
        for a in generate(&spec).unwrap() {
            let expected = spec
                .publications
                .iter()
                .find(|p| p.name == a.publication)
                .unwrap()
                .satire;
            assert_eq!(a.satire, expected);
        }
    }

    #[test]
    fn marker_frequency_matches_rate_within_3_sigma() {
        let spec = SynthSpec {
            articles_per_publication: 400,
            ..SynthSpec::fixture_a(11)
        };
        let arts = generate(&spec).unwrap();
        let n = spec.articles_per_publication as f64;
        let p = spec.publication_cue_rate;
        let sigma = (p * (1.0 - p) / n).sqrt();
        for publication in &spec.publications {
            let marker = spec.marker_token(&publication.name);
            let hits = arts
                .iter()
                .filter(|a| a.publication == publication.name)
                .filter(|a| a.body.contains(&marker))
                .count() as f64;
            let freq = hits / n;
            assert!(
                (freq - p).abs() < 3.0 * sigma,
                "{}: frequency {} vs rate {}",
                publication.name,
                freq,
                p
            );
        }
    }

    #[test]
    fn manifest_lists_markers_and_roundtrips() {
        let spec = SynthSpec::fixture_a(1);
        let m = describe(&spec).unwrap();
        assert_eq!(m.publication_markers.len(), 4);
        let json = serde_json::to_string(&m).unwrap();
        let back: CueManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
        // Cue sets are disjoint.
        let markers: HashSet<&String> = m.publication_markers.iter().map(|(_, t)| t).collect();
        for cue in &m.satire_cues {
            assert!(!markers.contains(cue));
        }
    }

    #[test]
    fn inconsistent_spec_rejected() {
        let mut spec = SynthSpec::fixture_a(1);
        spec.publications.retain(|p| !p.satire);
        assert!(generate(&spec).is_err());
        let mut spec = SynthSpec::fixture_a(1);
        spec.publication_cue_rate = 1.5;
        assert!(generate(&spec).is_err());
    }
}
