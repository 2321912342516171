use std::collections::HashSet;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::tokenize::TokenSequence;
use super::EvalPair;

/// Decides whether candidate token `i` may align to reference token `j`.
type MatchFn<'a> = Box<dyn Fn(usize, usize) -> bool + 'a>;

/// Scoring parameters.
///
/// `score = F · (1 − gamma · frag^theta)` with
/// `F = P·R / (alpha·P + (1 − alpha)·R)` and `frag = chunks / matches`.
/// Tokens are weighted `delta` (content word) or `1 − delta` (function word)
/// in P and R; stem and synonym matches count `stem_weight` and
/// `synonym_weight` of an exact match.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeteorParams {
    pub alpha: f64,
    pub gamma: f64,
    pub theta: f64,
    pub delta: f64,
    pub stem_weight: f64,
    pub synonym_weight: f64,
    /// A candidate matching the whole reference as one chunk gets no
    /// fragmentation penalty.
    pub perfect_match_exempt: bool,
}

impl MeteorParams {
    /// English parameters of Meteor Universal (1.5).
    pub fn universal() -> Self {
        MeteorParams {
            alpha: 0.85,
            gamma: 0.6,
            theta: 0.2,
            delta: 0.75,
            stem_weight: 0.6,
            synonym_weight: 0.8,
            perfect_match_exempt: true,
        }
    }

    /// Original unweighted form: alpha 0.9, gamma 0.5, theta 3, every match
    /// and every token weighted equally.
    pub fn classic() -> Self {
        MeteorParams {
            alpha: 0.9,
            gamma: 0.5,
            theta: 3.0,
            delta: 0.5,
            stem_weight: 1.0,
            synonym_weight: 1.0,
            perfect_match_exempt: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(unit(self.alpha)
            && unit(self.gamma)
            && unit(self.delta)
            && unit(self.stem_weight)
            && unit(self.synonym_weight))
        {
            return Err(Error::InvalidConfig(
                "METEOR alpha, gamma, delta and match weights must lie in [0, 1]".into(),
            ));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidConfig("METEOR theta must be positive".into()));
        }
        Ok(())
    }
}

impl Default for MeteorParams {
    fn default() -> Self {
        Self::universal()
    }
}

/// Third alignment stage. No resource ships with the crate.
pub trait SynonymMatcher: Send + Sync {
    fn is_synonym(&self, a: &str, b: &str) -> bool;
}

/// High-frequency English function words.
const FUNCTION_WORDS: &[&str] = &[
    "a",
    "about",
    "above",
    "after",
    "again",
    "against",
    "all",
    "also",
    "am",
    "an",
    "and",
    "any",
    "are",
    "as",
    "at",
    "be",
    "because",
    "been",
    "before",
    "being",
    "below",
    "between",
    "both",
    "but",
    "by",
    "can",
    "could",
    "did",
    "do",
    "does",
    "doing",
    "down",
    "during",
    "each",
    "even",
    "few",
    "first",
    "for",
    "from",
    "further",
    "had",
    "has",
    "have",
    "having",
    "he",
    "her",
    "here",
    "hers",
    "herself",
    "him",
    "himself",
    "his",
    "how",
    "i",
    "if",
    "in",
    "into",
    "is",
    "it",
    "its",
    "itself",
    "just",
    "last",
    "like",
    "many",
    "may",
    "me",
    "might",
    "more",
    "most",
    "much",
    "must",
    "my",
    "myself",
    "new",
    "no",
    "nor",
    "not",
    "now",
    "of",
    "off",
    "on",
    "once",
    "one",
    "only",
    "or",
    "other",
    "our",
    "ours",
    "ourselves",
    "out",
    "over",
    "own",
    "said",
    "same",
    "says",
    "she",
    "should",
    "since",
    "so",
    "some",
    "such",
    "than",
    "that",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "these",
    "they",
    "this",
    "those",
    "three",
    "through",
    "to",
    "too",
    "two",
    "under",
    "until",
    "up",
    "upon",
    "us",
    "very",
    "was",
    "we",
    "were",
    "what",
    "when",
    "where",
    "which",
    "while",
    "who",
    "whom",
    "whose",
    "why",
    "will",
    "with",
    "would",
    "year",
    "years",
    "yet",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
];

fn english_stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// METEOR scorer with its word lists and optional synonym stage.
pub struct MeteorScorer {
    params: MeteorParams,
    function_words: HashSet<String>,
    synonyms: Option<Box<dyn SynonymMatcher>>,
}

impl std::fmt::Debug for MeteorScorer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MeteorScorer")
            .field("params", &self.params)
            .field("function_words", &self.function_words.len())
            .field("synonyms", &self.synonyms.is_some())
            .finish()
    }
}

#[derive(Clone, Copy)]
struct Link {
    reference: usize,
    weight: f64,
}

impl MeteorScorer {
    pub fn new(params: MeteorParams) -> Result<Self> {
        params.validate()?;
        Ok(MeteorScorer {
            params,
            function_words: FUNCTION_WORDS.iter().map(|w| w.to_string()).collect(),
            synonyms: None,
        })
    }

    pub fn with_function_words<I: IntoIterator<Item = String>>(mut self, words: I) -> Self {
        self.function_words = words.into_iter().collect();
        self
    }

    pub fn with_synonyms(mut self, matcher: Box<dyn SynonymMatcher>) -> Self {
        self.synonyms = Some(matcher);
        self
    }

    pub fn params(&self) -> &MeteorParams {
        &self.params
    }

    fn token_weight(&self, token: &str) -> f64 {
        if self.function_words.contains(token) {
            1.0 - self.params.delta
        } else {
            self.params.delta
        }
    }

    /// Greedy one-to-one alignment: exact stage, then stem, then synonyms.
    /// Within a stage each candidate token takes the reference position
    /// that extends the previous token's chunk when possible, otherwise the
    /// leftmost free match.
    fn align(&self, cand: &[String], refs: &[String]) -> Vec<Option<Link>> {
        let mut links: Vec<Option<Link>> = vec![None; cand.len()];
        let mut ref_used = vec![false; refs.len()];

        let stemmer = english_stemmer();
        let cand_stems: Vec<String> = cand.iter().map(|t| stemmer.stem(t).into_owned()).collect();
        let ref_stems: Vec<String> = refs.iter().map(|t| stemmer.stem(t).into_owned()).collect();

        let mut stages: Vec<(f64, MatchFn<'_>)> = vec![
            (1.0, Box::new(|i, j| cand[i] == refs[j])),
            (
                self.params.stem_weight,
                Box::new(|i, j| cand_stems[i] == ref_stems[j]),
            ),
        ];
        if let Some(syn) = &self.synonyms {
            stages.push((
                self.params.synonym_weight,
                Box::new(move |i, j| syn.is_synonym(&cand[i], &refs[j])),
            ));
        }

        for (weight, matches) in &stages {
            for i in 0..cand.len() {
                if links[i].is_some() {
                    continue;
                }
                let preferred = i
                    .checked_sub(1)
                    .and_then(|p| links[p])
                    .map(|l| l.reference + 1)
                    .filter(|&j| j < refs.len() && !ref_used[j] && matches(i, j));
                let chosen =
                    preferred.or_else(|| (0..refs.len()).find(|&j| !ref_used[j] && matches(i, j)));
                if let Some(j) = chosen {
                    ref_used[j] = true;
                    links[i] = Some(Link {
                        reference: j,
                        weight: *weight,
                    });
                }
            }
        }
        links
    }

    fn score_single(&self, candidate: &TokenSequence, reference: &TokenSequence) -> f64 {
        let cand = candidate.tokens();
        let refs = reference.tokens();
        let links = self.align(cand, refs);

        let matched = links.iter().flatten().count();
        if matched == 0 {
            return 0.0;
        }

        let cand_total: f64 = cand.iter().map(|t| self.token_weight(t)).sum();
        let ref_total: f64 = refs.iter().map(|t| self.token_weight(t)).sum();
        let mut cand_hit = 0.0;
        let mut ref_hit = 0.0;
        for (i, link) in links.iter().enumerate() {
            if let Some(l) = link {
                cand_hit += l.weight * self.token_weight(&cand[i]);
                ref_hit += l.weight * self.token_weight(&refs[l.reference]);
            }
        }
        let precision = if cand_total > 0.0 {
            cand_hit / cand_total
        } else {
            0.0
        };
        let recall = if ref_total > 0.0 {
            ref_hit / ref_total
        } else {
            0.0
        };
        if precision == 0.0 || recall == 0.0 {
            return 0.0;
        }

        let mut chunks = 0usize;
        let mut prev: Option<usize> = None;
        for link in &links {
            match link {
                Some(l) => {
                    if prev.is_none_or(|p| p + 1 != l.reference) {
                        chunks += 1;
                    }
                    prev = Some(l.reference);
                }
                None => prev = None,
            }
        }

        let p = &self.params;
        let f_mean = precision * recall / (p.alpha * precision + (1.0 - p.alpha) * recall);
        let perfect = matched == cand.len() && matched == refs.len() && chunks == 1;
        let frag = if p.perfect_match_exempt && perfect {
            0.0
        } else {
            chunks as f64 / matched as f64
        };
        let penalty = p.gamma * frag.powf(p.theta);
        (f_mean * (1.0 - penalty)).clamp(0.0, 1.0)
    }

    /// Best score over the pair's references.
    pub fn score(&self, pair: &EvalPair) -> f64 {
        pair.references
            .iter()
            .map(|r| self.score_single(&pair.candidate, r))
            .fold(0.0, f64::max)
    }
}

/// METEOR with the built-in English function words and no synonym stage.
pub fn meteor(pair: &EvalPair, params: &MeteorParams) -> Result<f64> {
    Ok(MeteorScorer::new(*params)?.score(pair))
}
