//! Caption evaluation: BLEU 1-4, METEOR, ROUGE-L and CIDEr over
//! candidate/reference pairs, per example and per corpus.

mod bleu;
mod cider;
mod meteor;
mod report;
mod rouge;
mod tokenize;

pub use bleu::{bleu, corpus_bleu, BleuStats, DEFAULT_SMOOTHING_EPSILON, MAX_ORDER};
pub use cider::{cider, CiderScorer, CiderScores, CIDER_MAX_ORDER};
pub use meteor::{meteor, MeteorParams, MeteorScorer, SynonymMatcher};
pub use report::{
    build_pairs, evaluate, evaluate_pairs, EvalConfig, ExampleScores, MetricReport, MetricScores,
};
pub use rouge::{lcs_len, rouge_l, DEFAULT_BETA};
pub use tokenize::{is_punctuation, tokenize, TokenSequence, PUNCTUATION};

/// A candidate caption and its references (at least one).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPair {
    pub image_id: String,
    pub candidate: TokenSequence,
    pub references: Vec<TokenSequence>,
}

impl EvalPair {
    /// # Panics
    /// If `references` is empty.
    pub fn new(
        image_id: impl Into<String>,
        candidate: TokenSequence,
        references: Vec<TokenSequence>,
    ) -> Self {
        assert!(
            !references.is_empty(),
            "an evaluation pair needs at least one reference"
        );
        EvalPair {
            image_id: image_id.into(),
            candidate,
            references,
        }
    }

    /// Tokenizes raw captions with [`tokenize`], punctuation kept.
    pub fn from_text<I, S>(image_id: impl Into<String>, candidate: &str, references: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let refs = references
            .into_iter()
            .map(|r| tokenize(r.as_ref()))
            .collect();
        Self::new(image_id, tokenize(candidate), refs)
    }

    pub fn without_punctuation(&self) -> EvalPair {
        EvalPair {
            image_id: self.image_id.clone(),
            candidate: self.candidate.without_punctuation(),
            references: self
                .references
                .iter()
                .map(TokenSequence::without_punctuation)
                .collect(),
        }
    }
}

/// Mean that does not depend on the order of `values`: summed after sorting.
pub(crate) fn order_invariant_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().sum::<f64>() / sorted.len() as f64
}
