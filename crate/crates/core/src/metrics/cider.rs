use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};

use super::tokenize::{ngram_counts, TokenSequence};
use super::{order_invariant_mean, EvalPair};

pub const CIDER_MAX_ORDER: usize = 4;

/// Corpus-level document frequencies for plain CIDEr.
///
/// `idf(g) = ln(|I| / max(1, df(g)))` where `df(g)` counts images whose
/// references contain `g`. Term frequency is the raw n-gram count.
#[derive(Debug, Clone)]
pub struct CiderScorer {
    doc_freq: [HashMap<Vec<String>, usize>; CIDER_MAX_ORDER],
    log_images: f64,
}

// Ordered so that norms and dot products sum in a fixed order; scores are
// then bit-identical across runs.
type Vector = BTreeMap<Vec<String>, f64>;

impl CiderScorer {
    pub fn new(corpus: &[EvalPair]) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut doc_freq: [HashMap<Vec<String>, usize>; CIDER_MAX_ORDER] = Default::default();
        for pair in corpus {
            for (n, df) in doc_freq.iter_mut().enumerate() {
                let grams: HashSet<&[String]> = pair
                    .references
                    .iter()
                    .flat_map(|r| ngram_counts(r.tokens(), n + 1).into_keys())
                    .collect();
                for g in grams {
                    *df.entry(g.to_vec()).or_insert(0) += 1;
                }
            }
        }
        Ok(CiderScorer {
            doc_freq,
            log_images: (corpus.len() as f64).ln(),
        })
    }

    fn idf(&self, n: usize, gram: &[String]) -> f64 {
        let df = self.doc_freq[n - 1].get(gram).copied().unwrap_or(0).max(1);
        self.log_images - (df as f64).ln()
    }

    fn vector(&self, tokens: &TokenSequence, n: usize) -> Vector {
        ngram_counts(tokens.tokens(), n)
            .into_iter()
            .map(|(g, count)| (g.to_vec(), count as f64 * self.idf(n, g)))
            .collect()
    }

    /// `10 ×` the mean over orders 1..=4 of the cosine between candidate and
    /// reference TF-IDF vectors (averaged over references). An order where
    /// either vector is zero contributes 0.
    pub fn score(&self, pair: &EvalPair) -> f64 {
        let mut total = 0.0;
        for n in 1..=CIDER_MAX_ORDER {
            let cand = self.vector(&pair.candidate, n);
            let sims: f64 = pair
                .references
                .iter()
                .map(|r| cosine(&cand, &self.vector(r, n)))
                .sum();
            total += sims / pair.references.len() as f64;
        }
        (10.0 * total / CIDER_MAX_ORDER as f64).clamp(0.0, 10.0)
    }
}

fn cosine(a: &Vector, b: &Vector) -> f64 {
    let norm = |v: &Vector| v.values().map(|x| x * x).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .iter()
        .filter_map(|(g, x)| large.get(g).map(|y| x * y))
        .sum();
    (dot / (na * nb)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiderScores {
    /// In corpus order.
    pub per_example: Vec<f64>,
    pub corpus: f64,
}

pub fn cider(corpus: &[EvalPair]) -> Result<CiderScores> {
    let scorer = CiderScorer::new(corpus)?;
    let per_example: Vec<f64> = corpus.iter().map(|p| scorer.score(p)).collect();
    let corpus = order_invariant_mean(&per_example);
    Ok(CiderScores {
        per_example,
        corpus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_corpus() {
        assert!(matches!(cider(&[]), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn identity_on_distinct_captions() {
        let corpus = vec![
            EvalPair::from_text("1", "a red rose in bloom", ["a red rose in bloom"]),
            EvalPair::from_text("2", "the sea at night time", ["the sea at night time"]),
        ];
        let s = cider(&corpus).unwrap();
        for v in s.per_example {
            assert_abs_diff_eq!(v, 10.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn disjoint_is_zero() {
        let corpus = vec![
            EvalPair::from_text("1", "x y z w", ["a b c d"]),
            EvalPair::from_text("2", "e f g h", ["e f g h"]),
        ];
        assert_eq!(cider(&corpus).unwrap().per_example[0], 0.0);
    }

    #[test]
    fn ubiquitous_ngrams_carry_no_weight() {
        // "the" is in every reference, so matching only "the" scores 0.
        let corpus = vec![
            EvalPair::from_text("1", "the", ["the cat"]),
            EvalPair::from_text("2", "dog", ["the dog"]),
        ];
        let s = cider(&corpus).unwrap();
        assert_eq!(s.per_example[0], 0.0);
        assert!(s.per_example[1] > 0.0);
    }

    #[test]
    fn single_image_has_zero_idf() {
        let corpus = vec![EvalPair::from_text("1", "a b c d", ["a b c d"])];
        assert_eq!(cider(&corpus).unwrap().corpus, 0.0);
    }
}
