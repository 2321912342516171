use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_caption_jsonl, CaptionLine};

use super::bleu::{BleuStats, DEFAULT_SMOOTHING_EPSILON};
use super::cider::CiderScorer;
use super::meteor::{MeteorParams, MeteorScorer};
use super::rouge::{rouge_l, DEFAULT_BETA};
use super::tokenize::tokenize;
use super::{order_invariant_mean, EvalPair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub smoothing_epsilon: f64,
    pub rouge_beta: f64,
    pub meteor: MeteorParams,
    /// Drop punctuation tokens before scoring.
    pub strip_punctuation: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            smoothing_epsilon: DEFAULT_SMOOTHING_EPSILON,
            rouge_beta: DEFAULT_BETA,
            meteor: MeteorParams::default(),
            strip_punctuation: true,
        }
    }
}

/// The seven scores. Natural scale: CIDEr in [0, 10], the rest in [0, 1].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricScores {
    pub bleu1: f64,
    pub bleu2: f64,
    pub bleu3: f64,
    pub bleu4: f64,
    pub meteor: f64,
    pub rouge_l: f64,
    pub cider: f64,
}

impl MetricScores {
    pub const NAMES: [&'static str; 7] = [
        "bleu1", "bleu2", "bleu3", "bleu4", "meteor", "rouge_l", "cider",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.bleu1,
            self.bleu2,
            self.bleu3,
            self.bleu4,
            self.meteor,
            self.rouge_l,
            self.cider,
        ]
    }

    /// Upper bound of each score in natural scale.
    pub fn upper_bounds() -> [f64; 7] {
        [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0]
    }

    fn scaled(&self, factor: f64) -> Self {
        MetricScores {
            bleu1: self.bleu1 * factor,
            bleu2: self.bleu2 * factor,
            bleu3: self.bleu3 * factor,
            bleu4: self.bleu4 * factor,
            meteor: self.meteor * factor,
            rouge_l: self.rouge_l * factor,
            cider: self.cider * factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleScores {
    pub image_id: String,
    #[serde(flatten)]
    pub scores: MetricScores,
}

/// Corpus row plus per-example rows sorted by image id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub corpus: MetricScores,
    pub examples: Vec<ExampleScores>,
}

impl MetricReport {
    /// Every score multiplied by 100, the usual presentation scale.
    pub fn x100(&self) -> MetricReport {
        MetricReport {
            corpus: self.corpus.scaled(100.0),
            examples: self
                .examples
                .iter()
                .map(|e| ExampleScores {
                    image_id: e.image_id.clone(),
                    scores: e.scores.scaled(100.0),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per example: `image_id,bleu1,...,cider`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["image_id"];
        header.extend(MetricScores::NAMES);
        w.write_record(&header).expect("in-memory write");
        for e in &self.examples {
            let mut row = vec![e.image_id.clone()];
            row.extend(e.scores.values().iter().map(|v| v.to_string()));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// Joins candidate lines with reference lines by image id. Several
/// reference lines for one id become several references.
pub fn build_pairs(
    candidates: &[CaptionLine],
    references: &[CaptionLine],
) -> Result<Vec<EvalPair>> {
    let mut refs: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in references {
        refs.entry(r.image_id.as_str())
            .or_default()
            .push(r.caption.as_str());
    }
    let mut seen = HashSet::new();
    candidates
        .iter()
        .map(|c| {
            if !seen.insert(c.image_id.as_str()) {
                return Err(Error::DuplicateId(c.image_id.clone()));
            }
            let texts = refs
                .get(c.image_id.as_str())
                .ok_or_else(|| Error::MissingReference(c.image_id.clone()))?;
            Ok(EvalPair::new(
                c.image_id.clone(),
                tokenize(&c.caption),
                texts.iter().map(|t| tokenize(t)).collect(),
            ))
        })
        .collect()
}

/// Scores every pair and the corpus. Corpus BLEU sums clipped counts and
/// lengths; the other corpus scores are means of the per-example scores.
pub fn evaluate_pairs(pairs: &[EvalPair], cfg: &EvalConfig) -> Result<MetricReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut pairs: Vec<EvalPair> = if cfg.strip_punctuation {
        pairs.iter().map(EvalPair::without_punctuation).collect()
    } else {
        pairs.to_vec()
    };
    pairs.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    if let Some(w) = pairs.windows(2).find(|w| w[0].image_id == w[1].image_id) {
        return Err(Error::DuplicateId(w[0].image_id.clone()));
    }

    let meteor = MeteorScorer::new(cfg.meteor)?;
    let cider = CiderScorer::new(&pairs)?;
    let eps = cfg.smoothing_epsilon;

    let rows: Vec<(ExampleScores, BleuStats)> = pairs
        .par_iter()
        .map(|p| {
            let stats = BleuStats::from_tokens(&p.candidate, &p.references);
            let scores = MetricScores {
                bleu1: stats.score(1, eps),
                bleu2: stats.score(2, eps),
                bleu3: stats.score(3, eps),
                bleu4: stats.score(4, eps),
                meteor: meteor.score(p),
                rouge_l: rouge_l(p, cfg.rouge_beta),
                cider: cider.score(p),
            };
            (
                ExampleScores {
                    image_id: p.image_id.clone(),
                    scores,
                },
                stats,
            )
        })
        .collect();

    let mut total = BleuStats::default();
    for (_, stats) in &rows {
        total += *stats;
    }
    let column = |f: fn(&MetricScores) -> f64| {
        order_invariant_mean(&rows.iter().map(|(e, _)| f(&e.scores)).collect::<Vec<_>>())
    };
    let corpus = MetricScores {
        bleu1: total.score(1, eps),
        bleu2: total.score(2, eps),
        bleu3: total.score(3, eps),
        bleu4: total.score(4, eps),
        meteor: column(|s| s.meteor),
        rouge_l: column(|s| s.rouge_l),
        cider: column(|s| s.cider),
    };
    Ok(MetricReport {
        corpus,
        examples: rows.into_iter().map(|(e, _)| e).collect(),
    })
}

/// Reads candidate and reference JSONL files and scores them.
pub fn evaluate(
    candidates: impl AsRef<Path>,
    references: impl AsRef<Path>,
    cfg: &EvalConfig,
) -> Result<MetricReport> {
    let cands = read_caption_jsonl(candidates)?;
    let refs = read_caption_jsonl(references)?;
    let pairs = build_pairs(&cands, &refs)?;
    evaluate_pairs(&pairs, cfg)
}
