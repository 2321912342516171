use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{write_caption_jsonl, CaptionLine};

use super::dataset::{CaptionRecord, Split};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub seed: u64,
    pub n_val: usize,
    pub n_test: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            seed: 0,
            n_val: 5_000,
            n_test: 5_000,
        }
    }
}

/// Uniform draw from `0..bound` by rejection, so no value is favoured.
fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    // 2^64 mod bound: values below it would bias the modulo.
    let reject_below = bound.wrapping_neg() % bound;
    loop {
        let x = rng.next_u64();
        if x >= reject_below {
            return x % bound;
        }
    }
}

/// Permutation of `0..n` used for split assignment.
///
/// Fisher-Yates from the last index down to 1, swapping `i` with a uniform
/// `j` in `0..=i`. The stream is ChaCha8 seeded through `seed_from_u64`.
pub fn seeded_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = uniform_below(&mut rng, i as u64 + 1) as usize;
        order.swap(i, j);
    }
    order
}

/// Assigns train/val/test. Records are sorted by id, permuted with
/// [`seeded_permutation`]; the first `n_test` go to test, the next `n_val`
/// to val, the rest to train. The result is sorted by image id.
pub fn assign_splits(
    mut records: Vec<CaptionRecord>,
    cfg: &SplitConfig,
) -> Result<Vec<CaptionRecord>> {
    let held_out = cfg.n_val + cfg.n_test;
    if held_out > records.len() {
        return Err(Error::InsufficientRecords {
            requested: held_out,
            available: records.len(),
        });
    }
    records.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    if let Some(w) = records.windows(2).find(|w| w[0].image_id == w[1].image_id) {
        return Err(Error::DuplicateId(w[0].image_id.clone()));
    }
    for (rank, idx) in seeded_permutation(records.len(), cfg.seed)
        .into_iter()
        .enumerate()
    {
        let split = if rank < cfg.n_test {
            Split::Test
        } else if rank < held_out {
            Split::Val
        } else {
            Split::Train
        };
        records[idx].split = Some(split);
    }
    Ok(records)
}

/// Writes `{"image_id", "caption"}` lines for records in `filter` (all
/// records when `None`), sorted by image id. Returns the line count.
pub fn export_jsonl(
    records: &[CaptionRecord],
    path: impl AsRef<Path>,
    filter: Option<Split>,
) -> Result<usize> {
    let mut lines: Vec<CaptionLine> = records
        .iter()
        .filter(|r| filter.is_none() || r.split == filter)
        .map(|r| CaptionLine {
            image_id: r.image_id.clone(),
            caption: r.clean_description.clone(),
        })
        .collect();
    lines.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    write_caption_jsonl(path, &lines)?;
    Ok(lines.len())
}
