use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iconclass::{AnnotationRecord, CorrelateStore, IconclassNotation};

use super::clean::{Cleaner, CleaningConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// One image of the caption dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptionRecord {
    pub image_id: String,
    pub raw_description: String,
    pub clean_description: String,
    pub split: Option<Split>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub cleaning: CleaningConfig,
    /// Walk the parent chain for codes missing from the correlate store.
    pub parent_fallback: bool,
}

/// Counts emitted alongside a dataset build.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub input: usize,
    pub kept: usize,
    pub dropped_empty: usize,
    pub unresolved_codes: usize,
}

/// Concatenated correlates of one record plus how many codes missed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDescription {
    pub text: String,
    pub unresolved: usize,
}

fn resolve<'s>(code: &str, store: &'s CorrelateStore, fallback: bool) -> Option<&'s str> {
    if let Some(text) = store.get(code) {
        return Some(text);
    }
    if !fallback {
        return None;
    }
    let notation = IconclassNotation::parse(code).ok()?;
    store.correlate(&notation, true)
}

/// Joins the correlates of `record.codes`, in code order, with `", "`.
/// Codes without a correlate are skipped and counted.
pub fn build_raw(
    record: &AnnotationRecord,
    store: &CorrelateStore,
    parent_fallback: bool,
) -> Result<RawDescription> {
    let mut parts = Vec::with_capacity(record.codes.len());
    let mut unresolved = 0;
    for code in &record.codes {
        match resolve(code, store, parent_fallback) {
            Some(text) => parts.push(text),
            None => unresolved += 1,
        }
    }
    if parts.is_empty() {
        return Err(Error::NoResolvableCodes(record.image_id.clone()));
    }
    Ok(RawDescription {
        text: parts.join(", "),
        unresolved,
    })
}

/// Builds one record per annotation whose cleaned description is non-empty.
/// Records come back in annotation order with no split assigned.
pub fn build_dataset(
    annotations: &[AnnotationRecord],
    store: &CorrelateStore,
    cfg: &BuildConfig,
) -> Result<(Vec<CaptionRecord>, BuildReport)> {
    let cleaner = Cleaner::new(&cfg.cleaning)?;
    let built: Vec<(Option<CaptionRecord>, usize)> = annotations
        .par_iter()
        .map(|ann| {
            let raw = match build_raw(ann, store, cfg.parent_fallback) {
                Ok(raw) => raw,
                Err(_) => return (None, ann.codes.len()),
            };
            let clean = cleaner.clean(&raw.text);
            let record = (!clean.is_empty()).then(|| CaptionRecord {
                image_id: ann.image_id.clone(),
                raw_description: raw.text,
                clean_description: clean,
                split: None,
            });
            (record, raw.unresolved)
        })
        .collect();

    let mut report = BuildReport {
        input: annotations.len(),
        ..BuildReport::default()
    };
    let mut records = Vec::with_capacity(built.len());
    for (record, unresolved) in built {
        report.unresolved_codes += unresolved;
        match record {
            Some(r) => records.push(r),
            None => report.dropped_empty += 1,
        }
    }
    report.kept = records.len();
    Ok((records, report))
}
