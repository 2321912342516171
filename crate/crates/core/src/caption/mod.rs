//! Caption dataset construction: correlate concatenation, cleaning and
//! train/val/test splits.

mod clean;
mod dataset;
mod split;

pub use clean::{clean_description, Cleaner, CleaningConfig};
pub use dataset::{
    build_dataset, build_raw, BuildConfig, BuildReport, CaptionRecord, RawDescription, Split,
};
pub use split::{assign_splits, export_jsonl, seeded_permutation, SplitConfig};
