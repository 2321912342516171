//! Iconographic caption toolkit.
//!
//! * [`iconclass`]: parse Iconclass notations and resolve them to English
//!   textual correlates.
//! * [`caption`]: turn per-image code lists into cleaned captions and
//!   reproducible train/val/test splits.
//! * [`metrics`]: BLEU 1-4, METEOR, ROUGE-L and CIDEr, per example and per
//!   corpus.
//! * [`analysis`]: phrase × genre distributions, caption lengths and a
//!   frequency baseline captioner.
//! * [`cli`]: the `iconcap` command line.

pub mod analysis;
pub mod caption;
pub mod cli;
pub mod error;
pub mod iconclass;
pub mod io;
pub mod metrics;

pub use error::{Error, MalformedNotation, Result};
