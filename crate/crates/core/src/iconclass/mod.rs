//! Iconclass notations, their textual correlates and per-image annotations.

mod annotations;
mod notation;
mod store;

pub use annotations::{load_annotations, parse_annotations, AnnotationRecord};
pub use notation::{normalize_notation, IconclassNotation};
pub use store::CorrelateStore;
