use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::notation::{normalize_notation, IconclassNotation};

/// Notation → English textual correlate. Immutable once loaded.
#[derive(Debug, Clone, Default)]
pub struct CorrelateStore {
    entries: HashMap<String, String>,
}

impl CorrelateStore {
    /// Builds a store from (notation, text) pairs. Keys are normalized,
    /// entries with blank text are skipped, later duplicates win.
    pub fn from_pairs<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        let mut entries = HashMap::new();
        for (k, v) in pairs {
            let text: String = v.into();
            if text.trim().is_empty() {
                continue;
            }
            entries.insert(normalize_notation(k.as_ref()), text);
        }
        CorrelateStore { entries }
    }

    /// Parses `notation<TAB>english text` lines. Lines starting with `#` and
    /// blank lines are ignored.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (notation, correlate) = line.split_once('\t').ok_or_else(|| {
                Error::schema(format!("line {}", lineno + 1), "expected notation<TAB>text")
            })?;
            pairs.push((notation.to_string(), correlate.to_string()));
        }
        Ok(Self::from_pairs(pairs))
    }

    /// Parses a JSON object mapping notation → text.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::schema("correlates", e.to_string()))?;
        let object = value
            .as_object()
            .ok_or_else(|| Error::schema("correlates", "top level must be an object"))?;
        let mut pairs = Vec::with_capacity(object.len());
        for (k, v) in object {
            let text = v
                .as_str()
                .ok_or_else(|| Error::schema(k.clone(), "correlate must be a string"))?;
            pairs.push((k.clone(), text.to_string()));
        }
        Ok(Self::from_pairs(pairs))
    }

    /// Loads a `.json` file as JSON, anything else as TSV.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("json"))
        {
            Self::from_json(&text)
        } else {
            Self::from_tsv(&text)
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact lookup of a notation string after normalization.
    pub fn get(&self, notation: &str) -> Option<&str> {
        self.entries
            .get(&normalize_notation(notation))
            .map(String::as_str)
    }

    /// Correlate of `n`, optionally walking up the parent chain when the
    /// notation itself is missing.
    pub fn correlate(&self, n: &IconclassNotation, fallback: bool) -> Option<&str> {
        if let Some(text) = self.get(n.raw()) {
            return Some(text);
        }
        if !fallback {
            return None;
        }
        n.ancestors().find_map(|a| self.get(a.raw()))
    }
}
