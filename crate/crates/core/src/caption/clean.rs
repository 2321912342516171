use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Settings for [`clean_description`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningConfig {
    /// Dataset-specific uppercase codes removed when they appear as `- X -`.
    pub uppercase_stoplist: Vec<String>,
    pub drop_etc: bool,
    pub dedup: bool,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        CleaningConfig {
            uppercase_stoplist: vec!["BB".to_string()],
            drop_etc: true,
            dedup: true,
        }
    }
}

impl CleaningConfig {
    pub fn validate(&self) -> Result<()> {
        for code in &self.uppercase_stoplist {
            let ok = (1..=4).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_uppercase());
            if !ok {
                return Err(Error::InvalidConfig(format!(
                    "stoplist entry {code:?} must be 1-4 uppercase ASCII letters"
                )));
            }
        }
        Ok(())
    }
}

/// Compiled form of a [`CleaningConfig`]; build once, reuse across records.
#[derive(Debug, Clone)]
pub struct Cleaner {
    stoplist: Option<Regex>,
    drop_etc: bool,
    dedup: bool,
}

impl Cleaner {
    pub fn new(cfg: &CleaningConfig) -> Result<Self> {
        cfg.validate()?;
        let stoplist = if cfg.uppercase_stoplist.is_empty() {
            None
        } else {
            let alternatives = cfg.uppercase_stoplist.join("|");
            Some(Regex::new(&format!(r"\s*-\s*(?:{alternatives})\s*-\s*")).expect("stoplist regex"))
        };
        Ok(Cleaner {
            stoplist,
            drop_etc: cfg.drop_etc,
            dedup: cfg.dedup,
        })
    }

    /// Runs the cleaning pass until the text stops changing.
    ///
    /// Every pass that changes a period-terminated text makes it strictly
    /// shorter, so the loop terminates; the result is a fixpoint, which makes
    /// cleaning idempotent.
    pub fn clean(&self, raw: &str) -> String {
        let mut current = self.pass(raw);
        loop {
            let next = self.pass(&current);
            if next == current {
                return current;
            }
            current = next;
        }
    }

    fn pass(&self, raw: &str) -> String {
        let mut text = remove_groups(raw);
        if let Some(re) = &self.stoplist {
            text = re.replace_all(&text, ", ").into_owned();
        }
        if self.drop_etc {
            text = text.replace(", etc.", "");
        }
        text = collapse_whitespace(&text);
        if self.dedup {
            text = dedup_segments(&text);
        }
        terminate(&text)
    }
}

/// Applies the cleaning procedure to one concatenated description:
///
/// 1. remove every parenthesized group with its parentheses,
/// 2. replace stoplisted `- CODE -` runs by a comma separator,
/// 3. drop literal `, etc.`,
/// 4. collapse whitespace runs to one space,
/// 5. drop comma-separated segments that repeat an earlier one,
/// 6. trim trailing separators and end with a single `.`.
///
/// Empty output is returned as an empty string.
pub fn clean_description(raw: &str, cfg: &CleaningConfig) -> Result<String> {
    Ok(Cleaner::new(cfg)?.clean(raw))
}

fn remove_groups(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut depth = 0usize;
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            if !in_space {
                out.push(' ');
            }
            in_space = true;
        } else {
            out.push(c);
            in_space = false;
        }
    }
    out
}

fn dedup_segments(text: &str) -> String {
    let mut seen: Vec<&str> = Vec::new();
    let mut kept: Vec<&str> = Vec::new();
    for segment in text.split(',') {
        // The final segment may still carry the terminal period.
        let key = segment.trim().trim_end_matches('.').trim_end();
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        kept.push(segment);
    }
    kept.join(",")
}

fn terminate(text: &str) -> String {
    let body = text
        .trim_start_matches(|c: char| c.is_whitespace() || c == ',')
        .trim_end_matches(|c: char| c.is_whitespace() || matches!(c, ',' | ';' | '.'));
    if body.is_empty() {
        String::new()
    } else {
        format!("{body}.")
    }
}
