use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::MalformedNotation;

/// A parsed Iconclass notation such as `25G4(ROSE)` or `73A(+1)`.
///
/// The base is kept as alternating runs of digits and uppercase letters.
/// Parenthesized groups are split into qualifiers (named entities, Latin
/// names) and keys (`(+...)`, stored without the `+`).
///
/// Equality ignores `raw`: two notations are equal when their structure is.
#[derive(Debug, Clone, Eq, Serialize)]
pub struct IconclassNotation {
    #[serde(skip)]
    raw: String,
    base: Vec<String>,
    keys: Vec<String>,
    qualifiers: Vec<String>,
}

impl PartialEq for IconclassNotation {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.qualifiers == other.qualifiers && self.keys == other.keys
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Run {
    Digits,
    Letters,
}

fn malformed(offset: usize, reason: &'static str) -> MalformedNotation {
    MalformedNotation { offset, reason }
}

impl IconclassNotation {
    /// Parses a notation. Whitespace outside parentheses is ignored, text
    /// inside a group is kept verbatim.
    pub fn parse(raw: &str) -> Result<Self, MalformedNotation> {
        let bytes = raw.as_bytes();
        let mut pos = bytes
            .iter()
            .position(|b| !b.is_ascii_whitespace())
            .ok_or(malformed(raw.len(), "empty notation"))?;
        if !bytes[pos].is_ascii_digit() {
            return Err(malformed(pos, "notation must start with a digit"));
        }

        let mut base: Vec<String> = Vec::new();
        let mut run = None;
        while pos < bytes.len() {
            let b = bytes[pos];
            let kind = if b.is_ascii_digit() {
                Run::Digits
            } else if b.is_ascii_uppercase() {
                Run::Letters
            } else if b.is_ascii_whitespace() {
                pos += 1;
                continue;
            } else if b == b'(' {
                break;
            } else if b == b')' {
                return Err(malformed(pos, "unbalanced ')'"));
            } else {
                return Err(malformed(pos, "unexpected character in base"));
            };
            if run == Some(kind) {
                base.last_mut().unwrap().push(b as char);
            } else {
                base.push((b as char).to_string());
                run = Some(kind);
            }
            pos += 1;
        }

        let mut qualifiers = Vec::new();
        let mut keys = Vec::new();
        while pos < bytes.len() {
            let b = bytes[pos];
            if b.is_ascii_whitespace() {
                pos += 1;
                continue;
            }
            if b == b')' {
                return Err(malformed(pos, "unbalanced ')'"));
            }
            if b != b'(' {
                return Err(malformed(pos, "unexpected character after group"));
            }
            let open = pos;
            let body_start = open + 1;
            let mut close = None;
            for (i, &c) in bytes.iter().enumerate().skip(body_start) {
                match c {
                    b')' => {
                        close = Some(i);
                        break;
                    }
                    b'(' => return Err(malformed(i, "nested '(' inside group")),
                    _ => {}
                }
            }
            let close = close.ok_or(malformed(open, "unbalanced '('"))?;
            // Group delimiters are ASCII, so both ends sit on char boundaries.
            let body = &raw[body_start..close];
            match body.strip_prefix('+') {
                Some(key) if key.starts_with('+') => {
                    return Err(malformed(body_start + 1, "key may not start with '+'"))
                }
                Some(key) => keys.push(key.to_string()),
                None => qualifiers.push(body.to_string()),
            }
            pos = close + 1;
        }

        Ok(IconclassNotation {
            raw: raw.to_string(),
            base,
            keys,
            qualifiers,
        })
    }

    /// Like [`parse`](Self::parse) but accepts arbitrary bytes; invalid
    /// UTF-8 is reported at the first bad byte.
    pub fn parse_bytes(raw: &[u8]) -> Result<Self, MalformedNotation> {
        match std::str::from_utf8(raw) {
            Ok(s) => Self::parse(s),
            Err(e) => Err(malformed(e.valid_up_to(), "invalid UTF-8")),
        }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn base(&self) -> &[String] {
        &self.base
    }

    pub fn qualifiers(&self) -> &[String] {
        &self.qualifiers
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    /// The next notation up the hierarchy.
    ///
    /// Groups are peeled first (keys before qualifiers, last one first), then
    /// the base loses its final character. A one-character base without
    /// groups is a root.
    pub fn parent(&self) -> Option<IconclassNotation> {
        let mut next = self.clone();
        if next.keys.pop().is_none() && next.qualifiers.pop().is_none() {
            let last = next.base.last_mut()?;
            last.pop();
            if last.is_empty() {
                next.base.pop();
            }
            if next.base.is_empty() {
                return None;
            }
        }
        next.raw = next.to_string();
        Some(next)
    }

    /// Iterator over `parent`, `parent.parent`, ... up to the root.
    pub fn ancestors(&self) -> impl Iterator<Item = IconclassNotation> {
        std::iter::successors(self.parent(), |n| n.parent())
    }
}

impl fmt::Display for IconclassNotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for segment in &self.base {
            f.write_str(segment)?;
        }
        for q in &self.qualifiers {
            write!(f, "({q})")?;
        }
        for k in &self.keys {
            write!(f, "(+{k})")?;
        }
        Ok(())
    }
}

impl FromStr for IconclassNotation {
    type Err = MalformedNotation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Canonical lookup form of a notation string: whitespace outside
/// parentheses removed, everything else byte-for-byte.
///
/// Works on strings the parser would reject too, so correlate tables can hold
/// notations outside the supported grammar.
pub fn normalize_notation(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut depth = 0usize;
    for c in raw.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c.is_whitespace() && depth == 0 => continue,
            _ => {}
        }
        out.push(c);
    }
    out
}
