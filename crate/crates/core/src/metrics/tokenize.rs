use std::collections::HashMap;
use std::fmt;

/// Characters that always become standalone tokens.
pub const PUNCTUATION: &[char] = &['.', ',', ':', ';', '!', '?', '\'', '"', '(', ')', '-'];

/// Lowercased tokens; none empty, none containing whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSequence(Vec<String>);

impl TokenSequence {
    /// Wraps pre-split tokens, lowercasing them. Returns `None` if a token is
    /// empty or contains whitespace.
    pub fn from_tokens<I, S>(tokens: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        tokens
            .into_iter()
            .map(|t| {
                let t = t.as_ref();
                (!t.is_empty() && !t.chars().any(char::is_whitespace)).then(|| t.to_lowercase())
            })
            .collect::<Option<Vec<_>>>()
            .map(TokenSequence)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Copy without the single-character punctuation tokens.
    pub fn without_punctuation(&self) -> TokenSequence {
        TokenSequence(
            self.0
                .iter()
                .filter(|t| !is_punctuation(t))
                .cloned()
                .collect(),
        )
    }
}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

pub fn is_punctuation(token: &str) -> bool {
    let mut chars = token.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if PUNCTUATION.contains(&c))
}

/// Lowercases, splits on whitespace and cuts every punctuation character out
/// as its own token: `"Christ-child."` → `christ - child .`.
pub fn tokenize(text: &str) -> TokenSequence {
    let lower = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in lower.chars() {
        if c.is_whitespace() || PUNCTUATION.contains(&c) {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            if !c.is_whitespace() {
                tokens.push(c.to_string());
            }
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    TokenSequence(tokens)
}

/// Multiset of the `n`-grams of `tokens`.
pub(crate) fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).0
    }

    #[test]
    fn splits_punctuation() {
        assert_eq!(toks("New Testament."), ["new", "testament", "."]);
        assert_eq!(toks("sailing-ship"), ["sailing", "-", "ship"]);
        assert_eq!(
            toks("Madonna: i.e. Mary"),
            ["madonna", ":", "i", ".", "e", ".", "mary"]
        );
        assert_eq!(toks("  \t"), Vec::<String>::new());
        assert_eq!(toks(""), Vec::<String>::new());
    }

    #[test]
    fn strip_punctuation() {
        let t = tokenize("arms, fingers.").without_punctuation();
        assert_eq!(t.tokens(), ["arms", "fingers"]);
    }

    #[test]
    fn from_tokens_validates() {
        assert!(TokenSequence::from_tokens(["a", ""]).is_none());
        assert!(TokenSequence::from_tokens(["a b"]).is_none());
        assert_eq!(TokenSequence::from_tokens(["A"]).unwrap().tokens(), ["a"]);
    }

    #[test]
    fn ngram_multiset() {
        let t = tokenize("a b a b");
        let bigrams = ngram_counts(t.tokens(), 2);
        assert_eq!(bigrams.len(), 2);
        assert_eq!(bigrams[&t.tokens()[0..2]], 2);
        assert!(ngram_counts(t.tokens(), 5).is_empty());
    }
}
