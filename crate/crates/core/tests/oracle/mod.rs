//! Independent reference scorers used as test oracles. Nothing here calls
//! into the library's metric code.

#![allow(dead_code)]

/// Tokens of a caption with punctuation dropped: lowercase, every
/// non-alphanumeric character acts as a separator.
pub fn words(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(String::from)
        .collect()
}

fn grams(tokens: &[String], n: usize) -> Vec<String> {
    if tokens.len() < n {
        return vec![];
    }
    (0..=tokens.len() - n)
        .map(|i| tokens[i..i + n].join(" "))
        .collect()
}

/// Sentence BLEU from first principles: linear-scan n-gram counting,
/// clipping against one reference, zero precisions replaced by `eps`.
pub fn bleu(candidate: &[String], reference: &[String], max_n: usize, eps: f64) -> f64 {
    if candidate.is_empty() {
        return 0.0;
    }
    let mut product = 1.0f64;
    for n in 1..=max_n {
        let cand = grams(candidate, n);
        let mut refs = grams(reference, n);
        let mut hits = 0usize;
        for g in &cand {
            if let Some(pos) = refs.iter().position(|r| r == g) {
                refs.remove(pos);
                hits += 1;
            }
        }
        let p = if hits == 0 {
            eps
        } else {
            hits as f64 / cand.len() as f64
        };
        product *= p;
    }
    let c = candidate.len() as f64;
    let r = reference.len() as f64;
    let bp = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
    product.powf(1.0 / max_n as f64) * bp
}

/// Brevity penalty alone.
pub fn brevity_penalty(candidate_len: usize, reference_len: usize) -> f64 {
    if candidate_len == 0 {
        0.0
    } else if candidate_len >= reference_len {
        1.0
    } else {
        (1.0 - reference_len as f64 / candidate_len as f64).exp()
    }
}

fn is_subsequence<T: PartialEq>(needle: &[&T], hay: &[T]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == *n))
}

/// Longest common subsequence by enumerating every subsequence of the
/// shorter input. Exponential; only for short sequences.
pub fn brute_force_lcs<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    assert!(short.len() <= 16, "brute force LCS is exponential");
    let mut best = 0;
    for mask in 0u32..(1 << short.len()) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let pick: Vec<&T> = (0..short.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &short[i])
            .collect();
        if is_subsequence(&pick, long) {
            best = size;
        }
    }
    best
}

/// ROUGE-L F-measure from an LCS length.
pub fn rouge_l_from_lcs(lcs: usize, cand_len: usize, ref_len: usize, beta: f64) -> f64 {
    if lcs == 0 {
        return 0.0;
    }
    let r = lcs as f64 / ref_len as f64;
    let p = lcs as f64 / cand_len as f64;
    let b2 = beta * beta;
    (1.0 + b2) * r * p / (r + b2 * p)
}
