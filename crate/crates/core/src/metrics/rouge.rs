use super::tokenize::TokenSequence;
use super::EvalPair;

pub const DEFAULT_BETA: f64 = 1.2;

/// Length of the longest common subsequence, two-row dynamic programming.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn rouge_l_single(candidate: &TokenSequence, reference: &TokenSequence, beta: f64) -> f64 {
    let lcs = lcs_len(candidate.tokens(), reference.tokens());
    if lcs == 0 {
        return 0.0;
    }
    let recall = lcs as f64 / reference.len() as f64;
    let precision = lcs as f64 / candidate.len() as f64;
    let b2 = beta * beta;
    ((1.0 + b2) * recall * precision) / (recall + b2 * precision)
}

/// LCS-based F-measure weighted toward recall by `beta`; best over references.
pub fn rouge_l(pair: &EvalPair, beta: f64) -> f64 {
    pair.references
        .iter()
        .map(|r| rouge_l_single(&pair.candidate, r, beta))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcs_basics() {
        assert_eq!(lcs_len(b"abcbdab", b"bdcaba"), 4);
        assert_eq!(lcs_len::<u8>(b"", b"abc"), 0);
        assert_eq!(lcs_len(b"abc", b"abc"), 3);
    }

    #[test]
    fn identity_and_disjoint() {
        assert_eq!(
            rouge_l(&EvalPair::from_text("x", "a b c", ["a b c"]), DEFAULT_BETA),
            1.0
        );
        assert_eq!(
            rouge_l(&EvalPair::from_text("x", "a b", ["c d"]), DEFAULT_BETA),
            0.0
        );
        assert_eq!(
            rouge_l(&EvalPair::from_text("x", "", ["c d"]), DEFAULT_BETA),
            0.0
        );
    }

    #[test]
    fn best_reference_wins() {
        let p = EvalPair::from_text("x", "a b", ["c", "a b"]);
        assert_eq!(rouge_l(&p, DEFAULT_BETA), 1.0);
    }
}
