use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::text::words;

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts = BTreeMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Arithmetic mean of clipped n-gram precisions for `n = 1..=min(4, len)`.
///
/// An order with no match scores `1 / (total + 1)` (add-one smoothing). An
/// empty candidate scores 0.
pub fn bleu_precision(candidate: &str, reference: &str) -> f64 {
    let cand = words(candidate);
    let reference = words(reference);
    let max_n = cand.len().min(4);
    if max_n == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for n in 1..=max_n {
        let ref_counts = ngram_counts(&reference, n);
        let cand_counts = ngram_counts(&cand, n);
        let total = (cand.len() + 1 - n) as f64;
        let clipped: usize = cand_counts
            .iter()
            .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
            .sum();
        sum += if clipped == 0 {
            1.0 / (total + 1.0)
        } else {
            clipped as f64 / total
        };
    }
    sum / max_n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    #[test]
    fn identical_is_one() {
        assert_eq!(bleu_precision("the cat sat on the mat", "the cat sat on the mat"), 1.0);
        assert_eq!(bleu_precision("hi", "hi"), 1.0);
    }

    #[test]
    fn empty_candidate_is_zero() {
        assert_eq!(bleu_precision("", "anything"), 0.0);
    }

    #[test]
    fn two_word_example() {
        // unigram 1/2; bigram "a b" unmatched -> (0 + 1) / (1 + 1)
        assert!((bleu_precision("a b", "a c") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn disjoint_twenty_word_strings() {
        let cand: Vec<String> = (0..20).map(|i| format!("c{i}")).collect();
        let refr: Vec<String> = (0..20).map(|i| format!("r{i}")).collect();
        let got = bleu_precision(&cand.join(" "), &refr.join(" "));
        // by hand: (1/21 + 1/20 + 1/19 + 1/18) / 4
        let want = (1.0 / 21.0 + 1.0 / 20.0 + 1.0 / 19.0 + 1.0 / 18.0) / 4.0;
        assert!((got - want).abs() < 1e-12);
        assert!((got - 0.051_451_5).abs() < 1e-6);
    }

    #[test]
    fn clipping_limits_repeats() {
        // "the the the" vs "the cat": unigram clipped to 1/3, bigram/trigram unmatched
        let want = (1.0 / 3.0 + 1.0 / 3.0 + 1.0 / 2.0) / 3.0;
        assert!((bleu_precision("the the the", "the cat") - want).abs() < 1e-12);
    }

    #[test]
    fn not_symmetric() {
        assert_ne!(bleu_precision("a b", "a b c d"), bleu_precision("a b c d", "a b"));
    }

    proptest! {
        #[test]
        fn one_iff_all_ngrams_covered(
            reference in prop::collection::vec(0u8..4, 1..10),
            cand in prop::collection::vec(0u8..4, 1..6),
        ) {
            let r: Vec<String> = reference.iter().map(|w| format!("w{w}")).collect();
            let c: Vec<String> = cand.iter().map(|w| format!("w{w}")).collect();
            let covered = (1..=c.len().min(4)).all(|n| {
                let rc = ngram_counts(&r, n);
                ngram_counts(&c, n).iter().all(|(g, &k)| rc.get(g).copied().unwrap_or(0) >= k)
            });
            let score = bleu_precision(&c.join(" "), &r.join(" "));
            prop_assert!((0.0..=1.0).contains(&score));
            prop_assert_eq!(score == 1.0, covered);
        }
    }
}
