//! Word-level tokenization shared by generators, retrieval and metrics.

use alloc::string::String;
use alloc::vec::Vec;

/// Splits on whitespace, lowercases, and trims leading/trailing punctuation.
///
/// A piece made only of punctuation (such as `###`) is kept as-is.
pub fn words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| {
            let trimmed = raw.trim_matches(|c: char| c.is_ascii_punctuation());
            let piece = if trimmed.is_empty() { raw } else { trimmed };
            piece.to_lowercase()
        })
        .collect()
}

/// Lowercased alphanumeric runs; everything else separates terms.
pub fn terms(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn words_trim_punctuation() {
        assert_eq!(
            words("The Great Gatsby, is a novel. ### Doctor's"),
            vec!["the", "great", "gatsby", "is", "a", "novel", "###", "doctor's"]
        );
    }

    #[test]
    fn terms_split_on_non_alphanumeric() {
        assert_eq!(terms("Hi-there, Doctor's 2nd"), vec!["hi", "there", "doctor", "s", "2nd"]);
    }
}
