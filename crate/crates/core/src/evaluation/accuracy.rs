use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// A question with every acceptable answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QaExample {
    pub question: String,
    pub answers: Vec<String>,
}

/// Lowercases, removes punctuation and collapses whitespace.
pub fn normalize_answer(text: &str) -> String {
    let cleaned: String = text
        .chars()
        .filter(|c| !(c.is_ascii_punctuation() || matches!(c, '\u{2018}' | '\u{2019}' | '\u{201c}' | '\u{201d}' | '\u{2026}')))
        .flat_map(char::to_lowercase)
        .collect();
    let parts: Vec<&str> = cleaned.split_whitespace().collect();
    parts.join(" ")
}

/// 1 when the normalized prediction contains any normalized answer.
pub fn match_accuracy<S: AsRef<str>>(prediction: &str, answers: &[S]) -> u8 {
    let prediction = normalize_answer(prediction);
    if prediction.is_empty() {
        return 0;
    }
    let hit = answers.iter().any(|a| {
        let a = normalize_answer(a.as_ref());
        !a.is_empty() && prediction.contains(a.as_str())
    });
    u8::from(hit)
}
