//! Utility and empirical-privacy metrics.

mod accuracy;
mod bleu;
mod mia;
mod roc;

pub use accuracy::{match_accuracy, normalize_answer, QaExample};
pub use bleu::bleu_precision;
pub use mia::{s2mia_score, split_document, Membership, MiaExample, MIA_DELIMITER};
pub use roc::{roc_auc, RocCurve};
