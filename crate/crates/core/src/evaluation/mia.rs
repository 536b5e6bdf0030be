use alloc::boxed::Box;
use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};

use super::bleu::bleu_precision;
use crate::retrieval::Document;
use crate::{Error, Result};

/// Separates the patient's query from the doctor's answer in a document.
pub const MIA_DELIMITER: &str = "###";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    In,
    Out,
}

/// A target document split into the part sent to the system and the part
/// its answer is compared against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiaExample {
    pub doc: Document,
    pub query_part: String,
    pub ground_truth_answer: String,
    pub membership: Membership,
}

/// Splits at the first delimiter; both halves are trimmed.
pub fn split_document(text: &str) -> Option<(String, String)> {
    let (q, a) = text.split_once(MIA_DELIMITER)?;
    Some((q.trim().to_string(), a.trim().to_string()))
}

impl MiaExample {
    pub fn new(doc: Document, membership: Membership) -> Result<Self> {
        let (query_part, ground_truth_answer) = split_document(&doc.text).ok_or_else(|| {
            Error::InvalidArgument(alloc::format!("document {} lacks the {MIA_DELIMITER} delimiter", doc.doc_id))
        })?;
        Ok(Self {
            doc,
            query_part,
            ground_truth_answer,
            membership,
        })
    }
}

/// BLEU precision of the system's answer to the query half against the
/// ground-truth half. Higher means more likely a member.
pub fn s2mia_score<F>(example: &MiaExample, mut system: F) -> Result<f64>
where
    F: FnMut(&str) -> Result<String>,
{
    let answer = system(&example.query_part).map_err(|e| Error::Example {
        id: example.doc.doc_id.clone(),
        source: Box::new(e),
    })?;
    Ok(bleu_precision(&answer, &example.ground_truth_answer))
}
