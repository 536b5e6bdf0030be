//! Retrieval of the m·k most relevant documents and their uniform split
//! into voter shards.

mod partition;
mod tfidf;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use partition::{partition, VoterPartition};
pub use tfidf::TfIdfIndex;

use crate::Result;

/// One record of the knowledge source. Each document belongs to exactly one
/// individual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    pub owner_id: String,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, text: impl Into<String>, owner_id: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            text: text.into(),
            owner_id: owner_id.into(),
        }
    }
}

/// Ranked document ids, most relevant first, with their scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub ranked: Vec<String>,
    pub scores: Vec<f64>,
}

impl RetrievalResult {
    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }
}

/// A deterministic retriever over a fixed corpus.
pub trait Retriever {
    /// The `count` most relevant documents. Fails with
    /// [`Error::InsufficientCorpus`](crate::Error::InsufficientCorpus) when
    /// the corpus is smaller than `count`.
    fn retrieve(&self, question: &str, count: usize) -> Result<RetrievalResult>;

    fn document(&self, doc_id: &str) -> Option<&Document>;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
