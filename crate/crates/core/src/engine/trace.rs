use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Algorithm;
use crate::accountant::CompositionPlan;
use crate::generation::Token;
use crate::mechanisms::{TokenHistogram, TokenId};
use crate::retrieval::{RetrievalResult, VoterPartition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepVerdict {
    /// The non-RAG token was common among voters and was emitted for free.
    SparsePass,
    /// The token came from the private selector and cost one unit of budget.
    PrivateVote,
    /// Non-private algorithms.
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    Eos,
    /// The private selector's cutoff candidate won; treated as end of sequence.
    NullToken,
    BudgetExhausted,
    CapReached,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub voter_tokens: Option<Vec<TokenId>>,
    pub non_rag_token: Option<TokenId>,
    pub histogram: Option<TokenHistogram>,
    pub verdict: StepVerdict,
    /// `None` when the selector returned its cutoff candidate.
    pub emitted_token: Option<Token>,
    pub budget_remaining_after: Option<u64>,
}

/// Everything a run did, in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationTrace {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub plan: Option<CompositionPlan>,
    pub retrieval: Option<RetrievalResult>,
    pub partition: Option<VoterPartition>,
    pub steps: Vec<StepRecord>,
    /// Emitted tokens without the final end-of-sequence token.
    pub final_answer: Vec<Token>,
    pub halt_reason: HaltReason,
    pub vocabulary_extensions: Vec<Token>,
}

impl GenerationTrace {
    /// Answer surfaces joined by single spaces.
    pub fn answer_text(&self) -> String {
        let parts: Vec<&str> = self.final_answer.iter().map(|t| t.surface.as_str()).collect();
        parts.join(" ")
    }

    pub fn private_votes(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.verdict == StepVerdict::PrivateVote)
            .count()
    }

    pub fn token_count(&self) -> usize {
        self.final_answer.len()
    }
}
