//! Generation loops: Non-RAG, VoteRAG, DPVoteRAG and DPSparseVoteRAG.
//!
//! Randomness is drawn from per-purpose streams of the run seed (see
//! [`crate::rng`]). Within a step all generator calls finish before any noise
//! is drawn, and the gate's query noise precedes the selector's noise.

mod config;
mod loops;
mod trace;

pub use config::{Algorithm, RunConfig, DEFAULT_DOMAIN_SIZE, DEFAULT_T_MAX_CAP};
pub use loops::{run, run_dp_sparse_vote_rag, run_dp_vote_rag, run_non_rag, run_vote_rag};
pub use trace::{GenerationTrace, HaltReason, StepRecord, StepVerdict};
