//! Differentially private retrieval-augmented generation.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//!  - [`mechanisms`]: Laplace and Gumbel samplers, the limited-domain private
//!    top-1 selector and the above-threshold (sparse vector) gate.
//!  - [`accountant`]: how many private releases a total budget affords under
//!    sequential and advanced composition, plus a run-time ledger.
//!  - [`generation`]: the next-token generator abstraction with scripted and
//!    n-gram implementations.
//!  - [`retrieval`]: a TF-IDF retriever and the uniform voter partition.
//!  - [`engine`]: the Non-RAG, VoteRAG, DPVoteRAG and DPSparseVoteRAG loops.
//!  - [`evaluation`]: match accuracy, BLEU precision, membership-inference
//!    scoring and ROC/AUC.
//!
//! IO, the remote HTTP generator, experiment sweeps and the CLI live in the
//! `dprag` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod budget;
mod error;

pub mod accountant;
pub mod engine;
pub mod evaluation;
pub mod generation;
pub mod mechanisms;
pub mod retrieval;
pub mod rng;
pub mod synth;
pub mod text;

pub use budget::PrivacyBudget;
pub use error::{Error, Result};
