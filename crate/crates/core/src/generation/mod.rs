//! Next-token generators.
//!
//! A generator maps (question, documents, prefix) to exactly one token with
//! greedy decoding. Voting runs one generator call per voter; the non-RAG
//! call passes an empty document list.

mod ngram;
mod prompt;
mod scripted;
mod vocab;

use alloc::vec::Vec;

pub use ngram::{NgramConfig, NgramModel};
pub use prompt::{context_key, PromptTemplate};
pub use scripted::{DocsPattern, ScriptRule, ScriptTable, ScriptedGenerator};
pub use vocab::{Token, Vocabulary, EOS_ID, EOS_SURFACE};

pub use crate::mechanisms::TokenId;
use crate::retrieval::Document;
use crate::Result;

/// Inputs of one next-token call.
#[derive(Clone, Copy, Debug)]
pub struct GenerationContext<'a> {
    pub question: &'a str,
    pub documents: &'a [Document],
    pub prefix: &'a [Token],
}

impl<'a> GenerationContext<'a> {
    pub fn new(question: &'a str, documents: &'a [Document], prefix: &'a [Token]) -> Self {
        Self {
            question,
            documents,
            prefix,
        }
    }

    /// The same question and prefix with no documents.
    pub fn without_documents(&self) -> Self {
        Self {
            documents: &[],
            ..*self
        }
    }
}

pub trait Generator {
    fn next_token(&self, ctx: &GenerationContext<'_>) -> Result<Token>;

    /// One token per context, in order. Implementations may serve the calls
    /// concurrently; the default runs them one after another.
    fn next_tokens(&self, ctxs: &[GenerationContext<'_>]) -> Result<Vec<Token>> {
        ctxs.iter().map(|c| self.next_token(c)).collect()
    }

    /// Tokens added to the vocabulary since the last call. Generators with a
    /// fixed vocabulary return nothing.
    fn take_vocabulary_extensions(&self) -> Vec<Token> {
        Vec::new()
    }
}

impl<G: Generator + ?Sized> Generator for &G {
    fn next_token(&self, ctx: &GenerationContext<'_>) -> Result<Token> {
        (**self).next_token(ctx)
    }

    fn next_tokens(&self, ctxs: &[GenerationContext<'_>]) -> Result<Vec<Token>> {
        (**self).next_tokens(ctxs)
    }

    fn take_vocabulary_extensions(&self) -> Vec<Token> {
        (**self).take_vocabulary_extensions()
    }
}

impl<G: Generator + ?Sized> Generator for alloc::boxed::Box<G> {
    fn next_token(&self, ctx: &GenerationContext<'_>) -> Result<Token> {
        (**self).next_token(ctx)
    }

    fn next_tokens(&self, ctxs: &[GenerationContext<'_>]) -> Result<Vec<Token>> {
        (**self).next_tokens(ctxs)
    }

    fn take_vocabulary_extensions(&self) -> Vec<Token> {
        (**self).take_vocabulary_extensions()
    }
}
