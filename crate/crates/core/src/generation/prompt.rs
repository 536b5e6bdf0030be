use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::GenerationContext;
use crate::{Error, Result};

/// Prompt template with `{documents}`, `{question}` and `{prefix}` slots.
///
/// Documents are joined by newlines and the prefix by spaces. The
/// end-of-sequence token never appears in a prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PromptTemplate {
    template: String,
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self {
            template: String::from("{documents}\nQuestion: {question}\nAnswer: {prefix}"),
        }
    }
}

impl PromptTemplate {
    pub fn new(template: impl Into<String>) -> Result<Self> {
        let template = template.into();
        for slot in ["{documents}", "{question}", "{prefix}"] {
            if !template.contains(slot) {
                return Err(Error::InvalidArgument(alloc::format!("prompt template lacks {slot}")));
            }
        }
        Ok(Self { template })
    }

    pub fn as_str(&self) -> &str {
        &self.template
    }

    pub fn render(&self, ctx: &GenerationContext<'_>) -> String {
        self.render_docs(ctx, 0)
    }

    fn render_docs(&self, ctx: &GenerationContext<'_>, skip: usize) -> String {
        let documents: Vec<&str> = ctx.documents[skip..].iter().map(|d| d.text.as_str()).collect();
        let prefix: Vec<&str> = ctx
            .prefix
            .iter()
            .filter(|t| !t.is_eos())
            .map(|t| t.surface.as_str())
            .collect();
        self.template
            .replace("{documents}", &documents.join("\n"))
            .replace("{question}", ctx.question)
            .replace("{prefix}", &prefix.join(" "))
    }

    /// Renders, dropping the earliest documents until the prompt fits in
    /// `window` whitespace-separated words.
    pub fn render_within(&self, ctx: &GenerationContext<'_>, window: usize) -> Result<String> {
        for skip in 0..=ctx.documents.len() {
            let rendered = self.render_docs(ctx, skip);
            let needed = rendered.split_whitespace().count();
            if needed <= window {
                return Ok(rendered);
            }
            if skip == ctx.documents.len() {
                return Err(Error::ContextOverflow { needed, window });
            }
        }
        unreachable!()
    }
}

/// Lowercase hex SHA-256 of a rendered prompt.
pub fn context_key(rendered: &str) -> String {
    let digest = Sha256::digest(rendered.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest.iter() {
        let _ = write!(out, "{byte:02x}");
    }
    out
}
