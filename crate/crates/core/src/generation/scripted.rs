use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::prompt::{context_key, PromptTemplate};
use super::{GenerationContext, Generator, Token, Vocabulary, EOS_SURFACE};
use crate::mechanisms::TokenId;
use crate::Result;

/// Which document sets a [`ScriptRule`] applies to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocsPattern {
    Any,
    /// The non-RAG call.
    Empty,
    NonEmpty,
    /// At least one document's text contains the string.
    Containing(String),
    /// Exactly these document ids, in any order.
    Ids(Vec<String>),
}

impl DocsPattern {
    fn matches(&self, ctx: &GenerationContext<'_>) -> bool {
        match self {
            DocsPattern::Any => true,
            DocsPattern::Empty => ctx.documents.is_empty(),
            DocsPattern::NonEmpty => !ctx.documents.is_empty(),
            DocsPattern::Containing(needle) => ctx.documents.iter().any(|d| d.text.contains(needle.as_str())),
            DocsPattern::Ids(ids) => {
                ids.len() == ctx.documents.len()
                    && ctx.documents.iter().all(|d| ids.iter().any(|i| *i == d.doc_id))
            }
        }
    }
}

/// A pattern over contexts. `question: None` matches any question; the
/// prefix must match exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptRule {
    #[serde(default)]
    pub question: Option<String>,
    #[serde(default = "any_docs")]
    pub documents: DocsPattern,
    #[serde(default)]
    pub prefix: Vec<String>,
    pub token: String,
}

fn any_docs() -> DocsPattern {
    DocsPattern::Any
}

impl ScriptRule {
    fn matches(&self, ctx: &GenerationContext<'_>) -> bool {
        self.question.as_deref().map_or(true, |q| q == ctx.question)
            && self.documents.matches(ctx)
            && self.prefix.len() == ctx.prefix.len()
            && self.prefix.iter().zip(ctx.prefix).all(|(p, t)| *p == t.surface)
    }
}

/// On-disk form of a scripted generator.
///
/// `entries` maps [`context_key`] of the rendered prompt to a token surface;
/// they are consulted before `rules`, which are tried in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptTable {
    #[serde(default)]
    pub template: Option<PromptTemplate>,
    #[serde(default)]
    pub entries: BTreeMap<String, String>,
    #[serde(default)]
    pub rules: Vec<ScriptRule>,
    #[serde(default = "eos_string")]
    pub fallback: String,
}

fn eos_string() -> String {
    String::from(EOS_SURFACE)
}

impl Default for ScriptTable {
    fn default() -> Self {
        Self {
            template: None,
            entries: BTreeMap::new(),
            rules: Vec::new(),
            fallback: eos_string(),
        }
    }
}

/// Lookup-table generator for tests and fixed scenarios.
#[derive(Clone, Debug)]
pub struct ScriptedGenerator {
    template: PromptTemplate,
    vocab: Vocabulary,
    entries: BTreeMap<String, TokenId>,
    rules: Vec<(ScriptRule, TokenId)>,
    fallback: TokenId,
}

impl ScriptedGenerator {
    /// Token ids follow ascending surface order (after EOS).
    pub fn from_table(table: ScriptTable) -> Self {
        let mut surfaces: Vec<&str> = table
            .entries
            .values()
            .map(String::as_str)
            .chain(table.rules.iter().map(|r| r.token.as_str()))
            .chain(core::iter::once(table.fallback.as_str()))
            .collect();
        surfaces.sort_unstable();
        let mut vocab = Vocabulary::new();
        for s in surfaces {
            vocab.intern(s);
        }
        let entries = table
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), vocab.intern(v)))
            .collect();
        let rules = table
            .rules
            .into_iter()
            .map(|r| {
                let id = vocab.intern(&r.token);
                (r, id)
            })
            .collect();
        let fallback = vocab.intern(&table.fallback);
        Self {
            template: table.template.unwrap_or_default(),
            vocab,
            entries,
            rules,
            fallback,
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn template(&self) -> &PromptTemplate {
        &self.template
    }
}

impl Generator for ScriptedGenerator {
    fn next_token(&self, ctx: &GenerationContext<'_>) -> Result<Token> {
        let id = if self.entries.is_empty() {
            None
        } else {
            self.entries.get(&context_key(&self.template.render(ctx))).copied()
        };
        let id = id
            .or_else(|| self.rules.iter().find(|(r, _)| r.matches(ctx)).map(|(_, id)| *id))
            .unwrap_or(self.fallback);
        Ok(self.vocab.token(id).expect("scripted ids are interned at construction"))
    }
}
