//! Next-token generator backed by a completion-style HTTP endpoint.

use std::sync::{Condvar, Mutex, PoisonError};
use std::time::Duration;

use dprag_core::generation::{GenerationContext, Generator, PromptTemplate, Token, Vocabulary};
use dprag_core::text::words;
use dprag_core::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the bearer token, if any.
    pub token_env: Option<String>,
    /// Dotted path to the completion text; numeric parts index arrays.
    pub response_path: String,
    pub timeout_secs: f64,
    pub max_in_flight: usize,
    /// Extra attempts after a transport failure or a 5xx status.
    pub retries: u32,
    /// Prompt budget in words; oldest documents are dropped to fit.
    pub window_words: Option<usize>,
    pub template: PromptTemplate,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self {
            endpoint: String::new(),
            model: String::new(),
            token_env: None,
            response_path: "choices.0.text".into(),
            timeout_secs: 30.0,
            max_in_flight: 4,
            retries: 2,
            window_words: None,
            template: PromptTemplate::default(),
        }
    }
}

/// Counting semaphore over a mutex and condvar.
struct Slots {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Slots {
    fn acquire(&self) -> SlotGuard<'_> {
        let mut free = self.free.lock().unwrap_or_else(PoisonError::into_inner);
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(PoisonError::into_inner);
        }
        *free -= 1;
        SlotGuard(self)
    }
}

struct SlotGuard<'a>(&'a Slots);

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(PoisonError::into_inner) += 1;
        self.0.cv.notify_one();
    }
}

pub struct RemoteGenerator {
    cfg: RemoteConfig,
    client: reqwest::blocking::Client,
    bearer: Option<String>,
    slots: Slots,
    vocab: Mutex<Vocabulary>,
    fresh: Mutex<Vec<Token>>,
}

fn backend(status: Option<u16>, message: impl Into<String>) -> Error {
    Error::Backend {
        status,
        message: message.into(),
    }
}

fn excerpt(body: &str) -> String {
    body.chars().take(200).collect()
}

/// Follows `path` through objects and arrays to a string.
pub fn extract_text<'a>(body: &'a Value, path: &str) -> Option<&'a str> {
    let mut node = body;
    for part in path.split('.').filter(|p| !p.is_empty()) {
        node = match part.parse::<usize>() {
            Ok(i) => node.get(i)?,
            Err(_) => node.get(part)?,
        };
    }
    node.as_str()
}

impl RemoteGenerator {
    /// Reads the bearer token from the configured environment variable.
    pub fn new(cfg: RemoteConfig) -> Result<Self> {
        if cfg.endpoint.is_empty() {
            return Err(Error::InvalidArgument("remote generator needs an endpoint".into()));
        }
        if cfg.max_in_flight == 0 {
            return Err(Error::InvalidArgument("max_in_flight must be at least 1".into()));
        }
        if !(cfg.timeout_secs.is_finite() && cfg.timeout_secs > 0.0) {
            return Err(Error::InvalidArgument("timeout must be positive".into()));
        }
        let bearer = match &cfg.token_env {
            Some(var) => Some(
                std::env::var(var).map_err(|_| Error::InvalidArgument(format!("environment variable {var} is not set")))?,
            ),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(cfg.timeout_secs))
            .build()
            .map_err(|e| backend(None, e.to_string()))?;
        Ok(Self {
            slots: Slots {
                free: Mutex::new(cfg.max_in_flight),
                cv: Condvar::new(),
            },
            cfg,
            client,
            bearer,
            vocab: Mutex::new(Vocabulary::new()),
            fresh: Mutex::new(Vec::new()),
        })
    }

    pub fn vocabulary(&self) -> Vocabulary {
        self.vocab.lock().unwrap_or_else(PoisonError::into_inner).clone()
    }

    fn prompt(&self, ctx: &GenerationContext<'_>) -> Result<String> {
        match self.cfg.window_words {
            Some(w) => self.cfg.template.render_within(ctx, w),
            None => Ok(self.cfg.template.render(ctx)),
        }
    }

    fn post_once(&self, prompt: &str) -> Result<String> {
        let body = json!({
            "model": self.cfg.model,
            "prompt": prompt,
            "max_tokens": 1,
            "temperature": 0,
        });
        let mut req = self.client.post(&self.cfg.endpoint).json(&body);
        if let Some(token) = &self.bearer {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| backend(None, e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| backend(Some(status.as_u16()), e.to_string()))?;
        if !status.is_success() {
            return Err(backend(Some(status.as_u16()), excerpt(&text)));
        }
        let value: Value =
            serde_json::from_str(&text).map_err(|e| backend(Some(status.as_u16()), format!("{e}: {}", excerpt(&text))))?;
        extract_text(&value, &self.cfg.response_path)
            .map(str::to_owned)
            .ok_or_else(|| backend(Some(status.as_u16()), format!("no text at {}: {}", self.cfg.response_path, excerpt(&text))))
    }

    /// The completion text for one context, with retries.
    fn complete(&self, ctx: &GenerationContext<'_>) -> Result<String> {
        let prompt = self.prompt(ctx)?;
        let _slot = self.slots.acquire();
        let mut attempt = 0;
        loop {
            match self.post_once(&prompt) {
                Err(Error::Backend { status, .. }) if attempt < self.cfg.retries && status.map_or(true, |s| s >= 500) => {
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    /// First whitespace-delimited piece, normalized like every other word;
    /// nothing at all means end of sequence.
    fn to_token(&self, text: &str) -> Token {
        let mut vocab = self.vocab.lock().unwrap_or_else(PoisonError::into_inner);
        let Some(piece) = text.split_whitespace().next() else {
            return vocab.eos();
        };
        let surface = words(piece).pop().unwrap_or_default();
        let before = vocab.len();
        let id = vocab.intern(&surface);
        let token = vocab.token(id).expect("just interned");
        if vocab.len() > before {
            self.fresh.lock().unwrap_or_else(PoisonError::into_inner).push(token.clone());
        }
        token
    }
}

impl Generator for RemoteGenerator {
    fn next_token(&self, ctx: &GenerationContext<'_>) -> Result<Token> {
        let text = self.complete(ctx)?;
        Ok(self.to_token(&text))
    }

    /// Requests run concurrently (bounded by `max_in_flight`); new surfaces
    /// are interned afterwards in context order so ids do not depend on
    /// response timing.
    fn next_tokens(&self, ctxs: &[GenerationContext<'_>]) -> Result<Vec<Token>> {
        let texts: Vec<Result<String>> = std::thread::scope(|s| {
            let handles: Vec<_> = ctxs.iter().map(|c| s.spawn(move || self.complete(c))).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(backend(None, "request thread panicked"))))
                .collect()
        });
        texts.into_iter().map(|t| t.map(|t| self.to_token(&t))).collect()
    }

    fn take_vocabulary_extensions(&self) -> Vec<Token> {
        std::mem::take(&mut *self.fresh.lock().unwrap_or_else(PoisonError::into_inner))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn response_paths() {
        let v = json!({"choices": [{"text": " novel written"}], "out": {"t": "x"}});
        assert_eq!(extract_text(&v, "choices.0.text"), Some(" novel written"));
        assert_eq!(extract_text(&v, "out.t"), Some("x"));
        assert_eq!(extract_text(&v, "choices.1.text"), None);
        assert_eq!(extract_text(&v, "choices"), None);
    }

    #[test]
    fn config_checks() {
        assert!(RemoteGenerator::new(RemoteConfig::default()).is_err());
        let cfg = RemoteConfig {
            endpoint: "http://127.0.0.1:1".into(),
            token_env: Some("DPRAG_TEST_SURELY_UNSET_VAR".into()),
            ..Default::default()
        };
        assert!(RemoteGenerator::new(cfg).is_err());
    }
}
