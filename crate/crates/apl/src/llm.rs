//! Translation through a chat-completion model, using the fixed system prompt
//! from [`apl_core::prompt`].
//!
//! The wire format is the common `{model, messages: [{role, content}]}` JSON
//! shape; the endpoint URL is configurable so any compatible provider, or a
//! local mock, can stand in.

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::thread;
use std::time::Duration;

use apl_core::prompt::{looks_like_error_report, sanitize, PromptTemplate};
use apl_core::{RenameMap, SourceFile, TargetSource};
use serde::Deserialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const ENV_API_KEY: &str = "APL_LLM_API_KEY";
pub const ENV_ENDPOINT: &str = "APL_LLM_ENDPOINT";
pub const ENV_MODEL: &str = "APL_LLM_MODEL";
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_MODEL: &str = "gpt-4";
pub const MAX_RETRIES: u32 = 5;

/// An API key. Its `Debug` and `Display` output is redacted.
#[derive(Clone, PartialEq, Eq)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        ApiKey(key.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.trim().is_empty()
    }

    /// Replaces any occurrence of the key in `text`.
    pub fn scrub(&self, text: &str) -> String {
        if self.is_empty() {
            text.to_string()
        } else {
            text.replace(&self.0, "[redacted]")
        }
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey([redacted])")
    }
}

impl fmt::Display for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[redacted]")
    }
}

#[derive(Clone, Debug)]
pub struct LlmConfig {
    pub endpoint_url: String,
    pub model_name: String,
    pub api_key: ApiKey,
    pub timeout: Duration,
    pub max_retries: u32,
    /// Delay before the first retry; doubles on each further attempt.
    pub backoff: Duration,
    /// When set, raw replies are cached on disk keyed by prompt, source and model.
    pub cache_dir: Option<PathBuf>,
    pub prompt: PromptTemplate,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LlmError {
    #[error("invalid LLM configuration: {0}")]
    InvalidConfig(String),
    #[error("LLM request failed: {0}")]
    Transport(String),
    #[error("LLM endpoint rejected the credentials (HTTP {status})")]
    Auth { status: u16 },
    #[error("the model reported a syntax error: {0}")]
    ReportedSyntaxError(String),
    #[error("the model returned an empty reply")]
    EmptyReply,
}

impl LlmConfig {
    pub fn new(api_key: impl Into<String>) -> Self {
        LlmConfig {
            endpoint_url: DEFAULT_ENDPOINT.into(),
            model_name: DEFAULT_MODEL.into(),
            api_key: ApiKey::new(api_key),
            timeout: Duration::from_secs(60),
            max_retries: 2,
            backoff: Duration::from_millis(500),
            cache_dir: None,
            prompt: PromptTemplate::STANDARD,
        }
    }

    /// Key from `APL_LLM_API_KEY`; endpoint and model from their variables
    /// when set.
    pub fn from_env() -> Result<Self, LlmError> {
        let key = std::env::var(ENV_API_KEY).map_err(|_| LlmError::InvalidConfig(format!("{ENV_API_KEY} is not set")))?;
        let cfg = LlmConfig::new(key).with_env_overrides();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_env_overrides(mut self) -> Self {
        if let Ok(endpoint) = std::env::var(ENV_ENDPOINT) {
            self.endpoint_url = endpoint;
        }
        if let Ok(model) = std::env::var(ENV_MODEL) {
            self.model_name = model;
        }
        self
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.api_key.is_empty() {
            return Err(LlmError::InvalidConfig("API key is empty".into()));
        }
        if self.timeout.is_zero() {
            return Err(LlmError::InvalidConfig("timeout must be positive".into()));
        }
        if self.max_retries > MAX_RETRIES {
            return Err(LlmError::InvalidConfig(format!("max_retries must be at most {MAX_RETRIES}")));
        }
        if self.endpoint_url.is_empty() {
            return Err(LlmError::InvalidConfig("endpoint URL is empty".into()));
        }
        Ok(())
    }

    fn cache_key(&self, source: &str) -> String {
        let mut h = Sha256::new();
        h.update(self.prompt.system_text.as_bytes());
        h.update([0]);
        h.update(source.as_bytes());
        h.update([0]);
        h.update(self.model_name.as_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Deserialize)]
struct ChatReply {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    #[serde(default)]
    content: Option<String>,
}

enum Attempt {
    Done(String),
    Retry(String),
    Fatal(LlmError),
}

fn request_once(cfg: &LlmConfig, agent: &ureq::Agent, source: &str) -> Attempt {
    let body = json!({
        "model": cfg.model_name,
        "messages": [
            {"role": "system", "content": cfg.prompt.system_text},
            {"role": "user", "content": cfg.prompt.user_message(source)},
        ],
    });
    let resp = agent
        .post(&cfg.endpoint_url)
        .header("Authorization", &format!("Bearer {}", cfg.api_key.expose()))
        .send_json(&body);
    let mut resp = match resp {
        Ok(r) => r,
        Err(e) => return Attempt::Retry(cfg.api_key.scrub(&e.to_string())),
    };
    let status = resp.status().as_u16();
    match status {
        401 | 403 => return Attempt::Fatal(LlmError::Auth { status }),
        500.. => return Attempt::Retry(format!("HTTP {status}")),
        400.. => return Attempt::Fatal(LlmError::Transport(format!("HTTP {status}"))),
        _ => {}
    }
    match resp.body_mut().read_json::<ChatReply>() {
        Ok(reply) => Attempt::Done(reply.choices.into_iter().next().and_then(|c| c.message.content).unwrap_or_default()),
        Err(e) => Attempt::Fatal(LlmError::Transport(cfg.api_key.scrub(&format!("malformed reply: {e}")))),
    }
}

/// Sends the request, retrying transport failures and 5xx responses with
/// exponential backoff. Returns the raw reply text.
fn fetch_reply(cfg: &LlmConfig, source: &str) -> Result<String, LlmError> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(cfg.timeout))
        .http_status_as_error(false)
        .build()
        .into();
    let mut delay = cfg.backoff;
    let mut attempt = 0;
    loop {
        log::debug!("llm request to {} (model {}), attempt {}", cfg.endpoint_url, cfg.model_name, attempt + 1);
        match request_once(cfg, &agent, source) {
            Attempt::Done(text) => return Ok(text),
            Attempt::Fatal(e) => {
                log::warn!("llm request failed: {e}");
                return Err(e);
            }
            Attempt::Retry(msg) if attempt < cfg.max_retries => {
                log::warn!("llm request failed ({msg}); retrying in {delay:?}");
                thread::sleep(delay);
                delay *= 2;
                attempt += 1;
            }
            Attempt::Retry(msg) => {
                log::warn!("llm request failed after {} attempts: {msg}", attempt + 1);
                return Err(LlmError::Transport(msg));
            }
        }
    }
}

fn cached_reply(cfg: &LlmConfig, source: &str) -> Result<String, LlmError> {
    let Some(dir) = &cfg.cache_dir else {
        return fetch_reply(cfg, source);
    };
    let path = dir.join(format!("{}.txt", cfg.cache_key(source)));
    if let Ok(hit) = fs::read_to_string(&path) {
        log::debug!("llm cache hit {}", path.display());
        return Ok(hit);
    }
    let reply = fetch_reply(cfg, source)?;
    if !reply.trim().is_empty() {
        // write-then-rename keeps concurrent writers of one key from
        // exposing a partial file
        let write = fs::create_dir_all(dir).and_then(|_| {
            let tmp = tempfile::NamedTempFile::new_in(dir)?;
            fs::write(tmp.path(), &reply)?;
            tmp.persist(&path).map(|_| ()).map_err(|e| e.error)
        });
        if let Err(e) = write {
            log::warn!("could not write llm cache entry {}: {e}", path.display());
        }
    }
    Ok(reply)
}

/// Asks the model to translate `source` and returns the cleaned-up code.
/// The model's identifier renames are not recoverable, so the rename map is
/// empty.
pub fn translate(source: &SourceFile, cfg: &LlmConfig) -> Result<TargetSource, LlmError> {
    cfg.validate()?;
    if source.text.trim().is_empty() {
        return Err(LlmError::InvalidConfig("source is empty".into()));
    }
    let raw = cached_reply(cfg, &source.text)?;
    if raw.trim().is_empty() {
        return Err(LlmError::EmptyReply);
    }
    let text = sanitize(&raw);
    if text.is_empty() {
        return Err(LlmError::EmptyReply);
    }
    if looks_like_error_report(&text) {
        return Err(LlmError::ReportedSyntaxError(cfg.api_key.scrub(&text)));
    }
    Ok(TargetSource { text, rename_map: RenameMap::default(), prelude_used: false, source_origin: source.origin.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_is_redacted_in_debug_output() {
        let cfg = LlmConfig::new("sk-secret-123");
        let shown = format!("{cfg:?} {}", cfg.api_key);
        assert!(!shown.contains("sk-secret-123"));
        assert_eq!(cfg.api_key.scrub("bearer sk-secret-123!"), "bearer [redacted]!");
    }

    #[test]
    fn config_validation() {
        assert!(LlmConfig::new("k").validate().is_ok());
        assert!(LlmConfig::new("  ").validate().is_err());
        assert!(LlmConfig { max_retries: 6, ..LlmConfig::new("k") }.validate().is_err());
        assert!(LlmConfig { timeout: Duration::ZERO, ..LlmConfig::new("k") }.validate().is_err());
    }

    #[test]
    fn cache_key_depends_on_model_and_source() {
        let a = LlmConfig::new("k");
        let b = LlmConfig { model_name: "other".into(), ..LlmConfig::new("k") };
        assert_ne!(a.cache_key("x"), b.cache_key("x"));
        assert_ne!(a.cache_key("x"), a.cache_key("y"));
        assert_eq!(a.cache_key("x"), LlmConfig::new("different key").cache_key("x"));
    }

    #[test]
    fn empty_source_is_rejected_before_any_request() {
        let cfg = LlmConfig { endpoint_url: "http://127.0.0.1:9/none".into(), ..LlmConfig::new("k") };
        assert!(matches!(translate(&SourceFile::new("  \n", "e.apl"), &cfg), Err(LlmError::InvalidConfig(_))));
    }
}
