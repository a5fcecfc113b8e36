use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::parse::{parse_numbered_list, ListItem, ParseError};
use super::plan::PlanSlot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Options,
    Criteria,
    Definitions,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Options => "options",
            TaskKind::Criteria => "criteria",
            TaskKind::Definitions => "definitions",
        }
    }
}

/// The contract a response must meet to be parsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseFormat {
    /// `1. item` per line.
    NumberedList,
    /// `1. [common] item` / `1. [provocative] item` per line.
    TaggedNumberedList,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlavorQuota {
    pub common: u32,
    pub provocative: u32,
}

/// One generation call. `instruction` is the full rendered prompt; the other
/// fields restate its structured inputs for providers (like the stub) that do
/// not read prose.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderRequest {
    pub task: TaskKind,
    pub instruction: String,
    pub expected_count: u32,
    pub format: ResponseFormat,
    /// 0 for the first call, incremented on every re-request.
    pub attempt: u32,
    /// Source texts the items should be derived from.
    pub cues: Vec<String>,
    /// Per-item briefs (options only).
    pub slots: Vec<PlanSlot>,
    /// Texts that must not be proposed again.
    pub avoid: Vec<String>,
    pub quota: Option<FlavorQuota>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderResponse {
    pub raw: String,
}

impl ProviderResponse {
    pub fn new(raw: impl Into<String>) -> Self {
        Self { raw: raw.into() }
    }

    pub fn parse(&self) -> Result<Vec<ListItem>, ParseError> {
        parse_numbered_list(&self.raw)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("provider not configured: {0}")]
    Config(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("provider returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected provider payload: {0}")]
    Payload(String),
}

/// A text-completion backend. Calls block; async callers should run them on
/// a blocking thread.
pub trait Provider: Send + Sync {
    fn name(&self) -> &str;
    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError>;
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

const SYSTEM_PROMPT: &str = "You are a provocateur for someone developing decision criteria. \
You never decide for them. Follow the requested output format exactly.";

/// Chat-completion client. The endpoint receives
/// `{"model", "messages": [system, user], "temperature"}` and must answer with
/// `{"choices": [{"message": {"content": "..."}}]}`.
#[derive(Debug, Clone)]
pub struct ExternalProvider {
    url: String,
    key: Option<String>,
    model: String,
    timeout: Duration,
}

impl ExternalProvider {
    pub fn new(url: impl Into<String>, key: Option<String>) -> Self {
        Self {
            url: url.into(),
            key,
            model: "default".to_string(),
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn with_model(mut self, model: impl Into<String>) -> Self {
        self.model = model.into();
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Reads `PROVIDER_URL` (required), `PROVIDER_KEY`, `PROVIDER_MODEL`, and
    /// `PROVIDER_TIMEOUT_SECS`.
    pub fn from_env() -> Result<Self, ProviderError> {
        let url = std::env::var("PROVIDER_URL")
            .map_err(|_| ProviderError::Config("PROVIDER_URL is not set".into()))?;
        let mut provider = Self::new(url, std::env::var("PROVIDER_KEY").ok());
        if let Ok(model) = std::env::var("PROVIDER_MODEL") {
            provider = provider.with_model(model);
        }
        if let Ok(secs) = std::env::var("PROVIDER_TIMEOUT_SECS") {
            let secs: u64 = secs
                .parse()
                .map_err(|_| ProviderError::Config("PROVIDER_TIMEOUT_SECS must be an integer".into()))?;
            provider = provider.with_timeout(Duration::from_secs(secs));
        }
        Ok(provider)
    }

    pub fn timeout(&self) -> Duration {
        self.timeout
    }
}

impl Provider for ExternalProvider {
    fn name(&self) -> &str {
        "external"
    }

    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        // Built per call: the blocking client owns a runtime that must not be
        // created or dropped on an async worker thread.
        let client = reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .build()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let body = serde_json::json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": SYSTEM_PROMPT},
                {"role": "user", "content": request.instruction},
            ],
            "temperature": 0.9,
        });
        let mut call = client.post(&self.url).json(&body);
        if let Some(key) = &self.key {
            call = call.bearer_auth(key);
        }
        let response = call.send().map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(ProviderError::Status {
                status: status.as_u16(),
                body: text.chars().take(500).collect(),
            });
        }
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| ProviderError::Payload(e.to_string()))?;
        let content = value
            .pointer("/choices/0/message/content")
            .and_then(|v| v.as_str())
            .ok_or_else(|| ProviderError::Payload("missing choices[0].message.content".into()))?;
        Ok(ProviderResponse::new(content))
    }
}
