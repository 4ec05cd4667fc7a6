//! OpenAI-compatible HTTP providers.
//!
//! Both providers speak the widely adopted JSON shapes: `POST
//! {endpoint}/chat/completions` and `POST {endpoint}/embeddings`. API keys
//! are read from the environment variable named in [`ProviderConfig`] at
//! dispatch time and never appear in configuration files. HTTP 429 and
//! 5xx responses and connection-level failures count as transient and are
//! retried by the trait-level wrapper; other statuses fail immediately.

use super::{ChatProvider, ChatRequest, EmbeddingProvider, ProviderError, RateGate};
use serde::Deserialize;
use std::time::Duration;

/// Connection settings for one remote provider instance.
#[derive(Debug, Clone)]
pub struct ProviderConfig {
    /// Base URL, e.g. `https://api.openai.com/v1`.
    pub endpoint: String,
    pub model_name: String,
    /// Name of the environment variable holding the API key. Empty means
    /// the backend needs no authorization header.
    pub api_key_env: String,
    pub timeout: Duration,
    pub max_retries: u32,
    /// Minimum spacing between dispatches; zero disables the gate.
    pub min_interval: Duration,
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), ProviderError> {
        if !self.endpoint.starts_with("http://") && !self.endpoint.starts_with("https://") {
            return Err(ProviderError::InvalidConfig(format!(
                "endpoint must be an http(s) URL, got {:?}",
                self.endpoint
            )));
        }
        if self.model_name.trim().is_empty() {
            return Err(ProviderError::InvalidConfig("model name is empty".into()));
        }
        if self.timeout.is_zero() {
            return Err(ProviderError::InvalidConfig(
                "timeout must be positive".into(),
            ));
        }
        Ok(())
    }

    fn api_key(&self) -> Result<Option<String>, ProviderError> {
        if self.api_key_env.is_empty() {
            return Ok(None);
        }
        match std::env::var(&self.api_key_env) {
            Ok(key) if !key.is_empty() => Ok(Some(key)),
            _ => Err(ProviderError::MissingApiKey(self.api_key_env.clone())),
        }
    }

    fn agent(&self) -> ureq::Agent {
        ureq::AgentBuilder::new()
            .timeout_connect(self.timeout)
            .timeout(self.timeout)
            .build()
    }
}

fn post_json(
    agent: &ureq::Agent,
    url: &str,
    api_key: Option<&str>,
    body: serde_json::Value,
) -> Result<String, ProviderError> {
    let mut request = agent.post(url).set("Content-Type", "application/json");
    if let Some(key) = api_key {
        request = request.set("Authorization", &format!("Bearer {key}"));
    }
    match request.send_json(body) {
        Ok(response) => response.into_string().map_err(|e| ProviderError::Transport {
            attempts: 1,
            message: format!("failed reading response body: {e}"),
            transient: true,
        }),
        Err(ureq::Error::Status(code, response)) => {
            let detail = response.into_string().unwrap_or_default();
            Err(ProviderError::Transport {
                attempts: 1,
                message: format!("HTTP {code}: {}", detail.trim()),
                transient: code == 429 || (500..600).contains(&code),
            })
        }
        Err(ureq::Error::Transport(err)) => Err(ProviderError::Transport {
            attempts: 1,
            message: err.to_string(),
            transient: true,
        }),
    }
}

#[derive(Deserialize)]
struct ChatCompletionResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: Option<String>,
}

/// Remote chat-completion backend.
pub struct HttpChatProvider {
    config: ProviderConfig,
    agent: ureq::Agent,
    gate: RateGate,
}

impl HttpChatProvider {
    pub fn new(config: ProviderConfig) -> Result<Self, ProviderError> {
        config.validate()?;
        let agent = config.agent();
        let gate = RateGate::new(config.min_interval);
        Ok(Self {
            config,
            agent,
            gate,
        })
    }
}

impl ChatProvider for HttpChatProvider {
    fn chat_once(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        let api_key = self.config.api_key()?;
        self.gate.wait();
        let url = format!("{}/chat/completions", self.config.endpoint.trim_end_matches('/'));
        let body = serde_json::json!({
            "model": self.config.model_name,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_content},
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_output,
        });
        let raw = post_json(&self.agent, &url, api_key.as_deref(), body)?;
        let parsed: ChatCompletionResponse =
            serde_json::from_str(&raw).map_err(|e| ProviderError::Transport {
                attempts: 1,
                message: format!("malformed chat completion response: {e}"),
                transient: false,
            })?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|choice| choice.message.content)
            .ok_or(ProviderError::EmptyCompletion)
    }

    fn max_retries(&self) -> u32 {
        self.config.max_retries
    }

    fn model_name(&self) -> &str {
        &self.config.model_name
    }
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    embedding: Vec<f64>,
}

/// Remote text-embedding backend.
pub struct HttpEmbeddingProvider {
    config: ProviderConfig,
    dimension: usize,
    agent: ureq::Agent,
    gate: RateGate,
}

impl HttpEmbeddingProvider {
    pub fn new(config: ProviderConfig, dimension: usize) -> Result<Self, ProviderError> {
        config.validate()?;
        if dimension == 0 {
            return Err(ProviderError::InvalidConfig(
                "embedding dimension must be positive".into(),
            ));
        }
        let agent = config.agent();
        let gate = RateGate::new(config.min_interval);
        Ok(Self {
            config,
            dimension,
            agent,
            gate,
        })
    }
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn embed_once(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        let api_key = self.config.api_key()?;
        self.gate.wait();
        let url = format!("{}/embeddings", self.config.endpoint.trim_end_matches('/'));
        let body = serde_json::json!({
            "model": self.config.model_name,
            "input": [text],
        });
        let raw = post_json(&self.agent, &url, api_key.as_deref(), body)?;
        let parsed: EmbeddingResponse =
            serde_json::from_str(&raw).map_err(|e| ProviderError::Transport {
                attempts: 1,
                message: format!("malformed embedding response: {e}"),
                transient: false,
            })?;
        parsed
            .data
            .into_iter()
            .next()
            .map(|datum| datum.embedding)
            .ok_or_else(|| ProviderError::Transport {
                attempts: 1,
                message: "embedding response carried no data".into(),
                transient: false,
            })
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn max_retries(&self) -> u32 {
        self.config.max_retries
    }

    fn model_name(&self) -> &str {
        &self.config.model_name
    }
}
