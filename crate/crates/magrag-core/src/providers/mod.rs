//! Chat-completion and text-embedding provider abstractions.
//!
//! Two traits, [`ChatProvider`] and [`EmbeddingProvider`], hide the backend
//! behind a synchronous interface. Remote HTTP implementations live in
//! [`http`]; deterministic local fakes for offline tests live in [`fake`].
//!
//! Both traits implement retry-on-transient-failure as a default method:
//! implementations supply a single-attempt `*_once` call plus a retry
//! budget, and the public `chat`/`embed` entry points validate inputs,
//! loop over attempts, and enforce the output contracts (non-empty
//! completion, fixed embedding dimension, finite values).

pub mod fake;
pub mod http;

pub use fake::{ChatCall, HashEmbedding, ScriptedChat, ScriptedEmbedding};
pub use http::{HttpChatProvider, HttpEmbeddingProvider, ProviderConfig};

use std::sync::Mutex;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Errors produced by provider implementations and the trait-level wrappers.
#[derive(Debug, Error)]
pub enum ProviderError {
    /// The request violated a precondition before any dispatch happened.
    #[error("invalid request: {0}")]
    InvalidRequest(String),

    /// Network or HTTP failure. `attempts` counts every dispatch made,
    /// including retries.
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport {
        attempts: u32,
        message: String,
        transient: bool,
    },

    /// The backend answered but the completion was empty.
    #[error("backend returned an empty completion")]
    EmptyCompletion,

    /// The backend returned a vector of the wrong length.
    #[error("embedding dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// The backend returned a NaN or infinite coordinate.
    #[error("embedding contains a non-finite value at index {index}")]
    NonFiniteValue { index: usize },

    /// A scripted fake had no entry matching the request.
    #[error("no script entry matches request starting with {preview:?}")]
    NoScriptEntry { preview: String },

    /// The environment variable named by the provider config is unset.
    #[error("API key environment variable {0} is not set")]
    MissingApiKey(String),

    /// The provider configuration itself is unusable.
    #[error("invalid provider config: {0}")]
    InvalidConfig(String),
}

impl ProviderError {
    /// Whether a retry could plausibly succeed.
    pub fn is_transient(&self) -> bool {
        matches!(self, ProviderError::Transport { transient: true, .. })
    }

    fn with_attempts(self, total: u32) -> Self {
        match self {
            ProviderError::Transport {
                message, transient, ..
            } => ProviderError::Transport {
                attempts: total,
                message,
                transient,
            },
            other => other,
        }
    }
}

/// One chat-completion request: a system prompt carrying the agent's
/// instructions plus the user content it operates on.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatRequest {
    pub system_prompt: String,
    pub user_content: String,
    /// Sampling temperature in `[0, 1]`.
    pub temperature: f64,
    /// Output budget passed to the backend (tokens for remote models).
    pub max_output: usize,
}

impl ChatRequest {
    pub fn new(system_prompt: impl Into<String>, user_content: impl Into<String>) -> Self {
        Self {
            system_prompt: system_prompt.into(),
            user_content: user_content.into(),
            temperature: 0.0,
            max_output: 4096,
        }
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_max_output(mut self, max_output: usize) -> Self {
        self.max_output = max_output;
        self
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.user_content.trim().is_empty() {
            return Err(ProviderError::InvalidRequest(
                "user content must be non-empty".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.temperature) || !self.temperature.is_finite() {
            return Err(ProviderError::InvalidRequest(format!(
                "temperature {} outside [0, 1]",
                self.temperature
            )));
        }
        if self.max_output == 0 {
            return Err(ProviderError::InvalidRequest(
                "max_output must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A fixed-length vector of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f64>,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self, ProviderError> {
        if values.is_empty() {
            return Err(ProviderError::InvalidRequest(
                "embedding vector must be non-empty".into(),
            ));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(ProviderError::NonFiniteValue { index });
        }
        Ok(Self { values })
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Chat-completion backend.
///
/// Implementations provide [`chat_once`](ChatProvider::chat_once); callers
/// go through [`chat`](ChatProvider::chat), which validates the request,
/// retries transient transport failures up to
/// [`max_retries`](ChatProvider::max_retries), and rejects empty completions.
pub trait ChatProvider: Send + Sync {
    /// One dispatch to the backend, no validation or retries.
    fn chat_once(&self, request: &ChatRequest) -> Result<String, ProviderError>;

    /// Extra attempts allowed after the first. Total attempts are at most
    /// `1 + max_retries()`.
    fn max_retries(&self) -> u32 {
        0
    }

    /// Short identifier for traces and score-card labels.
    fn model_name(&self) -> &str;

    fn chat(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        request.validate()?;
        let budget = self.max_retries();
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            match self.chat_once(request) {
                Ok(text) => {
                    if text.trim().is_empty() {
                        return Err(ProviderError::EmptyCompletion);
                    }
                    return Ok(text);
                }
                Err(err) if err.is_transient() && attempt <= budget => continue,
                Err(err) => return Err(err.with_attempts(attempt)),
            }
        }
    }
}

/// Text-embedding backend with a fixed output dimension per instance.
pub trait EmbeddingProvider: Send + Sync {
    /// One dispatch to the backend, no validation or retries.
    fn embed_once(&self, text: &str) -> Result<Vec<f64>, ProviderError>;

    /// The fixed dimension every vector from this instance must have.
    fn dimension(&self) -> usize;

    fn max_retries(&self) -> u32 {
        0
    }

    fn model_name(&self) -> &str;

    fn embed(&self, text: &str) -> Result<EmbeddingVector, ProviderError> {
        if text.trim().is_empty() {
            return Err(ProviderError::InvalidRequest(
                "embedding input must be non-empty".into(),
            ));
        }
        let budget = self.max_retries();
        let mut attempt = 0u32;
        let values = loop {
            attempt += 1;
            match self.embed_once(text) {
                Ok(values) => break values,
                Err(err) if err.is_transient() && attempt <= budget => continue,
                Err(err) => return Err(err.with_attempts(attempt)),
            }
        };
        if values.len() != self.dimension() {
            return Err(ProviderError::DimensionMismatch {
                expected: self.dimension(),
                actual: values.len(),
            });
        }
        EmbeddingVector::new(values)
    }
}

/// Minimum-interval dispatch gate. Holding the lock across the sleep
/// serializes dispatch without blocking response handling of calls already
/// in flight.
pub struct RateGate {
    min_interval: Duration,
    last_dispatch: Mutex<Option<Instant>>,
}

impl RateGate {
    pub fn new(min_interval: Duration) -> Self {
        Self {
            min_interval,
            last_dispatch: Mutex::new(None),
        }
    }

    /// Blocks until at least `min_interval` has passed since the previous
    /// dispatch, then marks this dispatch.
    pub fn wait(&self) {
        if self.min_interval.is_zero() {
            return;
        }
        let mut last = self.last_dispatch.lock().expect("rate gate poisoned");
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < self.min_interval {
                std::thread::sleep(self.min_interval - elapsed);
            }
        }
        *last = Some(Instant::now());
    }
}
