//! Deterministic local providers for offline tests and demos.
//!
//! [`ScriptedChat`] answers from a script table: keys are matched exactly
//! against the request's user content first, then as substrings of the
//! system prompt plus user content (longest key wins, which lets one
//! script route requests by agent), then a `"*"` wildcard entry applies.
//! Every dispatch is recorded in a call log so tests can count attempts
//! and inspect the system prompts each agent used.
//!
//! [`HashEmbedding`] derives a pseudo-random unit vector from a SHA-256
//! content hash, so equal texts always embed identically and distinct
//! texts almost surely do not. [`ScriptedEmbedding`] maps chosen texts to
//! chosen vectors for tests that need exact similarities.

use super::{ChatProvider, ChatRequest, EmbeddingProvider, ProviderError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::sync::Mutex;

/// One recorded dispatch to a [`ScriptedChat`].
#[derive(Debug, Clone)]
pub struct ChatCall {
    pub system_prompt: String,
    pub user_content: String,
    pub temperature: f64,
}

/// Script-table chat fake.
pub struct ScriptedChat {
    /// Non-wildcard entries, keyed by match text.
    entries: BTreeMap<String, String>,
    wildcard: Option<String>,
    max_retries: u32,
    fail_remaining: Mutex<u32>,
    calls: Mutex<Vec<ChatCall>>,
}

impl Default for ScriptedChat {
    fn default() -> Self {
        Self::new()
    }
}

impl ScriptedChat {
    pub fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
            wildcard: None,
            max_retries: 0,
            fail_remaining: Mutex::new(0),
            calls: Mutex::new(Vec::new()),
        }
    }

    /// Adds an entry; `"*"` installs the wildcard fallback.
    pub fn with_entry(mut self, key: impl Into<String>, response: impl Into<String>) -> Self {
        let key = key.into();
        if key == "*" {
            self.wildcard = Some(response.into());
        } else {
            self.entries.insert(key, response.into());
        }
        self
    }

    pub fn with_max_retries(mut self, max_retries: u32) -> Self {
        self.max_retries = max_retries;
        self
    }

    /// Makes the next `n` dispatches fail with a transient transport error.
    pub fn failing_first(self, n: u32) -> Self {
        *self.fail_remaining.lock().expect("fake poisoned") = n;
        self
    }

    /// Loads a script from a flat JSON object mapping key to response.
    pub fn from_script_json(json: &str) -> Result<Self, ProviderError> {
        let table: BTreeMap<String, String> = serde_json::from_str(json).map_err(|e| {
            ProviderError::InvalidConfig(format!("chat script is not a JSON string map: {e}"))
        })?;
        let mut fake = Self::new();
        for (key, response) in table {
            fake = fake.with_entry(key, response);
        }
        Ok(fake)
    }

    /// Snapshot of every dispatch so far, including failed ones.
    pub fn calls(&self) -> Vec<ChatCall> {
        self.calls.lock().expect("fake poisoned").clone()
    }

    fn lookup(&self, request: &ChatRequest) -> Option<&str> {
        if let Some(exact) = self.entries.get(&request.user_content) {
            return Some(exact);
        }
        // Substring matching scans the system prompt too, so a script can
        // route by agent; the longest contained key wins so that a short
        // generic key cannot shadow a more specific one.
        let haystack = format!("{}\n{}", request.system_prompt, request.user_content);
        self.entries
            .iter()
            .filter(|(key, _)| haystack.contains(key.as_str()))
            .max_by_key(|(key, _)| key.len())
            .map(|(_, response)| response.as_str())
            .or(self.wildcard.as_deref())
    }
}

impl ChatProvider for ScriptedChat {
    fn chat_once(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        self.calls.lock().expect("fake poisoned").push(ChatCall {
            system_prompt: request.system_prompt.clone(),
            user_content: request.user_content.clone(),
            temperature: request.temperature,
        });
        {
            let mut remaining = self.fail_remaining.lock().expect("fake poisoned");
            if *remaining > 0 {
                *remaining -= 1;
                return Err(ProviderError::Transport {
                    attempts: 1,
                    message: "scripted transient failure".into(),
                    transient: true,
                });
            }
        }
        match self.lookup(request) {
            Some(response) => Ok(response.to_string()),
            None => Err(ProviderError::NoScriptEntry {
                preview: preview(&request.user_content),
            }),
        }
    }

    fn max_retries(&self) -> u32 {
        self.max_retries
    }

    fn model_name(&self) -> &str {
        "scripted-chat"
    }
}

/// Content-hash seeded embedding fake. Emits unit vectors of a fixed
/// dimension, bitwise identical for identical inputs.
pub struct HashEmbedding {
    dimension: usize,
}

impl HashEmbedding {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension > 0, "embedding dimension must be positive");
        Self { dimension }
    }
}

impl EmbeddingProvider for HashEmbedding {
    fn embed_once(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        let digest = Sha256::digest(text.as_bytes());
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        let mut rng = ChaCha20Rng::from_seed(seed);
        let mut values: Vec<f64> = (0..self.dimension)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        // A ChaCha-driven normal draw of length >= 1 is never the zero
        // vector in practice; guard anyway to keep the unit-norm contract.
        if norm == 0.0 {
            values[0] = 1.0;
        } else {
            for v in &mut values {
                *v /= norm;
            }
        }
        Ok(values)
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn model_name(&self) -> &str {
        "hash-embedding"
    }
}

/// Table-driven embedding fake for tests that need exact similarities.
pub struct ScriptedEmbedding {
    dimension: usize,
    entries: BTreeMap<String, Vec<f64>>,
    default: Option<Vec<f64>>,
}

impl ScriptedEmbedding {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            entries: BTreeMap::new(),
            default: None,
        }
    }

    pub fn with_entry(mut self, text: impl Into<String>, vector: Vec<f64>) -> Self {
        assert_eq!(vector.len(), self.dimension, "scripted vector length");
        self.entries.insert(text.into(), vector);
        self
    }

    /// Vector returned for any text without an exact entry.
    pub fn with_default(mut self, vector: Vec<f64>) -> Self {
        assert_eq!(vector.len(), self.dimension, "scripted vector length");
        self.default = Some(vector);
        self
    }
}

impl EmbeddingProvider for ScriptedEmbedding {
    fn embed_once(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        self.entries
            .get(text)
            .or(self.default.as_ref())
            .cloned()
            .ok_or_else(|| ProviderError::NoScriptEntry {
                preview: preview(text),
            })
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn model_name(&self) -> &str {
        "scripted-embedding"
    }
}

fn preview(text: &str) -> String {
    text.chars().take(60).collect()
}
