//! The single TOML configuration file.
//!
//! Every field has a built-in default; a config file overrides the
//! defaults and command-line flags override the file (precedence:
//! flag > file > default). API keys never live in the file: provider
//! sections name the environment variable to read instead.

use crate::error::CliError;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    /// OpenAI-compatible HTTP backend.
    Openai,
    /// Deterministic local fake (scripted chat / hash embeddings).
    Fake,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChatSettings {
    pub provider: ProviderKind,
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub min_interval_ms: u64,
    /// Script table for the fake provider.
    pub script_path: Option<PathBuf>,
}

impl Default for ChatSettings {
    fn default() -> Self {
        Self {
            provider: ProviderKind::Openai,
            endpoint: "https://api.openai.com/v1".into(),
            model: "gpt-4o-mini".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_secs: 60,
            max_retries: 2,
            min_interval_ms: 0,
            script_path: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSettings {
    pub provider: ProviderKind,
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub min_interval_ms: u64,
    /// Vector dimension: the fake's output size, or the expected length
    /// from the remote backend.
    pub dimension: usize,
}

impl Default for EmbeddingSettings {
    fn default() -> Self {
        Self {
            provider: ProviderKind::Openai,
            endpoint: "https://api.openai.com/v1".into(),
            model: "text-embedding-3-small".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_secs: 60,
            max_retries: 2,
            min_interval_ms: 0,
            dimension: 1536,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Config {
    pub epsilon: f64,
    pub k: usize,
    pub knowledge_budget_chars: usize,
    pub dd_same_layer_only: bool,
    pub dd_expansion: bool,
    pub max_document_chars: usize,
    pub prompt_dir: Option<PathBuf>,
    pub results_dir: PathBuf,
    pub chat: ChatSettings,
    pub embedding: EmbeddingSettings,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            epsilon: 0.8,
            k: 3,
            knowledge_budget_chars: 24_000,
            dd_same_layer_only: false,
            dd_expansion: false,
            max_document_chars: magrag_core::corpus::DEFAULT_MAX_DOCUMENT_CHARS,
            prompt_dir: None,
            results_dir: PathBuf::from("results"),
            chat: ChatSettings::default(),
            embedding: EmbeddingSettings::default(),
        }
    }
}

/// The file-level shape: every field optional so a sparse file works.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    epsilon: Option<f64>,
    k: Option<usize>,
    knowledge_budget_chars: Option<usize>,
    dd_same_layer_only: Option<bool>,
    dd_expansion: Option<bool>,
    max_document_chars: Option<usize>,
    prompt_dir: Option<PathBuf>,
    results_dir: Option<PathBuf>,
    chat: Option<PartialChat>,
    embedding: Option<PartialEmbedding>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialChat {
    provider: Option<ProviderKind>,
    endpoint: Option<String>,
    model: Option<String>,
    api_key_env: Option<String>,
    timeout_secs: Option<u64>,
    max_retries: Option<u32>,
    min_interval_ms: Option<u64>,
    script_path: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialEmbedding {
    provider: Option<ProviderKind>,
    endpoint: Option<String>,
    model: Option<String>,
    api_key_env: Option<String>,
    timeout_secs: Option<u64>,
    max_retries: Option<u32>,
    min_interval_ms: Option<u64>,
    dimension: Option<usize>,
}

impl Config {
    /// Loads `path` when given, otherwise `./magrag.toml` when present,
    /// otherwise pure defaults.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let chosen = match path {
            Some(p) => Some(p.to_path_buf()),
            None => {
                let default = PathBuf::from("magrag.toml");
                default.exists().then_some(default)
            }
        };
        let mut config = Config::default();
        if let Some(file) = chosen {
            let text = std::fs::read_to_string(&file).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", file.display()))
            })?;
            let parsed: FileConfig = toml::from_str(&text).map_err(|e| {
                CliError::Config(format!("cannot parse config {}: {e}", file.display()))
            })?;
            config.apply(parsed);
        }
        config.validate()?;
        Ok(config)
    }

    fn apply(&mut self, file: FileConfig) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(value) = file.$field { self.$field = value; })*
            };
        }
        take!(
            epsilon,
            k,
            knowledge_budget_chars,
            dd_same_layer_only,
            dd_expansion,
            max_document_chars,
            results_dir
        );
        if file.prompt_dir.is_some() {
            self.prompt_dir = file.prompt_dir;
        }
        if let Some(chat) = file.chat {
            macro_rules! take_chat {
                ($($field:ident),*) => {
                    $(if let Some(value) = chat.$field { self.chat.$field = value; })*
                };
            }
            take_chat!(
                provider,
                endpoint,
                model,
                api_key_env,
                timeout_secs,
                max_retries,
                min_interval_ms
            );
            if chat.script_path.is_some() {
                self.chat.script_path = chat.script_path;
            }
        }
        if let Some(embedding) = file.embedding {
            macro_rules! take_embedding {
                ($($field:ident),*) => {
                    $(if let Some(value) = embedding.$field { self.embedding.$field = value; })*
                };
            }
            take_embedding!(
                provider,
                endpoint,
                model,
                api_key_env,
                timeout_secs,
                max_retries,
                min_interval_ms,
                dimension
            );
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(CliError::Config(format!(
                "epsilon {} outside [0, 1)",
                self.epsilon
            )));
        }
        if self.k < 1 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        if self.embedding.dimension == 0 {
            return Err(CliError::Config("embedding dimension must be positive".into()));
        }
        if self.chat.timeout_secs == 0 || self.embedding.timeout_secs == 0 {
            return Err(CliError::Config("provider timeouts must be positive".into()));
        }
        if self.dd_expansion {
            // The flag is reserved; retrieval is PT search plus SD chains.
            return Err(CliError::Config(
                "dd_expansion is reserved and not implemented; set it to false".into(),
            ));
        }
        Ok(())
    }

    pub fn chat_provider_config(&self) -> magrag_core::providers::ProviderConfig {
        magrag_core::providers::ProviderConfig {
            endpoint: self.chat.endpoint.clone(),
            model_name: self.chat.model.clone(),
            api_key_env: self.chat.api_key_env.clone(),
            timeout: Duration::from_secs(self.chat.timeout_secs),
            max_retries: self.chat.max_retries,
            min_interval: Duration::from_millis(self.chat.min_interval_ms),
        }
    }

    pub fn embedding_provider_config(&self) -> magrag_core::providers::ProviderConfig {
        magrag_core::providers::ProviderConfig {
            endpoint: self.embedding.endpoint.clone(),
            model_name: self.embedding.model.clone(),
            api_key_env: self.embedding.api_key_env.clone(),
            timeout: Duration::from_secs(self.embedding.timeout_secs),
            max_retries: self.embedding.max_retries,
            min_interval: Duration::from_millis(self.embedding.min_interval_ms),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_documented_values() {
        let config = Config::default();
        assert_eq!(config.epsilon, 0.8);
        assert_eq!(config.k, 3);
        assert_eq!(config.knowledge_budget_chars, 24_000);
        assert!(!config.dd_same_layer_only);
        assert!(!config.dd_expansion);
        assert_eq!(config.results_dir, PathBuf::from("results"));
    }

    #[test]
    fn sparse_file_overrides_only_named_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("magrag.toml");
        std::fs::write(&path, "epsilon = 0.5\n[chat]\nprovider = \"fake\"\n").unwrap();
        let config = Config::load(Some(&path)).unwrap();
        assert_eq!(config.epsilon, 0.5);
        assert_eq!(config.chat.provider, ProviderKind::Fake);
        assert_eq!(config.k, 3, "untouched fields keep defaults");
        assert_eq!(config.chat.model, "gpt-4o-mini");
    }

    #[test]
    fn invalid_epsilon_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("magrag.toml");
        std::fs::write(&path, "epsilon = 1.0\n").unwrap();
        assert!(matches!(
            Config::load(Some(&path)),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn dd_expansion_is_reserved() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("magrag.toml");
        std::fs::write(&path, "dd_expansion = true\n").unwrap();
        let err = Config::load(Some(&path)).unwrap_err();
        assert!(err.to_string().contains("reserved"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("magrag.toml");
        std::fs::write(&path, "epsilonn = 0.5\n").unwrap();
        assert!(Config::load(Some(&path)).is_err());
    }

    #[test]
    fn missing_explicit_config_file_errors() {
        assert!(Config::load(Some(Path::new("/no/such/magrag.toml"))).is_err());
    }
}
