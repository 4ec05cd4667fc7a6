//! Prompt templates for the agents, shipped as text assets.
//!
//! Each asset holds the agent's system prompt, a `===user===` marker line,
//! and the user-content template with `{placeholder}` slots. The built-in
//! set is compiled in; [`PromptSet::from_dir`] overrides individual agents
//! from a directory of same-named `.txt` files.
//!
//! Per-agent decoding defaults: the normalization-style agents
//! (extraction, terminology, judge) run at temperature 0.0, the generative
//! ones (modeling, knowledge generation, direct answer) at 0.2.

use crate::providers::ChatRequest;
use std::path::Path;
use thiserror::Error;

const USER_MARKER: &str = "===user===";

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("cannot read prompt asset {path}: {reason}")]
    Unreadable { path: String, reason: String },
    #[error("prompt asset {path} has no `{USER_MARKER}` marker line")]
    MissingMarker { path: String },
}

/// One agent's prompt: system text plus a user-content template.
#[derive(Debug, Clone)]
pub struct PromptTemplate {
    /// Stable name used in traces and retry diagnostics.
    pub name: &'static str,
    pub system: String,
    pub user_template: String,
    pub temperature: f64,
    pub max_output: usize,
}

impl PromptTemplate {
    fn parse(name: &'static str, asset: &str, temperature: f64) -> Result<Self, PromptError> {
        let Some((system, user)) = asset.split_once(USER_MARKER) else {
            return Err(PromptError::MissingMarker { path: name.into() });
        };
        Ok(Self {
            name,
            system: system.trim().to_string(),
            user_template: user.trim().to_string(),
            temperature,
            max_output: 4096,
        })
    }

    /// Fills the `{placeholder}` slots of the user template.
    pub fn render_user(&self, substitutions: &[(&str, &str)]) -> String {
        let mut user = self.user_template.clone();
        for (slot, value) in substitutions {
            user = user.replace(&format!("{{{slot}}}"), value);
        }
        user
    }

    /// Builds the full chat request for this agent.
    pub fn request(&self, substitutions: &[(&str, &str)]) -> ChatRequest {
        ChatRequest::new(self.system.clone(), self.render_user(substitutions))
            .with_temperature(self.temperature)
            .with_max_output(self.max_output)
    }
}

/// The full set of agent prompts.
#[derive(Debug, Clone)]
pub struct PromptSet {
    pub extraction: PromptTemplate,
    pub terminology: PromptTemplate,
    pub modeling: PromptTemplate,
    pub knowledge_generation: PromptTemplate,
    pub direct: PromptTemplate,
    pub judge: PromptTemplate,
}

const AGENTS: [(&str, f64); 6] = [
    ("extraction", 0.0),
    ("terminology", 0.0),
    ("modeling", 0.2),
    ("knowledge_generation", 0.2),
    ("direct", 0.2),
    ("judge", 0.0),
];

impl PromptSet {
    /// The compiled-in prompt assets.
    pub fn builtin() -> Self {
        let parse = |name: &'static str, asset: &str, temperature: f64| {
            PromptTemplate::parse(name, asset, temperature)
                .expect("built-in prompt asset is well-formed")
        };
        Self {
            extraction: parse("extraction", include_str!("../prompts/extraction.txt"), 0.0),
            terminology: parse(
                "terminology",
                include_str!("../prompts/terminology.txt"),
                0.0,
            ),
            modeling: parse("modeling", include_str!("../prompts/modeling.txt"), 0.2),
            knowledge_generation: parse(
                "knowledge_generation",
                include_str!("../prompts/knowledge_generation.txt"),
                0.2,
            ),
            direct: parse("direct", include_str!("../prompts/direct.txt"), 0.2),
            judge: parse("judge", include_str!("../prompts/judge.txt"), 0.0),
        }
    }

    /// Builtin set with per-agent overrides read from `<dir>/<agent>.txt`.
    /// Missing files keep the builtin template; a present but malformed
    /// file is an error.
    pub fn from_dir(dir: &Path) -> Result<Self, PromptError> {
        let mut set = Self::builtin();
        for (name, temperature) in AGENTS {
            let path = dir.join(format!("{name}.txt"));
            if !path.exists() {
                continue;
            }
            let asset = std::fs::read_to_string(&path).map_err(|e| PromptError::Unreadable {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            let template =
                PromptTemplate::parse(name, &asset, temperature).map_err(|_| {
                    PromptError::MissingMarker {
                        path: path.display().to_string(),
                    }
                })?;
            set.set_by_name(name, template);
        }
        Ok(set)
    }

    fn set_by_name(&mut self, name: &str, template: PromptTemplate) {
        match name {
            "extraction" => self.extraction = template,
            "terminology" => self.terminology = template,
            "modeling" => self.modeling = template,
            "knowledge_generation" => self.knowledge_generation = template,
            "direct" => self.direct = template,
            "judge" => self.judge = template,
            _ => unreachable!("unknown agent name {name}"),
        }
    }
}

impl Default for PromptSet {
    fn default() -> Self {
        Self::builtin()
    }
}
