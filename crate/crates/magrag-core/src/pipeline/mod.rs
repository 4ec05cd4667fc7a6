//! The three run modes over a user query.
//!
//! * `mag-rag`: terminology agent normalizes the query, retrieval
//!   assembles the knowledge bundle from the graph, the modeling agent
//!   answers with the bundle in context (trace: terminology, retrieval,
//!   modeling).
//! * `pure-ma`: retrieval is replaced by a knowledge-generation agent
//!   that writes background knowledge from the terminological description
//!   alone (trace: terminology, knowledge_generation, modeling).
//! * `pure-llm`: one direct completion, no prior knowledge (trace:
//!   direct).
//!
//! Stages are strictly sequential within a query; each failure aborts with
//! the stage name and the partial trace preserved in the error.

use crate::graph::KnowledgeGraph;
use crate::prompts::PromptSet;
use crate::providers::{ChatProvider, EmbeddingProvider, ProviderError};
use crate::retrieval::{self, KnowledgeBundle, RetrievalError};
use std::fmt;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Which pipeline produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RunMode {
    MagRag,
    PureMa,
    PureLlm,
}

impl RunMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::MagRag => "mag-rag",
            RunMode::PureMa => "pure-ma",
            RunMode::PureLlm => "pure-llm",
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mag-rag" => Ok(RunMode::MagRag),
            "pure-ma" => Ok(RunMode::PureMa),
            "pure-llm" => Ok(RunMode::PureLlm),
            other => Err(format!(
                "unknown mode {other:?}; expected mag-rag, pure-ma, or pure-llm"
            )),
        }
    }
}

/// The raw user input: a natural-language scene description.
#[derive(Debug, Clone, PartialEq)]
pub struct UserQuery {
    pub query_id: String,
    pub text: String,
}

impl UserQuery {
    pub fn new(query_id: impl Into<String>, text: impl Into<String>) -> Result<Self, PipelineError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(PipelineError {
                stage: "input".into(),
                trace: Vec::new(),
                source: StageError::EmptyQuery,
            });
        }
        Ok(Self {
            query_id: query_id.into(),
            text,
        })
    }
}

/// The query rewritten in domain terminology by the terminology agent.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminologicalDescription {
    pub text: String,
    pub source_query: String,
}

/// What knowledge the modeling agent saw.
#[derive(Debug, Clone, PartialEq)]
pub enum KnowledgeUsed {
    None,
    Retrieved(KnowledgeBundle),
    Generated(String),
}

/// One pipeline stage record: which prompt ran, how long it took, and how
/// long its output was (bundle characters for the retrieval stage).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub prompt_name: String,
    pub elapsed: Duration,
    pub completion_chars: usize,
}

/// A complete modeling answer with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelingResult {
    pub query_id: String,
    pub mode: RunMode,
    pub text: String,
    pub knowledge_used: KnowledgeUsed,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Provider(#[from] ProviderError),

    #[error(transparent)]
    Retrieval(#[from] RetrievalError),

    #[error("query text must be non-empty")]
    EmptyQuery,
}

/// A stage failure with the partial trace up to that point.
#[derive(Debug, Error)]
#[error("pipeline stage '{stage}' failed: {source}")]
pub struct PipelineError {
    pub stage: String,
    pub trace: Vec<TraceEntry>,
    #[source]
    pub source: StageError,
}

/// Providers and prompts shared by the pipeline stages.
pub struct PipelineContext<'a> {
    pub chat: &'a dyn ChatProvider,
    pub embed: &'a dyn EmbeddingProvider,
    pub prompts: &'a PromptSet,
}

/// Retrieval knobs for the mag-rag mode.
#[derive(Debug, Clone, Copy)]
pub struct RetrievalSettings {
    pub k: usize,
    pub budget_chars: usize,
}

impl Default for RetrievalSettings {
    fn default() -> Self {
        Self {
            k: retrieval::DEFAULT_K,
            budget_chars: retrieval::DEFAULT_BUDGET_CHARS,
        }
    }
}

fn chat_stage(
    template: &crate::prompts::PromptTemplate,
    substitutions: &[(&str, &str)],
    ctx: &PipelineContext<'_>,
    trace: &mut Vec<TraceEntry>,
) -> Result<String, PipelineError> {
    let request = template.request(substitutions);
    let started = Instant::now();
    match ctx.chat.chat(&request) {
        Ok(text) => {
            trace.push(TraceEntry {
                prompt_name: template.name.to_string(),
                elapsed: started.elapsed(),
                completion_chars: text.chars().count(),
            });
            Ok(text)
        }
        Err(err) => Err(PipelineError {
            stage: template.name.to_string(),
            trace: std::mem::take(trace),
            source: err.into(),
        }),
    }
}

/// Runs the terminology agent, recording one trace entry named
/// `terminology`.
pub fn terminologize(
    query: &UserQuery,
    ctx: &PipelineContext<'_>,
    trace: &mut Vec<TraceEntry>,
) -> Result<TerminologicalDescription, PipelineError> {
    if query.text.trim().is_empty() {
        return Err(PipelineError {
            stage: "terminology".into(),
            trace: std::mem::take(trace),
            source: StageError::EmptyQuery,
        });
    }
    let text = chat_stage(
        &ctx.prompts.terminology,
        &[("query", &query.text)],
        ctx,
        trace,
    )?;
    Ok(TerminologicalDescription {
        text,
        source_query: query.query_id.clone(),
    })
}

/// Terminology, graph retrieval, then modeling with the bundle in context.
pub fn run_mag_rag(
    query: &UserQuery,
    graph: &KnowledgeGraph,
    settings: RetrievalSettings,
    ctx: &PipelineContext<'_>,
) -> Result<ModelingResult, PipelineError> {
    let mut trace = Vec::new();
    let description = terminologize(query, ctx, &mut trace)?;

    let started = Instant::now();
    let bundle = retrieval::retrieve_topk(
        graph,
        &description.text,
        settings.k,
        ctx.embed,
        settings.budget_chars,
    )
    .map_err(|err| PipelineError {
        stage: "retrieval".into(),
        trace: std::mem::take(&mut trace),
        source: err.into(),
    })?;
    trace.push(TraceEntry {
        prompt_name: "retrieval".into(),
        elapsed: started.elapsed(),
        completion_chars: bundle.total_characters,
    });

    let knowledge = bundle.render();
    let text = chat_stage(
        &ctx.prompts.modeling,
        &[
            ("terminology", description.text.as_str()),
            ("knowledge", knowledge.as_str()),
        ],
        ctx,
        &mut trace,
    )?;

    Ok(ModelingResult {
        query_id: query.query_id.clone(),
        mode: RunMode::MagRag,
        text,
        knowledge_used: KnowledgeUsed::Retrieved(bundle),
        trace,
    })
}

/// Terminology, generated knowledge, then modeling: no graph involved.
pub fn run_pure_ma(
    query: &UserQuery,
    ctx: &PipelineContext<'_>,
) -> Result<ModelingResult, PipelineError> {
    let mut trace = Vec::new();
    let description = terminologize(query, ctx, &mut trace)?;

    let generated = chat_stage(
        &ctx.prompts.knowledge_generation,
        &[("terminology", description.text.as_str())],
        ctx,
        &mut trace,
    )?;

    let text = chat_stage(
        &ctx.prompts.modeling,
        &[
            ("terminology", description.text.as_str()),
            ("knowledge", generated.as_str()),
        ],
        ctx,
        &mut trace,
    )?;

    Ok(ModelingResult {
        query_id: query.query_id.clone(),
        mode: RunMode::PureMa,
        text,
        knowledge_used: KnowledgeUsed::Generated(generated),
        trace,
    })
}

/// One direct completion with no prior knowledge.
pub fn run_pure_llm(
    query: &UserQuery,
    ctx: &PipelineContext<'_>,
) -> Result<ModelingResult, PipelineError> {
    let mut trace = Vec::new();
    if query.text.trim().is_empty() {
        return Err(PipelineError {
            stage: "direct".into(),
            trace,
            source: StageError::EmptyQuery,
        });
    }
    let text = chat_stage(&ctx.prompts.direct, &[("query", &query.text)], ctx, &mut trace)?;
    Ok(ModelingResult {
        query_id: query.query_id.clone(),
        mode: RunMode::PureLlm,
        text,
        knowledge_used: KnowledgeUsed::None,
        trace,
    })
}

/// Renders a result as a markdown document: front-matter, the modeling
/// text, the retrieved references when a bundle was used, then the trace
/// as a fenced block.
pub fn render_result_markdown(
    result: &ModelingResult,
    k: Option<usize>,
    created: chrono::DateTime<chrono::Utc>,
) -> String {
    let mut out = String::new();
    out.push_str("---\n");
    out.push_str(&format!("query_id: {}\n", result.query_id));
    out.push_str(&format!("mode: {}\n", result.mode));
    if let Some(k) = k {
        out.push_str(&format!("k: {k}\n"));
    }
    out.push_str(&format!(
        "created: {}\n",
        created.format("%Y-%m-%dT%H:%M:%SZ")
    ));
    out.push_str("---\n\n");
    out.push_str(result.text.trim_end());
    if let KnowledgeUsed::Retrieved(bundle) = &result.knowledge_used {
        out.push_str("\n\n## References\n\n");
        for (i, chain) in bundle.chains.iter().enumerate() {
            out.push_str(&format!(
                "{}. {} (relevance {:.4})\n",
                i + 1,
                chain.doc_id,
                chain.score
            ));
        }
        for notice in &bundle.notices {
            out.push_str(&format!("> {notice}\n"));
        }
    }
    out.push_str("\n\n## Trace\n\n```\n");
    for entry in &result.trace {
        out.push_str(&format!(
            "{}\t{}ms\t{} chars\n",
            entry.prompt_name,
            entry.elapsed.as_millis(),
            entry.completion_chars
        ));
    }
    out.push_str("```\n");
    out
}

#[derive(Debug, Error)]
pub enum ResultParseError {
    #[error("result file has no front-matter block")]
    MissingFrontMatter,
    #[error("result file front-matter is missing the {0} field")]
    MissingField(&'static str),
    #[error("result file has an unknown mode: {0}")]
    UnknownMode(String),
}

/// A re-read result file: the front-matter identity plus the modeling text
/// (trace block stripped).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultDocument {
    pub query_id: String,
    pub mode: RunMode,
    pub text: String,
}

impl ResultDocument {
    pub fn parse(raw: &str) -> Result<Self, ResultParseError> {
        let rest = raw
            .strip_prefix("---\n")
            .ok_or(ResultParseError::MissingFrontMatter)?;
        let (front, body) = rest
            .split_once("\n---\n")
            .ok_or(ResultParseError::MissingFrontMatter)?;
        let field = |name: &'static str| {
            front
                .lines()
                .find_map(|line| line.strip_prefix(&format!("{name}: ")))
                .map(str::trim)
                .ok_or(ResultParseError::MissingField(name))
        };
        let query_id = field("query_id")?.to_string();
        let mode_raw = field("mode")?;
        let mode: RunMode = mode_raw
            .parse()
            .map_err(|_| ResultParseError::UnknownMode(mode_raw.to_string()))?;
        let text = body
            .split("\n## References\n")
            .next()
            .unwrap_or(body)
            .split("\n## Trace\n")
            .next()
            .unwrap_or(body)
            .trim()
            .to_string();
        Ok(Self {
            query_id,
            mode,
            text,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_support::synthetic_extraction;
    use crate::graph::{build_graph, GraphBuildOptions};
    use crate::providers::{HashEmbedding, ScriptedChat};

    fn query() -> UserQuery {
        UserQuery::new("q1", "find the angle a ship's sonar ping arrives from").unwrap()
    }

    fn scripted_chat() -> ScriptedChat {
        // The modeling key must outrank the terminology-output key under
        // longest-substring matching, because the modeling request embeds
        // the terminological description verbatim.
        ScriptedChat::new()
            .with_entry(
                "find the angle a ship's sonar ping arrives from",
                "DOA estimation with a uniform linear array",
            )
            .with_entry("DOA estimation with a uniform linear array", "GENERATED KNOWLEDGE")
            .with_entry(
                "Produce the complete optimization modeling result for the problem statement",
                "MODELED ANSWER",
            )
            .with_entry("*", "FALLBACK")
    }

    #[test]
    fn empty_query_is_rejected_at_construction() {
        let err = UserQuery::new("q", "   ").unwrap_err();
        assert_eq!(err.stage, "input");
        assert!(matches!(err.source, StageError::EmptyQuery));
    }

    #[test]
    fn terminologize_returns_scripted_text_and_traces_it() {
        let chat = ScriptedChat::new().with_entry("*", "DOA estimation with a uniform linear array");
        let embed = HashEmbedding::new(8);
        let prompts = PromptSet::builtin();
        let ctx = PipelineContext {
            chat: &chat,
            embed: &embed,
            prompts: &prompts,
        };
        let mut trace = Vec::new();
        let description = terminologize(&query(), &ctx, &mut trace).unwrap();
        assert_eq!(description.text, "DOA estimation with a uniform linear array");
        assert_eq!(description.source_query, "q1");
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].prompt_name, "terminology");
    }

    #[test]
    fn mag_rag_runs_three_stages_over_a_graph() {
        let chat = scripted_chat();
        let embed = HashEmbedding::new(8);
        let prompts = PromptSet::builtin();
        let ctx = PipelineContext {
            chat: &chat,
            embed: &embed,
            prompts: &prompts,
        };
        let graph = build_graph(
            &[synthetic_extraction("d1"), synthetic_extraction("d2")],
            &embed,
            &GraphBuildOptions::default(),
        )
        .unwrap();

        let result = run_mag_rag(&query(), &graph, RetrievalSettings::default(), &ctx).unwrap();
        assert_eq!(result.text, "MODELED ANSWER");
        assert_eq!(result.mode, RunMode::MagRag);
        let stages: Vec<&str> = result.trace.iter().map(|t| t.prompt_name.as_str()).collect();
        assert_eq!(stages, ["terminology", "retrieval", "modeling"]);
        match &result.knowledge_used {
            KnowledgeUsed::Retrieved(bundle) => {
                assert_eq!(bundle.chains.len(), 2);
                for chain in &bundle.chains {
                    assert!(graph.doc_ids().contains(&chain.doc_id));
                }
            }
            other => panic!("expected retrieved knowledge, got {other:?}"),
        }
    }

    #[test]
    fn mag_rag_is_deterministic_with_scripted_providers() {
        let embed = HashEmbedding::new(8);
        let prompts = PromptSet::builtin();
        let graph = build_graph(
            &[synthetic_extraction("d1")],
            &embed,
            &GraphBuildOptions::default(),
        )
        .unwrap();
        let run = || {
            let chat = scripted_chat();
            let ctx = PipelineContext {
                chat: &chat,
                embed: &embed,
                prompts: &prompts,
            };
            run_mag_rag(&query(), &graph, RetrievalSettings::default(), &ctx).unwrap()
        };
        let first = run();
        let second = run();
        assert_eq!(first.text.as_bytes(), second.text.as_bytes());
        assert_eq!(first.knowledge_used, second.knowledge_used);
    }

    #[test]
    fn pure_ma_generates_knowledge_without_a_graph() {
        let chat = scripted_chat();
        let embed = HashEmbedding::new(8);
        let prompts = PromptSet::builtin();
        let ctx = PipelineContext {
            chat: &chat,
            embed: &embed,
            prompts: &prompts,
        };
        let result = run_pure_ma(&query(), &ctx).unwrap();
        let stages: Vec<&str> = result.trace.iter().map(|t| t.prompt_name.as_str()).collect();
        assert_eq!(stages, ["terminology", "knowledge_generation", "modeling"]);
        assert_eq!(
            result.knowledge_used,
            KnowledgeUsed::Generated("GENERATED KNOWLEDGE".into())
        );
        assert_eq!(result.mode, RunMode::PureMa);
    }

    #[test]
    fn pure_llm_is_a_single_direct_call() {
        let chat = ScriptedChat::new().with_entry("*", "DIRECT ANSWER");
        let embed = HashEmbedding::new(8);
        let prompts = PromptSet::builtin();
        let ctx = PipelineContext {
            chat: &chat,
            embed: &embed,
            prompts: &prompts,
        };
        let result = run_pure_llm(&query(), &ctx).unwrap();
        assert_eq!(result.text, "DIRECT ANSWER");
        assert_eq!(result.mode, RunMode::PureLlm);
        assert_eq!(result.trace.len(), 1);
        assert_eq!(result.trace[0].prompt_name, "direct");
        assert_eq!(result.knowledge_used, KnowledgeUsed::None);
        assert_eq!(chat.calls().len(), 1);
    }

    #[test]
    fn modes_are_isolated_by_their_prompts() {
        let chat = scripted_chat();
        let embed = HashEmbedding::new(8);
        let prompts = PromptSet::builtin();
        let ctx = PipelineContext {
            chat: &chat,
            embed: &embed,
            prompts: &prompts,
        };
        let direct = run_pure_llm(&query(), &ctx).unwrap();
        let ma = run_pure_ma(&query(), &ctx).unwrap();
        assert_ne!(direct.text, ma.text);

        // Each recorded call used exactly its own agent's system prompt.
        let calls = chat.calls();
        assert_eq!(calls[0].system_prompt, prompts.direct.system);
        assert_eq!(calls[1].system_prompt, prompts.terminology.system);
        assert_eq!(calls[2].system_prompt, prompts.knowledge_generation.system);
        assert_eq!(calls[3].system_prompt, prompts.modeling.system);
    }

    #[test]
    fn stage_failure_preserves_partial_trace() {
        // Terminology succeeds, knowledge generation misses the script.
        let chat = ScriptedChat::new().with_entry(
            "find the angle a ship's sonar ping arrives from",
            "DOA estimation statement",
        );
        let embed = HashEmbedding::new(8);
        let prompts = PromptSet::builtin();
        let ctx = PipelineContext {
            chat: &chat,
            embed: &embed,
            prompts: &prompts,
        };
        let err = run_pure_ma(&query(), &ctx).unwrap_err();
        assert_eq!(err.stage, "knowledge_generation");
        assert_eq!(err.trace.len(), 1);
        assert_eq!(err.trace[0].prompt_name, "terminology");
    }

    #[test]
    fn result_markdown_round_trips_identity_and_body() {
        let result = ModelingResult {
            query_id: "q9".into(),
            mode: RunMode::MagRag,
            text: "The modeling answer.\n\nWith two paragraphs.".into(),
            knowledge_used: KnowledgeUsed::None,
            trace: vec![TraceEntry {
                prompt_name: "direct".into(),
                elapsed: Duration::from_millis(12),
                completion_chars: 42,
            }],
        };
        let rendered = render_result_markdown(&result, Some(3), chrono::Utc::now());
        assert!(rendered.starts_with("---\nquery_id: q9\nmode: mag-rag\nk: 3\n"));
        assert!(rendered.contains("## Trace"));
        let parsed = ResultDocument::parse(&rendered).unwrap();
        assert_eq!(parsed.query_id, "q9");
        assert_eq!(parsed.mode, RunMode::MagRag);
        assert_eq!(parsed.text, "The modeling answer.\n\nWith two paragraphs.");
    }

    #[test]
    fn result_parse_rejects_missing_front_matter() {
        assert!(matches!(
            ResultDocument::parse("no front matter"),
            Err(ResultParseError::MissingFrontMatter)
        ));
    }
}
