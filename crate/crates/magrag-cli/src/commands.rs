//! The four subcommand implementations.

use crate::config::{Config, ProviderKind};
use crate::error::CliError;
use magrag_core::corpus::{extract_knowledge, load_corpus, ExtractionOptions};
use magrag_core::eval::{
    self, gain_frequencies, render_report, suffix_grouping, GainSummary, Rubric, ScoreCard,
    ScoreTable,
};
use magrag_core::graph::{
    build_graph, load_graph, save_graph, GraphBuildOptions, KnowledgeGraph,
};
use magrag_core::pipeline::{
    render_result_markdown, run_mag_rag, run_pure_llm, run_pure_ma, ModelingResult,
    PipelineContext, ResultDocument, RetrievalSettings, RunMode, UserQuery,
};
use magrag_core::prompts::PromptSet;
use magrag_core::providers::{
    ChatProvider, EmbeddingProvider, HashEmbedding, HttpChatProvider, HttpEmbeddingProvider,
    ScriptedChat,
};
use magrag_core::retrieval::walk_sd_chain;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub struct Providers {
    pub chat: Box<dyn ChatProvider>,
    pub embed: Box<dyn EmbeddingProvider>,
}

/// Instantiates the configured providers. Fake providers touch no network
/// machinery at all.
pub fn build_providers(config: &Config) -> Result<Providers, CliError> {
    let chat: Box<dyn ChatProvider> = match config.chat.provider {
        ProviderKind::Fake => {
            let script_path = config.chat.script_path.as_ref().ok_or_else(|| {
                CliError::Config("fake chat provider needs chat.script_path".into())
            })?;
            let script = std::fs::read_to_string(script_path).map_err(|e| {
                CliError::Config(format!(
                    "cannot read chat script {}: {e}",
                    script_path.display()
                ))
            })?;
            Box::new(
                ScriptedChat::from_script_json(&script)?
                    .with_max_retries(config.chat.max_retries),
            )
        }
        ProviderKind::Openai => Box::new(HttpChatProvider::new(config.chat_provider_config())?),
    };
    let embed: Box<dyn EmbeddingProvider> = match config.embedding.provider {
        ProviderKind::Fake => Box::new(HashEmbedding::new(config.embedding.dimension)),
        ProviderKind::Openai => Box::new(HttpEmbeddingProvider::new(
            config.embedding_provider_config(),
            config.embedding.dimension,
        )?),
    };
    Ok(Providers { chat, embed })
}

fn prompts_for(config: &Config) -> Result<PromptSet, CliError> {
    match &config.prompt_dir {
        Some(dir) => Ok(PromptSet::from_dir(dir)?),
        None => Ok(PromptSet::builtin()),
    }
}

pub fn cmd_build(
    corpus_dir: &Path,
    out_path: &Path,
    force: bool,
    config: &Config,
) -> Result<(), CliError> {
    if out_path.exists() && !force {
        return Err(CliError::GraphExists(out_path.to_path_buf()));
    }
    let providers = build_providers(config)?;
    let prompts = prompts_for(config)?;

    let documents = load_corpus(corpus_dir).map_err(|err| match err {
        magrag_core::corpus::CorpusError::MissingDirectory(path) => CliError::CorpusMissing(path),
        other => CliError::Corpus(other),
    })?;
    println!("loaded {} document(s) from {}", documents.len(), corpus_dir.display());

    let options = ExtractionOptions {
        max_document_chars: config.max_document_chars,
    };
    let mut extracted = Vec::with_capacity(documents.len());
    for doc in &documents {
        let ek = extract_knowledge(doc, providers.chat.as_ref(), &prompts, &options).map_err(
            |source| CliError::Extraction {
                doc_id: doc.doc_id.clone(),
                source,
            },
        )?;
        println!("extracted {}", doc.doc_id);
        extracted.push(ek);
    }

    let graph = build_graph(
        &extracted,
        providers.embed.as_ref(),
        &GraphBuildOptions {
            epsilon: config.epsilon,
            dd_same_layer_only: config.dd_same_layer_only,
        },
    )?;
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    save_graph(&graph, out_path)?;
    println!("wrote {}", out_path.display());
    println!("{}", graph.stats());
    Ok(())
}

fn open_graph(path: &Path) -> Result<KnowledgeGraph, CliError> {
    if !path.exists() {
        return Err(CliError::GraphMissing(path.to_path_buf()));
    }
    Ok(load_graph(path)?)
}

fn derived_query_id(question: &str) -> String {
    let digest = Sha256::digest(question.as_bytes());
    format!("q-{:02x}{:02x}{:02x}{:02x}", digest[0], digest[1], digest[2], digest[3])
}

/// Results are append-only: the file name carries timestamp and query id,
/// and collisions get a numeric suffix rather than overwriting.
fn result_path(results_dir: &Path, query_id: &str) -> PathBuf {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = results_dir.join(format!("{stamp}_{query_id}.md"));
    if !base.exists() {
        return base;
    }
    for n in 1.. {
        let candidate = results_dir.join(format!("{stamp}_{query_id}-{n}.md"));
        if !candidate.exists() {
            return candidate;
        }
    }
    unreachable!("suffix search terminates");
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_query(
    graph_path: Option<&Path>,
    mode: RunMode,
    question: Option<String>,
    question_file: Option<&Path>,
    k: Option<usize>,
    query_id: Option<String>,
    results_dir: Option<&Path>,
    config: &Config,
) -> Result<(), CliError> {
    let question = match (question, question_file) {
        (Some(q), _) if !q.trim().is_empty() => q,
        (_, Some(path)) => std::fs::read_to_string(path)?.trim().to_string(),
        _ => return Err(CliError::NoQuestion),
    };
    if question.is_empty() {
        return Err(CliError::NoQuestion);
    }

    let providers = build_providers(config)?;
    let prompts = prompts_for(config)?;
    let ctx = PipelineContext {
        chat: providers.chat.as_ref(),
        embed: providers.embed.as_ref(),
        prompts: &prompts,
    };
    let query_id = query_id.unwrap_or_else(|| derived_query_id(&question));
    let query = UserQuery::new(query_id, question)?;

    let k = k.unwrap_or(config.k);
    let result: ModelingResult = match mode {
        RunMode::MagRag => {
            let graph_path = graph_path.ok_or_else(|| {
                CliError::GraphMissing(PathBuf::from("<unset>; pass --graph"))
            })?;
            let graph = open_graph(graph_path)?;
            let settings = RetrievalSettings {
                k,
                budget_chars: config.knowledge_budget_chars,
            };
            run_mag_rag(&query, &graph, settings, &ctx)?
        }
        RunMode::PureMa => run_pure_ma(&query, &ctx)?,
        RunMode::PureLlm => run_pure_llm(&query, &ctx)?,
    };

    let results_dir = results_dir.unwrap_or(&config.results_dir);
    std::fs::create_dir_all(results_dir)?;
    let path = result_path(results_dir, &result.query_id);
    let shown_k = matches!(mode, RunMode::MagRag).then_some(k);
    std::fs::write(&path, render_result_markdown(&result, shown_k, chrono::Utc::now()))?;
    println!("{}", path.display());
    Ok(())
}

pub fn cmd_inspect(
    graph_path: &Path,
    stats: bool,
    node: Option<&str>,
    doc: Option<&str>,
) -> Result<(), CliError> {
    let graph = open_graph(graph_path)?;
    if let Some(node_id) = node {
        let node = graph
            .node(node_id)
            .ok_or_else(|| CliError::UnknownNode(node_id.to_string()))?;
        println!("node: {}", node.node_id());
        println!("doc: {}", node.doc_id);
        println!("layer: {} ({})", node.layer.code(), node.layer.label());
        println!("keywords: {}", node.keywords);
        println!("\n{}", node.content);
        return Ok(());
    }
    if let Some(doc_id) = doc {
        if !graph.doc_ids().contains(doc_id) {
            return Err(CliError::UnknownDoc(doc_id.to_string()));
        }
        let chain = walk_sd_chain(&graph, &magrag_core::graph::node_id(doc_id, magrag_core::graph::Layer::ProblemType))?;
        for node in chain {
            println!("[{}]", node.layer.label());
            println!("{}\n", node.content);
        }
        return Ok(());
    }
    let _ = stats; // stats is the default view
    println!("{}", graph.stats());
    Ok(())
}

fn judge_results_dir(
    results_dir: &Path,
    config: &Config,
    prompts: &PromptSet,
    providers: &Providers,
) -> Result<Vec<ScoreCard>, CliError> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(results_dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|path| path.extension().map(|ext| ext == "md").unwrap_or(false))
        .filter(|path| {
            path.file_name()
                .map(|name| name != "report.md")
                .unwrap_or(true)
        })
        .collect();
    entries.sort();

    let rubric = Rubric::standard();
    let mut cards = Vec::new();
    for path in entries {
        let raw = std::fs::read_to_string(&path)?;
        let Ok(document) = ResultDocument::parse(&raw) else {
            eprintln!("skipping {} (not a result file)", path.display());
            continue;
        };
        let method_label = format!("{}:{}", config.chat.model, document.mode);
        let card = eval::judge_text(
            &document.text,
            &document.query_id,
            &method_label,
            &rubric,
            providers.chat.as_ref(),
            prompts,
        )?;
        println!(
            "judged {} -> total {}",
            path.file_name().unwrap_or_default().to_string_lossy(),
            card.total
        );
        cards.push(card);
    }
    Ok(cards)
}

pub fn cmd_eval(
    scores_csv: Option<&Path>,
    results_dir: Option<&Path>,
    out: Option<&Path>,
    config: &Config,
) -> Result<(), CliError> {
    let table = scores_csv.map(ScoreTable::from_csv_path).transpose()?;

    let mut cards: Vec<ScoreCard> = Vec::new();
    if let Some(dir) = results_dir {
        if dir.is_dir() {
            let providers = build_providers(config)?;
            let prompts = prompts_for(config)?;
            cards = judge_results_dir(dir, config, &prompts, &providers)?;
        }
    }

    if table.is_none() && cards.is_empty() {
        return Err(CliError::NoEvalInput);
    }

    let gains: Option<GainSummary> = table.as_ref().and_then(|table| {
        let grouping = suffix_grouping(table.methods()).ok()?;
        gain_frequencies(table, &grouping).ok()
    });

    let report = render_report(&cards, table.as_ref(), gains.as_ref());
    let out_path = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.results_dir.join("report.md"));
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&out_path, report)?;
    println!("{}", out_path.display());
    Ok(())
}
