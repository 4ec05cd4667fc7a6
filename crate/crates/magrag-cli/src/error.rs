//! CLI error type with machine-greppable codes.
//!
//! Every failure path prints exactly one line to stderr of the form
//! `error[CODE]: message` and exits nonzero. The codes are stable and
//! listed in the README.

use magrag_core::corpus::CorpusError;
use magrag_core::eval::EvalError;
use magrag_core::graph::GraphError;
use magrag_core::pipeline::PipelineError;
use magrag_core::prompts::PromptError;
use magrag_core::providers::ProviderError;
use magrag_core::retrieval::RetrievalError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Corpus(#[from] CorpusError),

    #[error(transparent)]
    Graph(#[from] GraphError),

    #[error(transparent)]
    Retrieval(#[from] RetrievalError),

    #[error(transparent)]
    Pipeline(#[from] PipelineError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error(transparent)]
    Provider(#[from] ProviderError),

    #[error(transparent)]
    Prompt(#[from] PromptError),

    #[error("corpus directory {0} does not exist; check the --corpus path (see `magrag build --help`)")]
    CorpusMissing(PathBuf),

    #[error("extraction failed for document {doc_id}: {source}")]
    Extraction {
        doc_id: String,
        #[source]
        source: CorpusError,
    },

    #[error("graph file {0} already exists; pass --force to overwrite")]
    GraphExists(PathBuf),

    #[error("graph file {0} not found; run `magrag build` first")]
    GraphMissing(PathBuf),

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("unknown document {0}")]
    UnknownDoc(String),

    #[error("provide a question via --question or --question-file")]
    NoQuestion,

    #[error("nothing to evaluate: pass --scores-csv and/or --results-dir with result files")]
    NoEvalInput,

    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Stable error code for scripting against the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "CONFIG",
            CliError::Corpus(err) => match err {
                CorpusError::MissingDirectory(_) => "CORPUS_MISSING",
                CorpusError::EmptyCorpus(_) => "CORPUS_EMPTY",
                CorpusError::UnreadableFile { .. } => "UNREADABLE_FILE",
                CorpusError::MalformedCompletion { .. } => "MALFORMED_COMPLETION",
                CorpusError::Provider(_) => "PROVIDER",
            },
            CliError::Graph(err) => match err {
                GraphError::SchemaVersionMismatch { .. } => "SCHEMA_VERSION",
                GraphError::CorruptFile { .. } => "CORRUPT_FILE",
                GraphError::DuplicateDocument(_) => "DUPLICATE_DOCUMENT",
                GraphError::EmbeddingFailure { .. } => "EMBEDDING_FAILURE",
                GraphError::Io(_) => "IO",
                _ => "GRAPH",
            },
            CliError::Retrieval(err) => match err {
                RetrievalError::BrokenChain { .. } => "BROKEN_CHAIN",
                RetrievalError::EmptyGraph => "EMPTY_GRAPH",
                RetrievalError::UnknownNode(_) => "UNKNOWN_NODE",
                _ => "RETRIEVAL",
            },
            CliError::Pipeline(_) => "PIPELINE",
            CliError::Eval(err) => match err {
                EvalError::RaggedTable { .. } => "RAGGED_TABLE",
                EvalError::NonNumericCell { .. } => "NON_NUMERIC_CELL",
                EvalError::MalformedJudgment { .. } => "MALFORMED_JUDGMENT",
                EvalError::IncompleteGrouping { .. } => "INCOMPLETE_GROUPING",
                _ => "EVAL",
            },
            CliError::Provider(_) => "PROVIDER",
            CliError::Prompt(_) => "PROMPT",
            CliError::CorpusMissing(_) => "CORPUS_MISSING",
            CliError::Extraction { source, .. } => match source {
                CorpusError::MalformedCompletion { .. } => "MALFORMED_COMPLETION",
                CorpusError::Provider(_) => "PROVIDER",
                _ => "EXTRACTION",
            },
            CliError::GraphExists(_) => "GRAPH_EXISTS",
            CliError::GraphMissing(_) => "GRAPH_MISSING",
            CliError::UnknownNode(_) => "UNKNOWN_NODE",
            CliError::UnknownDoc(_) => "UNKNOWN_DOC",
            CliError::NoQuestion => "USAGE",
            CliError::NoEvalInput => "NO_EVAL_INPUT",
            CliError::Io(_) => "IO",
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}
