//! `magrag`: build a four-layer knowledge graph from domain documents and
//! answer optimization-modeling queries through a graph-RAG agent pipeline.

mod commands;
mod config;
mod error;

use clap::{Parser, Subcommand};
use config::Config;
use error::CliError;
use magrag_core::pipeline::RunMode;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "magrag", version, about = "Graph-RAG optimization modeling for sensor array signal processing")]
struct Cli {
    /// Config file (default: ./magrag.toml when present, else built-ins).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract knowledge from a corpus directory and build the graph file.
    Build {
        /// Directory of UTF-8 text/markdown documents.
        #[arg(long)]
        corpus: PathBuf,
        /// Output graph file.
        #[arg(long)]
        out: PathBuf,
        /// DD-edge similarity threshold override.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Overwrite an existing graph file.
        #[arg(long)]
        force: bool,
    },
    /// Answer a question in one of the three modes and write a result file.
    Query {
        /// Graph file (required for --mode mag-rag).
        #[arg(long)]
        graph: Option<PathBuf>,
        /// mag-rag, pure-ma, or pure-llm.
        #[arg(long)]
        mode: RunMode,
        /// Question text inline.
        #[arg(long)]
        question: Option<String>,
        /// Read the question from a file instead.
        #[arg(long)]
        question_file: Option<PathBuf>,
        /// Number of chains to retrieve (mag-rag).
        #[arg(long)]
        k: Option<usize>,
        /// Identifier for the result file (default: derived from the question).
        #[arg(long)]
        query_id: Option<String>,
        /// Where to write the result file.
        #[arg(long)]
        results_dir: Option<PathBuf>,
    },
    /// Print graph statistics, one node, or one document chain.
    Inspect {
        #[arg(long)]
        graph: PathBuf,
        /// Print summary statistics (the default view).
        #[arg(long)]
        stats: bool,
        /// Print one node by id (doc_id#LAYER).
        #[arg(long)]
        node: Option<String>,
        /// Print one document's chain contents in layer order.
        #[arg(long)]
        doc: Option<String>,
    },
    /// Judge result files and/or import a score CSV, then write the report.
    Eval {
        /// Score table CSV (header `method,Q1,...`).
        #[arg(long)]
        scores_csv: Option<PathBuf>,
        /// Directory of result files to judge.
        #[arg(long)]
        results_dir: Option<PathBuf>,
        /// Report output path (default: <results_dir>/report.md).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Build {
            corpus,
            out,
            epsilon,
            force,
        } => {
            if let Some(epsilon) = epsilon {
                config.epsilon = epsilon;
                config.validate()?;
            }
            commands::cmd_build(&corpus, &out, force, &config)
        }
        Command::Query {
            graph,
            mode,
            question,
            question_file,
            k,
            query_id,
            results_dir,
        } => commands::cmd_query(
            graph.as_deref(),
            mode,
            question,
            question_file.as_deref(),
            k,
            query_id,
            results_dir.as_deref(),
            &config,
        ),
        Command::Inspect {
            graph,
            stats,
            node,
            doc,
        } => commands::cmd_inspect(&graph, stats, node.as_deref(), doc.as_deref()),
        Command::Eval {
            scores_csv,
            results_dir,
            out,
        } => commands::cmd_eval(
            scores_csv.as_deref(),
            results_dir.as_deref(),
            out.as_deref(),
            &config,
        ),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error[{}]: {err}", err.code());
        std::process::exit(1);
    }
}
