//! Knowledge searching over the graph.
//!
//! A query is answered by scoring every Problem Type node's stored keyword
//! embedding against the embedded query description, selecting the top-k
//! by cosine similarity (ties broken by lexicographic doc id), and
//! concatenating each winner's PT-SM-OF-OA chain into a labeled knowledge
//! bundle. DD edges are not consulted; retrieval is PT search plus SD
//! chains.
//!
//! A configurable character budget caps the bundle: whole chains are
//! dropped lowest-score-first (never truncated mid-chain) and every drop
//! is recorded as a notice.

use crate::graph::{
    cosine_similarity, node_id, GraphError, GraphNode, KnowledgeGraph, Layer,
};
use crate::providers::{EmbeddingProvider, EmbeddingVector, ProviderError};
use thiserror::Error;

/// Default number of chains retrieved per query.
pub const DEFAULT_K: usize = 3;

/// Default character budget for an assembled bundle.
pub const DEFAULT_BUDGET_CHARS: usize = 24_000;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("node {node_id} is on layer {layer}, not PT")]
    WrongLayer { node_id: String, layer: String },

    #[error("graph has no Problem Type nodes to search")]
    EmptyGraph,

    #[error("k must be at least 1")]
    InvalidK,

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("broken SD chain for document {doc_id}: missing {from} -- {to} edge")]
    BrokenChain {
        doc_id: String,
        from: String,
        to: String,
    },

    #[error(transparent)]
    Provider(#[from] ProviderError),

    #[error(transparent)]
    Similarity(#[from] GraphError),
}

/// One scored Problem Type node (an element of the relevance set).
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceEntry {
    pub node_id: String,
    pub doc_id: String,
    pub score: f64,
}

/// One retrieved chain: the four layer contents of a document, labeled and
/// concatenated in PT, SM, OF, OA order.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievedChain {
    pub doc_id: String,
    pub score: f64,
    pub text: String,
}

/// The assembled prior knowledge for the modeling agent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KnowledgeBundle {
    /// Chains sorted by score descending.
    pub chains: Vec<RetrievedChain>,
    /// Characters across all chain texts.
    pub total_characters: usize,
    /// Budget drops and other non-fatal events.
    pub notices: Vec<String>,
}

impl KnowledgeBundle {
    /// Renders the bundle for the modeling agent's context.
    pub fn render(&self) -> String {
        if self.chains.is_empty() {
            return "(no prior knowledge retrieved)".to_string();
        }
        self.chains
            .iter()
            .enumerate()
            .map(|(i, chain)| {
                format!(
                    "=== Reference {}: {} (relevance {:.4}) ===\n{}",
                    i + 1,
                    chain.doc_id,
                    chain.score,
                    chain.text
                )
            })
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}

/// Relevance of one Problem Type node to a query description: the cosine
/// similarity between the embedded description and the node's stored
/// keyword embedding.
pub fn query_relevance(
    description: &str,
    node: &GraphNode,
    embed: &dyn EmbeddingProvider,
) -> Result<f64, RetrievalError> {
    if node.layer != Layer::ProblemType {
        return Err(RetrievalError::WrongLayer {
            node_id: node.node_id(),
            layer: node.layer.code().to_string(),
        });
    }
    let query = embed.embed(description)?;
    Ok(cosine_similarity(&query, &node.keyword_embedding)?)
}

/// Scores every Problem Type node against an already-embedded query,
/// sorted by score descending with ties broken by doc id.
pub fn score_pt_nodes(
    graph: &KnowledgeGraph,
    query: &EmbeddingVector,
) -> Result<Vec<RelevanceEntry>, RetrievalError> {
    let pt_nodes = graph.pt_nodes();
    if pt_nodes.is_empty() {
        return Err(RetrievalError::EmptyGraph);
    }
    let mut entries = Vec::with_capacity(pt_nodes.len());
    for node in pt_nodes {
        let score = cosine_similarity(query, &node.keyword_embedding)?;
        entries.push(RelevanceEntry {
            node_id: node.node_id(),
            doc_id: node.doc_id.clone(),
            score,
        });
    }
    entries.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
    Ok(entries)
}

/// Walks one document's SD chain starting from its Problem Type node and
/// returns the four nodes in PT, SM, OF, OA order, verifying that every
/// chain edge actually exists.
pub fn walk_sd_chain<'g>(
    graph: &'g KnowledgeGraph,
    pt_node_id: &str,
) -> Result<Vec<&'g GraphNode>, RetrievalError> {
    let pt = graph
        .node(pt_node_id)
        .ok_or_else(|| RetrievalError::UnknownNode(pt_node_id.to_string()))?;
    if pt.layer != Layer::ProblemType {
        return Err(RetrievalError::WrongLayer {
            node_id: pt.node_id(),
            layer: pt.layer.code().to_string(),
        });
    }
    let doc_id = &pt.doc_id;
    let mut chain = Vec::with_capacity(4);
    chain.push(pt);
    for pair in Layer::CHAIN.windows(2) {
        let from_id = node_id(doc_id, pair[0]);
        let to_id = node_id(doc_id, pair[1]);
        if !graph.has_sd_edge(&from_id, &to_id) {
            return Err(RetrievalError::BrokenChain {
                doc_id: doc_id.clone(),
                from: from_id,
                to: to_id,
            });
        }
        let next = graph
            .node(&to_id)
            .ok_or_else(|| RetrievalError::UnknownNode(to_id.clone()))?;
        chain.push(next);
    }
    Ok(chain)
}

/// Concatenates chain node contents with a labeled separator line per layer.
pub fn chain_text(nodes: &[&GraphNode]) -> String {
    nodes
        .iter()
        .map(|node| format!("[{}]\n{}", node.layer.label(), node.content))
        .collect::<Vec<_>>()
        .join("\n\n")
}

/// Scores the Problem Type layer, selects the top-k nodes, walks their SD
/// chains, and assembles the knowledge bundle under the character budget.
pub fn retrieve_topk(
    graph: &KnowledgeGraph,
    description: &str,
    k: usize,
    embed: &dyn EmbeddingProvider,
    budget_chars: usize,
) -> Result<KnowledgeBundle, RetrievalError> {
    if k == 0 {
        return Err(RetrievalError::InvalidK);
    }
    let query = embed.embed(description)?;
    let ranked = score_pt_nodes(graph, &query)?;

    let mut chains = Vec::new();
    for entry in ranked.iter().take(k) {
        let nodes = walk_sd_chain(graph, &entry.node_id)?;
        chains.push(RetrievedChain {
            doc_id: entry.doc_id.clone(),
            score: entry.score,
            text: chain_text(&nodes),
        });
    }

    let mut notices = Vec::new();
    let mut total: usize = chains.iter().map(|c| c.text.chars().count()).sum();
    // Drop whole chains lowest-score-first until the bundle fits; the
    // top-ranked chain is always kept so the modeling agent sees something.
    while total > budget_chars && chains.len() > 1 {
        let dropped = chains.pop().expect("len > 1");
        total -= dropped.text.chars().count();
        notices.push(format!(
            "dropped chain {} (score {:.4}) to fit the {budget_chars}-character budget",
            dropped.doc_id, dropped.score
        ));
    }
    if total > budget_chars {
        notices.push(format!(
            "top chain alone exceeds the {budget_chars}-character budget ({total} chars); kept whole"
        ));
    }

    Ok(KnowledgeBundle {
        chains,
        total_characters: total,
        notices,
    })
}
