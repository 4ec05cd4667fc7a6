//! The four-layer knowledge graph.
//!
//! Every source document contributes one node per layer: Problem Type
//! (PT), System Model (SM), Optimization Formulation (OF), Optimization
//! Algorithm (OA): linked into an unoriented PT-SM-OF-OA chain by
//! single-document (SD) edges of weight 1.0. Cross-document node pairs
//! whose keyword-embedding cosine similarity strictly exceeds the graph's
//! `epsilon` threshold are linked by different-documents (DD) edges
//! weighted by that similarity.

pub mod serial;

pub use serial::{load_graph, parse_graph, render_graph, save_graph, SCHEMA_VERSION};

use crate::corpus::ExtractedKnowledge;
use crate::providers::{EmbeddingProvider, EmbeddingVector, ProviderError};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cannot build a graph from an empty extraction list")]
    EmptyInput,

    #[error("epsilon {0} outside [0, 1)")]
    InvalidEpsilon(f64),

    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),

    #[error("embedding failed for node {node_id}: {source}")]
    EmbeddingFailure {
        node_id: String,
        #[source]
        source: ProviderError,
    },

    #[error("vector dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cosine similarity of a zero vector is undefined")]
    ZeroVector,

    #[error("graph file schema version {found}, this build reads {expected}")]
    SchemaVersionMismatch { found: u32, expected: u32 },

    #[error("corrupt graph file at line {line}: {message}")]
    CorruptFile { line: usize, message: String },

    #[error("graph invariant violated: {0}")]
    InvariantViolation(String),

    #[error("graph file I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// The four graph layers, in chain order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    ProblemType,
    SystemModel,
    OptimizationFormulation,
    OptimizationAlgorithm,
}

impl Layer {
    /// Chain order: PT-SM-OF-OA.
    pub const CHAIN: [Layer; 4] = [
        Layer::ProblemType,
        Layer::SystemModel,
        Layer::OptimizationFormulation,
        Layer::OptimizationAlgorithm,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Layer::ProblemType => "PT",
            Layer::SystemModel => "SM",
            Layer::OptimizationFormulation => "OF",
            Layer::OptimizationAlgorithm => "OA",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Layer::ProblemType => "Problem Type",
            Layer::SystemModel => "System Model",
            Layer::OptimizationFormulation => "Optimization Formulation",
            Layer::OptimizationAlgorithm => "Optimization Algorithm",
        }
    }

    pub fn from_code(code: &str) -> Option<Layer> {
        Layer::CHAIN.into_iter().find(|l| l.code() == code)
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Canonical node id: `{doc_id}#{layer code}`.
pub fn node_id(doc_id: &str, layer: Layer) -> String {
    format!("{doc_id}#{}", layer.code())
}

/// One graph node: a layer's content for one document, plus the keyword
/// phrase list and its embedding used for similarity.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphNode {
    pub doc_id: String,
    pub layer: Layer,
    pub content: String,
    /// Keyword phrases joined with `"; "`; this exact string is embedded.
    pub keywords: String,
    pub keyword_embedding: EmbeddingVector,
}

impl GraphNode {
    pub fn node_id(&self) -> String {
        node_id(&self.doc_id, self.layer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    /// Single-document chain edge, weight exactly 1.0.
    Sd,
    /// Different-documents similarity edge, weight in `(epsilon, 1]`.
    Dd,
}

impl EdgeKind {
    pub fn code(self) -> &'static str {
        match self {
            EdgeKind::Sd => "SD",
            EdgeKind::Dd => "DD",
        }
    }

    pub fn from_code(code: &str) -> Option<EdgeKind> {
        match code {
            "SD" => Some(EdgeKind::Sd),
            "DD" => Some(EdgeKind::Dd),
            _ => None,
        }
    }
}

/// An unoriented edge with canonically ordered endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphEdge {
    pub kind: EdgeKind,
    pub endpoint_a: String,
    pub endpoint_b: String,
    pub weight: f64,
}

impl GraphEdge {
    /// Orders the endpoints lexicographically so each unordered pair has
    /// one representation.
    pub fn new(kind: EdgeKind, a: String, b: String, weight: f64) -> Self {
        let (endpoint_a, endpoint_b) = if a <= b { (a, b) } else { (b, a) };
        Self {
            kind,
            endpoint_a,
            endpoint_b,
            weight,
        }
    }

    pub fn connects(&self, a: &str, b: &str) -> bool {
        (self.endpoint_a == a && self.endpoint_b == b)
            || (self.endpoint_a == b && self.endpoint_b == a)
    }
}

/// The assembled knowledge graph. Immutable once built; safe to share
/// across concurrent readers.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeGraph {
    nodes: BTreeMap<String, GraphNode>,
    edges: Vec<GraphEdge>,
    epsilon: f64,
    embedding_dimension: usize,
    schema_version: u32,
}

impl KnowledgeGraph {
    pub(crate) fn from_parts(
        nodes: BTreeMap<String, GraphNode>,
        mut edges: Vec<GraphEdge>,
        epsilon: f64,
        embedding_dimension: usize,
        schema_version: u32,
    ) -> Self {
        edges.sort_by(|x, y| {
            (x.kind, &x.endpoint_a, &x.endpoint_b).cmp(&(y.kind, &y.endpoint_a, &y.endpoint_b))
        });
        Self {
            nodes,
            edges,
            epsilon,
            embedding_dimension,
            schema_version,
        }
    }

    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.get(id)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn embedding_dimension(&self) -> usize {
        self.embedding_dimension
    }

    pub fn schema_version(&self) -> u32 {
        self.schema_version
    }

    pub fn doc_ids(&self) -> BTreeSet<String> {
        self.nodes.values().map(|n| n.doc_id.clone()).collect()
    }

    /// Problem Type layer nodes in doc-id order.
    pub fn pt_nodes(&self) -> Vec<&GraphNode> {
        self.nodes
            .values()
            .filter(|n| n.layer == Layer::ProblemType)
            .collect()
    }

    pub fn has_sd_edge(&self, a: &str, b: &str) -> bool {
        self.edges
            .iter()
            .any(|e| e.kind == EdgeKind::Sd && e.connects(a, b))
    }

    pub fn dd_edges(&self) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Dd)
    }

    pub fn sd_edges(&self) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Sd)
    }

    /// Checks the full structural invariants: four nodes per document on
    /// distinct layers, exactly the three chain SD edges per document at
    /// weight 1.0, DD edges cross-document with weight in `(epsilon, 1]`,
    /// no self or duplicate edges, uniform embedding dimension.
    pub fn validate(&self) -> Result<(), GraphError> {
        let fail = |msg: String| Err(GraphError::InvariantViolation(msg));

        let mut layers_per_doc: BTreeMap<&str, BTreeSet<Layer>> = BTreeMap::new();
        for node in self.nodes.values() {
            if node.keyword_embedding.dimension() != self.embedding_dimension {
                return fail(format!(
                    "node {} embedding dimension {} != graph dimension {}",
                    node.node_id(),
                    node.keyword_embedding.dimension(),
                    self.embedding_dimension
                ));
            }
            if !layers_per_doc
                .entry(node.doc_id.as_str())
                .or_default()
                .insert(node.layer)
            {
                return fail(format!(
                    "document {} has multiple {} nodes",
                    node.doc_id,
                    node.layer.code()
                ));
            }
        }
        for (doc, layers) in &layers_per_doc {
            if layers.len() != 4 {
                return fail(format!("document {doc} has {} layers, wants 4", layers.len()));
            }
        }

        let mut seen_pairs: BTreeSet<(&str, &str)> = BTreeSet::new();
        let mut sd_per_doc: BTreeMap<&str, usize> = BTreeMap::new();
        for edge in &self.edges {
            if edge.endpoint_a == edge.endpoint_b {
                return fail(format!("self edge at {}", edge.endpoint_a));
            }
            if !seen_pairs.insert((edge.endpoint_a.as_str(), edge.endpoint_b.as_str())) {
                return fail(format!(
                    "duplicate edge {} -- {}",
                    edge.endpoint_a, edge.endpoint_b
                ));
            }
            let (Some(a), Some(b)) = (self.node(&edge.endpoint_a), self.node(&edge.endpoint_b))
            else {
                return fail(format!(
                    "edge {} -- {} references a missing node",
                    edge.endpoint_a, edge.endpoint_b
                ));
            };
            match edge.kind {
                EdgeKind::Sd => {
                    if a.doc_id != b.doc_id {
                        return fail("SD edge spans documents".into());
                    }
                    if edge.weight != 1.0 {
                        return fail(format!("SD edge weight {} != 1.0", edge.weight));
                    }
                    let adjacent = Layer::CHAIN
                        .windows(2)
                        .any(|w| (w[0] == a.layer && w[1] == b.layer)
                            || (w[0] == b.layer && w[1] == a.layer));
                    if !adjacent {
                        return fail(format!(
                            "SD edge {}--{} is not chain-adjacent",
                            a.layer.code(),
                            b.layer.code()
                        ));
                    }
                    *sd_per_doc.entry(a.doc_id.as_str()).or_default() += 1;
                }
                EdgeKind::Dd => {
                    if a.doc_id == b.doc_id {
                        return fail("DD edge within one document".into());
                    }
                    if !(edge.weight > self.epsilon && edge.weight <= 1.0) {
                        return fail(format!(
                            "DD edge weight {} outside ({}, 1]",
                            edge.weight, self.epsilon
                        ));
                    }
                }
            }
        }
        for doc in layers_per_doc.keys() {
            if sd_per_doc.get(doc).copied().unwrap_or(0) != 3 {
                return fail(format!("document {doc} does not have exactly 3 SD edges"));
            }
        }
        Ok(())
    }

    pub fn stats(&self) -> GraphStats {
        let mut nodes_per_layer: BTreeMap<Layer, usize> = BTreeMap::new();
        for node in self.nodes.values() {
            *nodes_per_layer.entry(node.layer).or_default() += 1;
        }
        let mut histogram = [0usize; 10];
        let mut dd_edges = 0;
        let mut sd_edges = 0;
        for edge in &self.edges {
            match edge.kind {
                EdgeKind::Sd => sd_edges += 1,
                EdgeKind::Dd => {
                    dd_edges += 1;
                    let bin = ((edge.weight * 10.0).floor() as usize).min(9);
                    histogram[bin] += 1;
                }
            }
        }
        GraphStats {
            documents: self.doc_ids().len(),
            nodes_per_layer,
            sd_edges,
            dd_edges,
            dd_weight_histogram: histogram,
            epsilon: self.epsilon,
            embedding_dimension: self.embedding_dimension,
        }
    }
}

/// Summary counts for a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub documents: usize,
    pub nodes_per_layer: BTreeMap<Layer, usize>,
    pub sd_edges: usize,
    pub dd_edges: usize,
    /// DD edge weights bucketed into [0.0,0.1), ..., [0.9,1.0].
    pub dd_weight_histogram: [usize; 10],
    pub epsilon: f64,
    pub embedding_dimension: usize,
}

impl fmt::Display for GraphStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "documents: {}  epsilon: {}  dimension: {}",
            self.documents, self.epsilon, self.embedding_dimension
        )?;
        let per_layer = Layer::CHAIN
            .iter()
            .map(|l| format!("{}: {}", l.code(), self.nodes_per_layer.get(l).unwrap_or(&0)))
            .collect::<Vec<_>>()
            .join("  ");
        writeln!(f, "nodes: {per_layer}")?;
        writeln!(f, "edges: SD: {}  DD: {}", self.sd_edges, self.dd_edges)?;
        write!(f, "dd weights:")?;
        for (i, count) in self.dd_weight_histogram.iter().enumerate() {
            if *count > 0 {
                write!(f, " [{:.1},{:.1}): {}", i as f64 / 10.0, (i + 1) as f64 / 10.0, count)?;
            }
        }
        Ok(())
    }
}

/// Cosine similarity of two equal-dimension non-zero vectors, clamped to
/// `[-1, 1]` against floating-point overshoot.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, GraphError> {
    if a.dimension() != b.dimension() {
        return Err(GraphError::DimensionMismatch {
            left: a.dimension(),
            right: b.dimension(),
        });
    }
    let mut dot = 0.0;
    let mut norm_a = 0.0;
    let mut norm_b = 0.0;
    for (x, y) in a.values().iter().zip(b.values()) {
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(GraphError::ZeroVector);
    }
    Ok((dot / (norm_a.sqrt() * norm_b.sqrt())).clamp(-1.0, 1.0))
}

/// Knobs for [`build_graph`].
#[derive(Debug, Clone)]
pub struct GraphBuildOptions {
    /// DD edges require similarity strictly greater than this.
    pub epsilon: f64,
    /// Restrict DD edges to node pairs on the same layer.
    pub dd_same_layer_only: bool,
}

impl Default for GraphBuildOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.8,
            dd_same_layer_only: false,
        }
    }
}

/// Builds the four-layer graph: one node per layer per document, the three
/// SD chain edges per document, and DD edges between every cross-document
/// node pair whose keyword-embedding similarity strictly exceeds epsilon.
pub fn build_graph(
    extracted: &[ExtractedKnowledge],
    embed: &dyn EmbeddingProvider,
    options: &GraphBuildOptions,
) -> Result<KnowledgeGraph, GraphError> {
    if extracted.is_empty() {
        return Err(GraphError::EmptyInput);
    }
    if !(0.0..1.0).contains(&options.epsilon) {
        return Err(GraphError::InvalidEpsilon(options.epsilon));
    }

    let mut nodes: BTreeMap<String, GraphNode> = BTreeMap::new();
    let mut docs: BTreeSet<&str> = BTreeSet::new();
    for ek in extracted {
        if !docs.insert(&ek.doc_id) {
            return Err(GraphError::DuplicateDocument(ek.doc_id.clone()));
        }
        for layer in Layer::CHAIN {
            let id = node_id(&ek.doc_id, layer);
            let keywords = ek.layer_keywords(layer);
            let keyword_embedding =
                embed
                    .embed(&keywords)
                    .map_err(|source| GraphError::EmbeddingFailure {
                        node_id: id.clone(),
                        source,
                    })?;
            nodes.insert(
                id,
                GraphNode {
                    doc_id: ek.doc_id.clone(),
                    layer,
                    content: ek.layer_content(layer),
                    keywords,
                    keyword_embedding,
                },
            );
        }
    }

    let mut edges: Vec<GraphEdge> = Vec::new();
    for doc in &docs {
        for pair in Layer::CHAIN.windows(2) {
            edges.push(GraphEdge::new(
                EdgeKind::Sd,
                node_id(doc, pair[0]),
                node_id(doc, pair[1]),
                1.0,
            ));
        }
    }

    let node_list: Vec<&GraphNode> = nodes.values().collect();
    for (i, a) in node_list.iter().enumerate() {
        for b in &node_list[i + 1..] {
            if a.doc_id == b.doc_id {
                continue;
            }
            if options.dd_same_layer_only && a.layer != b.layer {
                continue;
            }
            let similarity = cosine_similarity(&a.keyword_embedding, &b.keyword_embedding)?;
            if similarity > options.epsilon {
                edges.push(GraphEdge::new(
                    EdgeKind::Dd,
                    a.node_id(),
                    b.node_id(),
                    similarity,
                ));
            }
        }
    }

    let dimension = embed.dimension();
    Ok(KnowledgeGraph::from_parts(
        nodes,
        edges,
        options.epsilon,
        dimension,
        SCHEMA_VERSION,
    ))
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use std::collections::BTreeMap;

    /// Synthetic extraction with per-layer keyword strings `"{doc} {code} keywords"`.
    pub fn synthetic_extraction(doc_id: &str) -> ExtractedKnowledge {
        let mut keywords_per_section = BTreeMap::new();
        for layer in Layer::CHAIN {
            keywords_per_section.insert(
                layer,
                vec![format!("{doc_id} {} keywords", layer.code())],
            );
        }
        ExtractedKnowledge {
            doc_id: doc_id.to_string(),
            terminological_description: format!("{doc_id} terminological description"),
            example_information: format!("{doc_id} example information"),
            system_model: format!("{doc_id} system model"),
            optimization_formulation: format!("{doc_id} optimization formulation"),
            optimization_algorithm: format!("{doc_id} optimization algorithm"),
            keywords_per_section,
        }
    }
}
