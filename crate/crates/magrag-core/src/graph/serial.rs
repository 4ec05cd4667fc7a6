//! Line-delimited graph file format.
//!
//! The file is UTF-8 text, one record per line, tab-separated fields:
//!
//! ```text
//! magrag-graph <schema_version> <epsilon> <embedding_dimension>
//! node <doc_id> <layer code> <keywords> <content> <v0,v1,...>
//! edge <SD|DD> <node_a> <node_b> <weight>
//! ```
//!
//! Node lines precede the edge lines that reference them. Text fields
//! escape backslash, tab, newline, and carriage return; numbers use
//! Rust's shortest-round-trip `f64` formatting, so a save/load cycle
//! reproduces every embedding coordinate exactly.

use super::{EdgeKind, GraphEdge, GraphError, GraphNode, KnowledgeGraph, Layer};
use crate::providers::EmbeddingVector;
use std::collections::BTreeMap;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

const MAGIC: &str = "magrag-graph";

pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            other => out.push(other),
        }
    }
    out
}

pub(crate) fn unescape(text: &str) -> Result<String, String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => return Err(format!("unknown escape \\{other}")),
            None => return Err("dangling backslash".into()),
        }
    }
    Ok(out)
}

/// Renders the graph into the line-delimited format.
pub fn render_graph(graph: &KnowledgeGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{MAGIC}\t{}\t{}\t{}\n",
        graph.schema_version(),
        graph.epsilon(),
        graph.embedding_dimension()
    ));
    for node in graph.nodes() {
        let coords = node
            .keyword_embedding
            .values()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!(
            "node\t{}\t{}\t{}\t{}\t{coords}\n",
            escape(&node.doc_id),
            node.layer.code(),
            escape(&node.keywords),
            escape(&node.content),
        ));
    }
    for edge in graph.edges() {
        out.push_str(&format!(
            "edge\t{}\t{}\t{}\t{}\n",
            edge.kind.code(),
            escape(&edge.endpoint_a),
            escape(&edge.endpoint_b),
            edge.weight
        ));
    }
    out
}

pub fn save_graph(graph: &KnowledgeGraph, out: &Path) -> Result<(), GraphError> {
    std::fs::write(out, render_graph(graph))?;
    Ok(())
}

/// Parses the line-delimited format back into a graph.
///
/// Record-level problems (bad field counts, unknown layers, unparseable
/// numbers, edges naming unknown nodes, duplicates) are
/// [`GraphError::CorruptFile`] with the offending line number. Structural
/// chain completeness is deliberately not enforced here so that damaged
/// files can still be inspected; walkers report broken chains themselves.
pub fn parse_graph(text: &str) -> Result<KnowledgeGraph, GraphError> {
    let corrupt = |line: usize, message: String| GraphError::CorruptFile { line, message };

    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| corrupt(1, "empty file".into()))?;
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.len() != 4 || fields[0] != MAGIC {
        return Err(corrupt(1, format!("expected `{MAGIC}` header record")));
    }
    let version: u32 = fields[1]
        .parse()
        .map_err(|_| corrupt(1, format!("bad schema version {:?}", fields[1])))?;
    if version != SCHEMA_VERSION {
        return Err(GraphError::SchemaVersionMismatch {
            found: version,
            expected: SCHEMA_VERSION,
        });
    }
    let epsilon: f64 = fields[2]
        .parse()
        .map_err(|_| corrupt(1, format!("bad epsilon {:?}", fields[2])))?;
    if !(0.0..1.0).contains(&epsilon) {
        return Err(corrupt(1, format!("epsilon {epsilon} outside [0, 1)")));
    }
    let dimension: usize = fields[3]
        .parse()
        .map_err(|_| corrupt(1, format!("bad dimension {:?}", fields[3])))?;
    if dimension == 0 {
        return Err(corrupt(1, "dimension must be positive".into()));
    }

    let mut nodes: BTreeMap<String, GraphNode> = BTreeMap::new();
    let mut edges: Vec<GraphEdge> = Vec::new();
    let mut seen_edges: std::collections::BTreeSet<(EdgeKind, String, String)> =
        std::collections::BTreeSet::new();

    for (index, line) in lines {
        let line_no = index + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields[0] {
            "node" => {
                if fields.len() != 6 {
                    return Err(corrupt(
                        line_no,
                        format!("node record has {} fields, wants 6", fields.len()),
                    ));
                }
                let doc_id = unescape(fields[1]).map_err(|m| corrupt(line_no, m))?;
                let layer = Layer::from_code(fields[2])
                    .ok_or_else(|| corrupt(line_no, format!("unknown layer {:?}", fields[2])))?;
                let keywords = unescape(fields[3]).map_err(|m| corrupt(line_no, m))?;
                let content = unescape(fields[4]).map_err(|m| corrupt(line_no, m))?;
                let mut values = Vec::with_capacity(dimension);
                for coord in fields[5].split(',') {
                    values.push(coord.parse::<f64>().map_err(|_| {
                        corrupt(line_no, format!("bad embedding coordinate {coord:?}"))
                    })?);
                }
                if values.len() != dimension {
                    return Err(corrupt(
                        line_no,
                        format!("embedding has {} coordinates, wants {dimension}", values.len()),
                    ));
                }
                let keyword_embedding = EmbeddingVector::new(values)
                    .map_err(|e| corrupt(line_no, e.to_string()))?;
                let node = GraphNode {
                    doc_id,
                    layer,
                    content,
                    keywords,
                    keyword_embedding,
                };
                let id = node.node_id();
                if nodes.insert(id.clone(), node).is_some() {
                    return Err(corrupt(line_no, format!("duplicate node {id}")));
                }
            }
            "edge" => {
                if fields.len() != 5 {
                    return Err(corrupt(
                        line_no,
                        format!("edge record has {} fields, wants 5", fields.len()),
                    ));
                }
                let kind = EdgeKind::from_code(fields[1])
                    .ok_or_else(|| corrupt(line_no, format!("unknown edge kind {:?}", fields[1])))?;
                let a = unescape(fields[2]).map_err(|m| corrupt(line_no, m))?;
                let b = unescape(fields[3]).map_err(|m| corrupt(line_no, m))?;
                let weight: f64 = fields[4]
                    .parse()
                    .map_err(|_| corrupt(line_no, format!("bad edge weight {:?}", fields[4])))?;
                if a == b {
                    return Err(corrupt(line_no, format!("self edge at {a}")));
                }
                for endpoint in [&a, &b] {
                    if !nodes.contains_key(endpoint) {
                        return Err(corrupt(
                            line_no,
                            format!("edge references unknown node {endpoint}"),
                        ));
                    }
                }
                let edge = GraphEdge::new(kind, a, b, weight);
                let key = (edge.kind, edge.endpoint_a.clone(), edge.endpoint_b.clone());
                if !seen_edges.insert(key) {
                    return Err(corrupt(
                        line_no,
                        format!("duplicate edge {} -- {}", edge.endpoint_a, edge.endpoint_b),
                    ));
                }
                edges.push(edge);
            }
            other => {
                return Err(corrupt(line_no, format!("unknown record type {other:?}")));
            }
        }
    }

    if nodes.is_empty() {
        return Err(corrupt(text.lines().count(), "file has no node records".into()));
    }

    Ok(KnowledgeGraph::from_parts(
        nodes,
        edges,
        epsilon,
        dimension,
        version,
    ))
}

pub fn load_graph(path: &Path) -> Result<KnowledgeGraph, GraphError> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text)
}
