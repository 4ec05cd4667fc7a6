//! Shared input builders for the benchmark suite.

use magrag_core::corpus::ExtractedKnowledge;
use magrag_core::graph::{build_graph, GraphBuildOptions, KnowledgeGraph, Layer};
use magrag_core::providers::HashEmbedding;
use std::collections::BTreeMap;

/// Synthetic extraction with content sized like a real distillate.
pub fn synthetic_extraction(doc_index: usize) -> ExtractedKnowledge {
    let filler = "array response modeling with additive noise and a quadratic objective; ";
    let body = filler.repeat(12);
    let mut keywords_per_section = BTreeMap::new();
    for layer in Layer::CHAIN {
        keywords_per_section.insert(
            layer,
            vec![
                format!("doc {doc_index} {} primary topic", layer.code()),
                format!("doc {doc_index} secondary phrasing"),
            ],
        );
    }
    ExtractedKnowledge {
        doc_id: format!("doc{doc_index:03}.md"),
        terminological_description: format!("problem family of document {doc_index}; {body}"),
        example_information: format!("worked example {doc_index}; {body}"),
        system_model: format!("measurement model {doc_index}; {body}"),
        optimization_formulation: format!("objective and constraints {doc_index}; {body}"),
        optimization_algorithm: format!("solver recipe {doc_index}; {body}"),
        keywords_per_section,
    }
}

/// A built graph of `doc_count` documents with hash embeddings.
pub fn synthetic_graph(doc_count: usize, dimension: usize, epsilon: f64) -> KnowledgeGraph {
    let docs: Vec<ExtractedKnowledge> = (0..doc_count).map(synthetic_extraction).collect();
    let embed = HashEmbedding::new(dimension);
    build_graph(
        &docs,
        &embed,
        &GraphBuildOptions {
            epsilon,
            dd_same_layer_only: false,
        },
    )
    .expect("synthetic graph builds")
}
