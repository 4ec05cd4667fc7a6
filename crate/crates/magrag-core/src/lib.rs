//! Graph-RAG engine for automated optimization modeling of sensor array
//! signal processing (SASP) problems.
//!
//! The crate is organized around two workflows:
//!
//! 1. **Knowledge base construction**: [`corpus`] loads raw domain documents
//!    and distills each one into five structured sections; [`graph`] places
//!    the distillate on a four-layer knowledge graph (Problem Type, System
//!    Model, Optimization Formulation, Optimization Algorithm) with
//!    single-document chain edges and cross-document similarity edges.
//! 2. **Query answering**: [`pipeline`] orchestrates the agents: a
//!    terminology agent normalizes the user query, [`retrieval`] scores the
//!    Problem Type layer and assembles a knowledge bundle from the top-k
//!    chains, and a modeling agent produces the final optimization modeling
//!    result. Two baselines (an agent chain with generated knowledge, and a
//!    single direct completion) run through the same machinery.
//!
//! [`providers`] abstracts the chat-completion and text-embedding backends
//! behind traits with deterministic local fakes, so every workflow is
//! testable offline. [`eval`] scores modeling results under a five-metric
//! rubric and computes comparison statistics over score tables.

pub mod corpus;
pub mod eval;
pub mod graph;
pub mod pipeline;
pub mod prompts;
pub mod providers;
pub mod retrieval;

pub use corpus::{ExtractedKnowledge, SourceDocument};
pub use graph::{GraphEdge, GraphNode, KnowledgeGraph, Layer};
pub use pipeline::{ModelingResult, RunMode, TerminologicalDescription, UserQuery};
pub use prompts::PromptSet;
pub use providers::{ChatProvider, ChatRequest, EmbeddingProvider, EmbeddingVector};
pub use retrieval::KnowledgeBundle;
