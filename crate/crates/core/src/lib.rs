//! Pseudocode-guided code generation and evaluation for graph tasks.
//!
//! The crate builds graph benchmarks with reference answers, assembles
//! prompts from fixture files, drives a language model through a bounded
//! generate/test/repair loop, executes the resulting Python functions in a
//! subprocess sandbox and scores them.

pub mod baseline;
pub mod dataset;
pub mod error;
pub mod graph;
pub mod llm;
pub mod metrics;
pub mod orchestrator;
pub mod par;
pub mod prompts;
pub mod reference;
pub mod sandbox;
pub mod solvers;
pub mod task;

pub use error::{Error, LlmError, Result};
pub use graph::{Graph, SerializationFormat, SizeBucket, WeightedCompleteGraph};
pub use task::{Answer, GroundTruth, Provenance, TaskInstance, TaskKind};
