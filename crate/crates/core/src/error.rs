use std::path::PathBuf;

use thiserror::Error;

use crate::task::TaskKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("node {v} is unreachable from node {u}")]
    Unreachable { u: usize, v: usize },

    #[error("instance of {task} with {nodes} nodes is outside the brute-force oracle range")]
    OracleRange { task: TaskKind, nodes: usize },

    #[error("exact solver exceeded its time budget")]
    SolverTimeout,

    #[error("unknown task id `{0}`")]
    UnknownTask(String),

    #[error("pseudocode variant `{variant}` is not available for task {task}")]
    VariantUnavailable { task: TaskKind, variant: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Llm(#[from] LlmError),

    #[error("sandbox harness fault: {0}")]
    Harness(String),

    #[error("no function definition found in model response")]
    Extraction,

    #[error("code generation failed for {task}: every candidate lacked extractable code")]
    GenerationFailed {
        task: TaskKind,
        transcripts: Vec<Vec<crate::llm::ChatMessage>>,
    },

    #[error("approximation ratio undefined: ground truth at index {index} is zero")]
    UndefinedRatio { index: usize },

    #[error("{metric} is not applicable to polynomial task {task}")]
    NotApplicable { metric: &'static str, task: TaskKind },

    #[error("length mismatch: {predictions} predictions vs {truths} ground truths")]
    LengthMismatch { predictions: usize, truths: usize },

    #[error("no `The answer is ...` line found in response")]
    UnparseableAnswer,

    #[error("missing entries for indices {0:?}")]
    MissingIndices(Vec<usize>),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("transport failure after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },

    #[error("replay cache has no response for request {0}")]
    ReplayMiss(String),

    #[error("scripted backend has no responses left")]
    ScriptExhausted,

    #[error("malformed completion response: {0}")]
    Malformed(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }

    /// True for faults in the harness itself rather than in user input or
    /// candidate code.
    pub fn is_harness_fault(&self) -> bool {
        matches!(self, Error::Harness(_))
    }
}
