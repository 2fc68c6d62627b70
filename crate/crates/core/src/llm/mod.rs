//! Chat-completion gateway with remote, replay and scripted backends.
//!
//! The gateway counts logical completions: a request that fails after all
//! retries is not counted, and transport retries inside the remote backend
//! never are.

mod remote;
mod replay;
mod scripted;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, LlmError, Result};

pub use remote::{RemoteBackend, RemoteConfig};
pub use replay::ReplayBackend;
pub use scripted::ScriptedBackend;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        ChatMessage {
            role,
            content: content.into(),
        }
    }

    pub fn system(content: impl Into<String>) -> Self {
        Self::new(Role::System, content)
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self::new(Role::User, content)
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self::new(Role::Assistant, content)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompletionParams {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: Option<u32>,
}

impl Default for CompletionParams {
    fn default() -> Self {
        CompletionParams {
            model: "gpt-4o-mini".into(),
            temperature: 0.0,
            max_tokens: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt: u64,
    pub completion: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub request_hash: String,
    pub response: String,
    pub latency_s: f64,
    pub usage: TokenUsage,
}

/// What a backend hands back for one request.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: String,
    pub usage: TokenUsage,
    /// Latency to report instead of the measured one. Replay uses this to
    /// reproduce recorded timings; scripted responses report zero.
    pub latency_s: Option<f64>,
}

pub trait Backend: Send + Sync {
    fn complete(
        &self,
        request_hash: &str,
        messages: &[ChatMessage],
        params: &CompletionParams,
    ) -> std::result::Result<Completion, LlmError>;

    fn name(&self) -> &'static str;
}

/// Hex SHA-256 of the canonical JSON encoding of (model, params, messages).
pub fn request_hash(messages: &[ChatMessage], params: &CompletionParams) -> String {
    #[derive(Serialize)]
    struct Key<'a> {
        model: &'a str,
        temperature: f64,
        max_tokens: Option<u32>,
        messages: &'a [ChatMessage],
    }
    let key = Key {
        model: &params.model,
        temperature: params.temperature,
        max_tokens: params.max_tokens,
        messages,
    };
    let bytes = serde_json::to_vec(&key).expect("request key serializes");
    hex::encode(Sha256::digest(&bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEntry {
    pub response: String,
    #[serde(default)]
    pub latency_s: f64,
    #[serde(default)]
    pub usage: TokenUsage,
}

/// Recorded responses keyed by request hash. A hash maps to a list so that a
/// transcript which repeats an identical request replays each response in
/// order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub entries: BTreeMap<String, Vec<SessionEntry>>,
}

impl Session {
    pub fn load(path: &Path) -> Result<Session> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path.display().to_string(), e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("session serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn push(&mut self, hash: &str, entry: SessionEntry) {
        self.entries.entry(hash.to_string()).or_default().push(entry);
    }

    pub fn merge(&mut self, other: Session) {
        for (hash, list) in other.entries {
            self.entries.entry(hash).or_default().extend(list);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub struct Gateway {
    backend: Arc<dyn Backend>,
    params: CompletionParams,
    calls: AtomicU64,
    records: Mutex<Vec<CallRecord>>,
    recording: Option<Mutex<Session>>,
}

impl Gateway {
    pub fn new(backend: Arc<dyn Backend>, params: CompletionParams) -> Self {
        Gateway {
            backend,
            params,
            calls: AtomicU64::new(0),
            records: Mutex::new(Vec::new()),
            recording: None,
        }
    }

    /// Also keep every completion in a session that `session()` returns.
    pub fn recording(mut self) -> Self {
        self.recording = Some(Mutex::new(Session::default()));
        self
    }

    pub fn params(&self) -> &CompletionParams {
        &self.params
    }

    pub fn backend_name(&self) -> &'static str {
        self.backend.name()
    }

    pub fn complete(&self, messages: &[ChatMessage]) -> Result<(String, CallRecord)> {
        if messages.is_empty() {
            return Err(Error::Precondition("completion needs at least one message".into()));
        }
        if let Some(m) = messages.iter().find(|m| m.content.is_empty()) {
            return Err(Error::Precondition(format!("empty {:?} message", m.role)));
        }
        let hash = request_hash(messages, &self.params);
        let started = Instant::now();
        let completion = self.backend.complete(&hash, messages, &self.params)?;
        let measured = started.elapsed().as_secs_f64();
        let record = CallRecord {
            request_hash: hash.clone(),
            response: completion.text.clone(),
            latency_s: completion.latency_s.unwrap_or(measured).max(0.0),
            usage: completion.usage,
        };
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.records.lock().expect("records lock").push(record.clone());
        if let Some(session) = &self.recording {
            session.lock().expect("session lock").push(
                &hash,
                SessionEntry {
                    response: record.response.clone(),
                    latency_s: record.latency_s,
                    usage: record.usage,
                },
            );
        }
        log::debug!("llm call {} via {}", &hash[..12], self.backend.name());
        Ok((completion.text, record))
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn records(&self) -> Vec<CallRecord> {
        self.records.lock().expect("records lock").clone()
    }

    pub fn mean_latency_s(&self) -> Option<f64> {
        let records = self.records.lock().expect("records lock");
        (!records.is_empty())
            .then(|| records.iter().map(|r| r.latency_s).sum::<f64>() / records.len() as f64)
    }

    pub fn session(&self) -> Option<Session> {
        self.recording
            .as_ref()
            .map(|s| s.lock().expect("session lock").clone())
    }

    pub fn record_session(&self, path: &Path) -> Result<()> {
        match self.session() {
            Some(session) => session.save(path),
            None => Err(Error::Config("gateway was not created in recording mode".into())),
        }
    }
}
