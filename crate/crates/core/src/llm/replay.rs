use std::collections::HashMap;
use std::sync::Mutex;

use super::{Backend, ChatMessage, Completion, CompletionParams, Session};
use crate::error::LlmError;

/// Serves recorded responses by request hash. The k-th request with a given
/// hash gets the k-th recorded response; once a hash's list is used up the
/// last response is repeated.
#[derive(Debug)]
pub struct ReplayBackend {
    session: Session,
    cursor: Mutex<HashMap<String, usize>>,
}

impl ReplayBackend {
    pub fn from_session(session: Session) -> Self {
        ReplayBackend {
            session,
            cursor: Mutex::new(HashMap::new()),
        }
    }
}

impl Backend for ReplayBackend {
    fn complete(
        &self,
        request_hash: &str,
        _messages: &[ChatMessage],
        _params: &CompletionParams,
    ) -> Result<Completion, LlmError> {
        let list = self
            .session
            .entries
            .get(request_hash)
            .filter(|l| !l.is_empty())
            .ok_or_else(|| LlmError::ReplayMiss(request_hash.to_string()))?;
        let mut cursor = self.cursor.lock().expect("cursor lock");
        let k = cursor.entry(request_hash.to_string()).or_insert(0);
        let entry = &list[(*k).min(list.len() - 1)];
        *k += 1;
        Ok(Completion {
            text: entry.response.clone(),
            usage: entry.usage,
            latency_s: Some(entry.latency_s),
        })
    }

    fn name(&self) -> &'static str {
        "replay"
    }
}
