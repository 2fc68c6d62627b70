use std::collections::VecDeque;
use std::sync::Mutex;

use super::{Backend, ChatMessage, Completion, CompletionParams, TokenUsage};
use crate::error::LlmError;

/// Returns enqueued responses in FIFO order, ignoring the request.
#[derive(Debug, Default)]
pub struct ScriptedBackend {
    queue: Mutex<VecDeque<String>>,
    cycle: bool,
}

impl ScriptedBackend {
    pub fn new(responses: impl IntoIterator<Item = String>) -> Self {
        ScriptedBackend {
            queue: Mutex::new(responses.into_iter().collect()),
            cycle: false,
        }
    }

    /// Like [`ScriptedBackend::new`], but each response goes back to the end
    /// of the queue once served, so the script never runs out.
    pub fn cycling(responses: impl IntoIterator<Item = String>) -> Self {
        ScriptedBackend {
            cycle: true,
            ..ScriptedBackend::new(responses)
        }
    }

    pub fn push(&self, response: impl Into<String>) {
        self.queue.lock().expect("script lock").push_back(response.into());
    }

    pub fn remaining(&self) -> usize {
        self.queue.lock().expect("script lock").len()
    }
}

impl Backend for ScriptedBackend {
    fn complete(
        &self,
        _request_hash: &str,
        _messages: &[ChatMessage],
        _params: &CompletionParams,
    ) -> Result<Completion, LlmError> {
        let mut queue = self.queue.lock().expect("script lock");
        let text = queue.pop_front().ok_or(LlmError::ScriptExhausted)?;
        if self.cycle {
            queue.push_back(text.clone());
        }
        drop(queue);
        Ok(Completion {
            text,
            usage: TokenUsage::default(),
            latency_s: Some(0.0),
        })
    }

    fn name(&self) -> &'static str {
        "scripted"
    }
}
