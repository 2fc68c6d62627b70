use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Backend, ChatMessage, Completion, CompletionParams, TokenUsage};
use crate::error::LlmError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteConfig {
    /// Base URL; `/chat/completions` is appended.
    pub endpoint: String,
    /// Environment variable holding the bearer token.
    pub api_key_env: String,
    pub timeout_s: u64,
    pub attempts: u32,
    pub backoff_ms: u64,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            endpoint: "https://api.openai.com/v1".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            timeout_s: 120,
            attempts: 3,
            backoff_ms: 1000,
        }
    }
}

/// OpenAI-compatible chat-completions client.
pub struct RemoteBackend {
    config: RemoteConfig,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl RemoteBackend {
    pub fn new(config: RemoteConfig) -> Self {
        let api_key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_s)))
            .build()
            .into();
        RemoteBackend {
            config,
            api_key,
            agent,
        }
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.config.endpoint.trim_end_matches('/'))
    }

    fn attempt(&self, body: &Value) -> Result<Value, String> {
        let mut request = self.agent.post(self.url());
        if let Some(key) = &self.api_key {
            request = request.header("Authorization", format!("Bearer {key}"));
        }
        let mut response = request.send_json(body).map_err(|e| e.to_string())?;
        response
            .body_mut()
            .read_json::<Value>()
            .map_err(|e| e.to_string())
    }
}

fn parse_completion(value: &Value) -> Result<Completion, LlmError> {
    let text = value
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| LlmError::Malformed(format!("no choices[0].message.content in {value}")))?;
    let count = |key: &str| {
        value
            .pointer(&format!("/usage/{key}"))
            .and_then(Value::as_u64)
            .unwrap_or(0)
    };
    Ok(Completion {
        text: text.to_string(),
        usage: TokenUsage {
            prompt: count("prompt_tokens"),
            completion: count("completion_tokens"),
        },
        latency_s: None,
    })
}

impl Backend for RemoteBackend {
    fn complete(
        &self,
        _request_hash: &str,
        messages: &[ChatMessage],
        params: &CompletionParams,
    ) -> Result<Completion, LlmError> {
        let mut body = json!({
            "model": params.model,
            "messages": messages,
            "temperature": params.temperature,
        });
        if let Some(max) = params.max_tokens {
            body["max_tokens"] = json!(max);
        }
        let attempts = self.config.attempts.max(1);
        let mut last_error = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                let wait = self.config.backoff_ms.saturating_mul(1 << (attempt - 1));
                std::thread::sleep(Duration::from_millis(wait));
            }
            match self.attempt(&body) {
                Ok(value) => return parse_completion(&value),
                Err(e) => {
                    log::warn!("completion attempt {} of {attempts} failed: {e}", attempt + 1);
                    last_error = e;
                }
            }
        }
        Err(LlmError::Transport {
            attempts,
            message: last_error,
        })
    }

    fn name(&self) -> &'static str {
        "remote"
    }
}

#[cfg(test)]
mod tests {
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::sync::Arc;

    use super::*;
    use crate::error::Error;
    use crate::llm::Gateway;

    /// Serves `replies` (status, body) to successive connections and returns
    /// the request bodies it saw.
    fn serve(replies: Vec<(u16, String)>) -> (String, std::thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let handle = std::thread::spawn(move || {
            let mut bodies = Vec::new();
            for (status, reply) in replies {
                let (stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut length = 0;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        length = v.trim().parse().unwrap();
                    }
                }
                let mut body = vec![0; length];
                reader.read_exact(&mut body).unwrap();
                bodies.push(String::from_utf8(body).unwrap());
                let mut stream = stream;
                write!(
                    stream,
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{reply}",
                    reply.len()
                )
                .unwrap();
            }
            bodies
        });
        (format!("http://{addr}/v1"), handle)
    }

    fn backend(endpoint: String) -> RemoteBackend {
        RemoteBackend::new(RemoteConfig {
            endpoint,
            api_key_env: "GRAPHCODE_TEST_UNSET_KEY".into(),
            timeout_s: 5,
            attempts: 3,
            backoff_ms: 1,
        })
    }

    #[test]
    fn retries_then_succeeds_and_counts_once() {
        let ok = r#"{"choices":[{"message":{"role":"assistant","content":"def f(): pass"}}],"usage":{"prompt_tokens":7,"completion_tokens":3}}"#;
        let (url, server) = serve(vec![(500, "{}".into()), (200, ok.into())]);
        let gw = Gateway::new(Arc::new(backend(url)), CompletionParams::default());
        let (text, record) = gw.complete(&[ChatMessage::user("write code")]).unwrap();
        assert_eq!(text, "def f(): pass");
        assert_eq!(record.usage, TokenUsage { prompt: 7, completion: 3 });
        assert_eq!(gw.calls(), 1);
        let bodies = server.join().unwrap();
        assert_eq!(bodies.len(), 2);
        let sent: Value = serde_json::from_str(&bodies[1]).unwrap();
        assert_eq!(sent["messages"][0]["role"], "user");
        assert_eq!(sent["temperature"], 0.0);
    }

    #[test]
    fn exhausted_retries_are_transport_errors() {
        let (url, server) = serve(vec![(503, "{}".into()); 3]);
        let gw = Gateway::new(Arc::new(backend(url)), CompletionParams::default());
        let err = gw.complete(&[ChatMessage::user("x")]).unwrap_err();
        assert!(matches!(err, Error::Llm(LlmError::Transport { attempts: 3, .. })));
        assert_eq!(gw.calls(), 0);
        server.join().unwrap();
    }

    #[test]
    fn malformed_body() {
        assert!(matches!(
            parse_completion(&json!({"choices": []})),
            Err(LlmError::Malformed(_))
        ));
    }
}
