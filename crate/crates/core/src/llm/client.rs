use crate::backend::{ExtractError, HttpJson};
use serde_json::{json, Value};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

pub const ENV_URL: &str = "SCIMINE_LLM_URL";
pub const ENV_KEY: &str = "SCIMINE_LLM_KEY";
pub const ENV_MODEL: &str = "SCIMINE_LLM_MODEL";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo";

/// Anything that turns one prompt into one answer. Every call is a fresh
/// conversation.
pub trait Completer: Sync {
    fn complete(&self, prompt: &str) -> Result<String, ExtractError>;
}

#[derive(Debug, Clone)]
pub struct LlmConfig {
    pub base_url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub max_in_flight: usize,
    /// Smallest gap between two request starts.
    pub min_interval: Duration,
    pub retries: u32,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl LlmConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        LlmConfig {
            base_url: base_url.into(),
            model: DEFAULT_MODEL.to_string(),
            api_key: None,
            max_in_flight: 4,
            min_interval: Duration::ZERO,
            retries: 3,
            backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(120),
        }
    }

    /// Reads `SCIMINE_LLM_URL`, `SCIMINE_LLM_KEY` and `SCIMINE_LLM_MODEL`.
    /// `None` when no URL is set.
    pub fn from_env() -> Option<Self> {
        let url = std::env::var(ENV_URL).ok().filter(|u| !u.is_empty())?;
        let mut cfg = LlmConfig::new(url);
        cfg.api_key = std::env::var(ENV_KEY).ok().filter(|k| !k.is_empty());
        if let Ok(m) = std::env::var(ENV_MODEL) {
            if !m.is_empty() {
                cfg.model = m;
            }
        }
        Some(cfg)
    }
}

/// Client for an OpenAI-style `/chat/completions` endpoint.
#[derive(Debug)]
pub struct ChatClient {
    http: HttpJson,
    cfg: LlmConfig,
    next_slot: Mutex<Instant>,
}

impl ChatClient {
    pub fn new(cfg: LlmConfig) -> Self {
        let http = HttpJson::new(cfg.base_url.clone(), cfg.max_in_flight, cfg.timeout).with_bearer(cfg.api_key.clone());
        ChatClient {
            http,
            cfg,
            next_slot: Mutex::new(Instant::now()),
        }
    }

    fn wait_turn(&self) {
        if self.cfg.min_interval.is_zero() {
            return;
        }
        let at = {
            let mut next = self.next_slot.lock().unwrap_or_else(|e| e.into_inner());
            let now = Instant::now();
            let at = (*next).max(now);
            *next = at + self.cfg.min_interval;
            at
        };
        let now = Instant::now();
        if at > now {
            thread::sleep(at - now);
        }
    }

    fn once(&self, prompt: &str) -> Result<String, ExtractError> {
        self.wait_turn();
        let body = json!({
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        });
        let v: Value = self.http.post("/chat/completions", &body)?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ExtractError::BackendProtocol("response lacks choices[0].message.content".into()))
    }
}

impl Completer for ChatClient {
    /// Retries with doubling backoff, only when the endpoint is
    /// unreachable or overloaded.
    fn complete(&self, prompt: &str) -> Result<String, ExtractError> {
        let mut delay = self.cfg.backoff;
        let mut attempt = 0;
        loop {
            match self.once(prompt) {
                Err(ExtractError::BackendUnavailable(msg)) if attempt < self.cfg.retries => {
                    log::warn!("chat endpoint unavailable ({msg}), retrying in {delay:?}");
                    thread::sleep(delay);
                    delay *= 2;
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::mock;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    fn cfg(url: &str) -> LlmConfig {
        let mut c = LlmConfig::new(url);
        c.backoff = Duration::from_millis(1);
        c.api_key = Some("k".into());
        c
    }

    #[test]
    fn wire_format() {
        let server = mock::serve(|path, body| {
            assert_eq!(path, "/chat/completions");
            assert_eq!(body["temperature"], 0);
            assert_eq!(body["messages"][0]["role"], "user");
            let reply = format!("echo: {}", body["messages"][0]["content"].as_str().unwrap());
            (200, json!({"choices": [{"message": {"role": "assistant", "content": reply}}]}).to_string())
        });
        let c = ChatClient::new(cfg(&server.url));
        assert_eq!(c.complete("hi").unwrap(), "echo: hi");
        assert_eq!(server.requests.lock().unwrap().len(), 1);
    }

    #[test]
    fn retries_only_transient() {
        let hits = Arc::new(AtomicUsize::new(0));
        let h = hits.clone();
        let server = mock::serve(move |_, _| {
            if h.fetch_add(1, Ordering::SeqCst) < 2 {
                (503, "busy".into())
            } else {
                (200, json!({"choices": [{"message": {"content": "[]"}}]}).to_string())
            }
        });
        let c = ChatClient::new(cfg(&server.url));
        assert_eq!(c.complete("q").unwrap(), "[]");
        assert_eq!(hits.load(Ordering::SeqCst), 3);

        let bad = mock::serve(|_, _| (200, json!({"nope": 1}).to_string()));
        let c = ChatClient::new(cfg(&bad.url));
        assert!(matches!(c.complete("q"), Err(ExtractError::BackendProtocol(_))));
        assert_eq!(bad.requests.lock().unwrap().len(), 1);
    }

    #[test]
    fn rate_limit_spaces_requests() {
        let server = mock::serve(|_, _| (200, json!({"choices": [{"message": {"content": "x"}}]}).to_string()));
        let mut c = cfg(&server.url);
        c.min_interval = Duration::from_millis(40);
        let client = ChatClient::new(c);
        let t = Instant::now();
        for _ in 0..3 {
            client.complete("q").unwrap();
        }
        assert!(t.elapsed() >= Duration::from_millis(80));
    }
}
