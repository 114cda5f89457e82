//! JSON-over-HTTP plumbing shared by the remote extractor backends and the
//! chat-completions client.

use serde_json::Value;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("backend protocol error: {0}")]
    BackendProtocol(String),
    #[error("payload too large: {size} > {limit}")]
    PayloadTooLarge { size: usize, limit: usize },
}

/// Counting semaphore bounding concurrent requests.
#[derive(Debug)]
pub struct Limiter {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Limiter {
    pub fn new(permits: usize) -> Self {
        Limiter {
            free: Mutex::new(permits.max(1)),
            cv: Condvar::new(),
        }
    }

    pub fn run<T>(&self, f: impl FnOnce() -> T) -> T {
        {
            let mut free = self.free.lock().expect("limiter lock");
            while *free == 0 {
                free = self.cv.wait(free).expect("limiter lock");
            }
            *free -= 1;
        }
        let out = f();
        *self.free.lock().expect("limiter lock") += 1;
        self.cv.notify_one();
        out
    }
}

/// A base URL plus an agent with a bounded number of in-flight requests.
#[derive(Debug)]
pub struct HttpJson {
    pub base_url: String,
    agent: ureq::Agent,
    limiter: Limiter,
    bearer: Option<String>,
}

impl HttpJson {
    pub fn new(base_url: impl Into<String>, max_in_flight: usize, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpJson {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            agent,
            limiter: Limiter::new(max_in_flight),
            bearer: None,
        }
    }

    pub fn with_bearer(mut self, token: Option<String>) -> Self {
        self.bearer = token;
        self
    }

    /// POSTs `body` to `path`. Transport failures and 5xx/429 map to
    /// `BackendUnavailable`; other non-2xx statuses and undecodable bodies
    /// to `BackendProtocol`.
    pub fn post(&self, path: &str, body: &Value) -> Result<Value, ExtractError> {
        let url = format!("{}{}", self.base_url, path);
        self.limiter.run(|| {
            let mut req = self.agent.post(&url);
            if let Some(tok) = &self.bearer {
                req = req.header("Authorization", &format!("Bearer {tok}"));
            }
            let mut resp = req
                .send_json(body)
                .map_err(|e| ExtractError::BackendUnavailable(format!("{url}: {e}")))?;
            let status = resp.status().as_u16();
            let text = resp
                .body_mut()
                .read_to_string()
                .map_err(|e| ExtractError::BackendUnavailable(format!("{url}: {e}")))?;
            if status == 429 || status >= 500 {
                return Err(ExtractError::BackendUnavailable(format!("{url}: HTTP {status}")));
            }
            if !(200..300).contains(&status) {
                return Err(ExtractError::BackendProtocol(format!("{url}: HTTP {status}: {text}")));
            }
            serde_json::from_str(&text)
                .map_err(|e| ExtractError::BackendProtocol(format!("{url}: invalid JSON: {e}")))
        })
    }
}
