//! HTTP judge endpoint and a bounded-concurrency driver.
//!
//! The wire contract is deliberately small: `POST url` with body
//! `{"prompt": "..."}` (plus `"model"` when configured); the reply is either
//! a JSON object with a string field `completion` or a plain-text body.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use anyhow::{ensure, Context, Result};
use corpuskit_core::sft::{judge_pair, InstructionPair, Judge, JudgeConfig, JudgeRecord};
use serde::{Deserialize, Serialize};

pub const DEFAULT_TOKEN_ENV: &str = "CORPUSKIT_JUDGE_TOKEN";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointConfig {
    pub url: String,
    /// Environment variable holding the bearer token; unauthenticated if unset.
    pub token_env: String,
    pub model: Option<String>,
    pub timeout_secs: u64,
    /// Base delay before the first retry; doubles on each further retry.
    pub backoff_ms: u64,
    pub max_in_flight: usize,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            url: String::new(),
            token_env: DEFAULT_TOKEN_ENV.into(),
            model: None,
            timeout_secs: 60,
            backoff_ms: 500,
            max_in_flight: 4,
        }
    }
}

impl EndpointConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.url.starts_with("http://") || self.url.starts_with("https://"),
            "judge url must be http(s), got {:?}",
            self.url
        );
        ensure!(self.timeout_secs > 0, "judge timeout must be positive");
        ensure!(self.max_in_flight > 0, "max_in_flight must be at least 1");
        Ok(())
    }
}

pub struct HttpJudge {
    agent: ureq::Agent,
    cfg: EndpointConfig,
    token: Option<String>,
}

impl HttpJudge {
    pub fn new(cfg: &EndpointConfig) -> Result<Self> {
        cfg.validate()?;
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(cfg.timeout_secs))
            .build();
        let token = std::env::var(&cfg.token_env).ok().filter(|t| !t.is_empty());
        Ok(HttpJudge {
            agent,
            cfg: cfg.clone(),
            token,
        })
    }
}

#[derive(Deserialize)]
struct CompletionBody {
    completion: String,
}

pub fn extract_completion(body: &str) -> String {
    match serde_json::from_str::<CompletionBody>(body) {
        Ok(c) => c.completion,
        Err(_) => body.to_owned(),
    }
}

impl Judge for HttpJudge {
    fn complete(&mut self, prompt: &str) -> std::result::Result<String, String> {
        let mut body = serde_json::json!({ "prompt": prompt });
        if let Some(model) = &self.cfg.model {
            body["model"] = model.clone().into();
        }
        let mut req = self.agent.post(&self.cfg.url);
        if let Some(token) = &self.token {
            req = req.set("Authorization", &format!("Bearer {token}"));
        }
        let resp = req
            .set("Content-Type", "application/json")
            .send_string(&body.to_string())
            .map_err(|e| e.to_string())?;
        let text = resp.into_string().map_err(|e| e.to_string())?;
        Ok(extract_completion(&text))
    }

    fn backoff(&mut self, attempt: u32) {
        let factor = 1u64 << (attempt.saturating_sub(1)).min(10);
        std::thread::sleep(Duration::from_millis(
            self.cfg.backoff_ms.saturating_mul(factor),
        ));
    }
}

/// Judges `pairs` with up to `max_in_flight` concurrent judges, one per
/// worker, created by `make_judge`. Records come back in input order.
pub fn judge_concurrently<J, F>(
    pairs: &[InstructionPair],
    cfg: &JudgeConfig,
    max_in_flight: usize,
    make_judge: F,
) -> Result<Vec<JudgeRecord>>
where
    J: Judge,
    F: Fn() -> Result<J> + Sync,
{
    let workers = max_in_flight.clamp(1, pairs.len().max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<JudgeRecord>>> = Mutex::new(vec![None; pairs.len()]);
    std::thread::scope(|scope| -> Result<()> {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| -> Result<()> {
                    let mut judge = make_judge()?;
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(pair) = pairs.get(i) else {
                            return Ok(());
                        };
                        let record = judge_pair(&mut judge, pair, cfg);
                        results.lock().unwrap()[i] = Some(record);
                    }
                })
            })
            .collect();
        for h in handles {
            h.join()
                .expect("judge worker panicked")
                .context("starting judge worker")?;
        }
        Ok(())
    })?;
    Ok(results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every pair judged"))
        .collect())
}
