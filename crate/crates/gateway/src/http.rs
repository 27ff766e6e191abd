//! JSON chat-completion client with retry, backoff and `Retry-After`.

use std::collections::BTreeMap;
use std::time::Duration;

use puzzlebench_core::extract::split_thinking;
use puzzlebench_core::model::{PuzzleInstance, Usage};
use puzzlebench_core::prompt::PromptPair;
use puzzlebench_core::tokenizer::Tokenizer;
use serde_json::{json, Value};

use crate::{estimate_usage, Completion, GatewayError, Provider, ProviderConfig, Result, RetryPolicy};

/// Reply fields that carry separated reasoning, tried in order after any
/// configured name.
const THINKING_FIELDS: &[&str] = &["reasoning_content", "reasoning", "thinking"];

pub struct HttpChat {
    config: ProviderConfig,
    agent: ureq::Agent,
    api_key: String,
    tokenizer: Tokenizer,
}

impl HttpChat {
    pub fn new(config: ProviderConfig) -> Result<Self> {
        let var = config
            .api_key_env
            .clone()
            .ok_or_else(|| GatewayError::Config("http_chat needs `api_key_env`".into()))?;
        let api_key = std::env::var(&var)
            .map_err(|_| GatewayError::Config(format!("environment variable `{var}` is not set")))?;
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build();
        Ok(Self {
            config,
            agent,
            api_key,
            tokenizer: Tokenizer::character(),
        })
    }

    pub fn request_body(&self, prompt: &PromptPair) -> Value {
        json!({
            "model": self.config.model_id,
            "messages": [
                {"role": "system", "content": prompt.system_text},
                {"role": "user", "content": prompt.user_text},
            ],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_output_tokens,
        })
    }

    fn parse_reply(&self, prompt: &PromptPair, reply: &Value) -> Result<Completion> {
        let message = reply
            .pointer("/choices/0/message")
            .ok_or_else(|| GatewayError::BadReply("missing choices[0].message".into()))?;
        let content = message.get("content").and_then(Value::as_str).unwrap_or_default();
        let separate = self
            .config
            .thinking_field
            .iter()
            .map(String::as_str)
            .chain(THINKING_FIELDS.iter().copied())
            .find_map(|f| message.get(f).and_then(Value::as_str))
            .map(str::to_string);
        let (thinking, final_text) = match separate {
            Some(t) => (Some(t), content.to_string()),
            None => split_thinking(content),
        };
        let usage = match reply.get("usage") {
            Some(u) if u.get("completion_tokens").is_some() => {
                let field = |p: &str| u.pointer(p).and_then(Value::as_u64);
                let thinking_tokens = field("/completion_tokens_details/reasoning_tokens")
                    .or_else(|| field("/reasoning_tokens"))
                    .unwrap_or_else(|| {
                        thinking
                            .as_deref()
                            .map_or(0, |t| self.tokenizer.count(t).unwrap_or(0))
                    });
                Usage {
                    prompt_tokens: field("/prompt_tokens").unwrap_or(0),
                    completion_tokens: field("/completion_tokens").unwrap_or(0),
                    thinking_tokens,
                }
            }
            _ => estimate_usage(&self.tokenizer, prompt, &final_text, thinking.as_deref()),
        };
        let mut provider_meta = BTreeMap::new();
        for key in ["id", "model"] {
            if let Some(v) = reply.get(key) {
                provider_meta.insert(key.to_string(), v.clone());
            }
        }
        if let Some(v) = reply.pointer("/choices/0/finish_reason") {
            provider_meta.insert("finish_reason".into(), v.clone());
        }
        Ok(Completion {
            final_text,
            thinking_text: thinking,
            usage,
            provider_meta,
        })
    }
}

/// Delay before retry number `attempt` (1-based): exponential from the base
/// delay, capped.
pub fn backoff_delay(policy: &RetryPolicy, attempt: u32) -> Duration {
    let factor = 1u64.checked_shl(attempt.saturating_sub(1).min(32)).unwrap_or(u64::MAX);
    Duration::from_millis(policy.base_delay_ms.saturating_mul(factor).min(policy.max_delay_ms))
}

fn retry_after(response: &ureq::Response) -> Option<Duration> {
    response.header("retry-after")?.trim().parse::<u64>().ok().map(Duration::from_secs)
}

impl Provider for HttpChat {
    fn config(&self) -> &ProviderConfig {
        &self.config
    }

    fn complete(&self, _instance: &PuzzleInstance, prompt: &PromptPair, _sample_idx: u32) -> Result<Completion> {
        let endpoint = self
            .config
            .endpoint
            .as_deref()
            .ok_or_else(|| GatewayError::Config("http_chat needs `endpoint`".into()))?;
        let body = self.request_body(prompt);
        let policy = &self.config.retry;
        let mut last_error = String::new();
        for attempt in 1..=policy.max_attempts {
            let outcome = self
                .agent
                .post(endpoint)
                .set("Authorization", &format!("Bearer {}", self.api_key))
                .send_json(&body);
            let wait = match outcome {
                Ok(response) => {
                    let reply: Value = response
                        .into_json()
                        .map_err(|e| GatewayError::BadReply(format!("reply is not JSON: {e}")))?;
                    return self.parse_reply(prompt, &reply);
                }
                Err(ureq::Error::Status(status, response)) if status == 429 || status >= 500 => {
                    last_error = format!("status {status}");
                    let hinted = if status == 429 { retry_after(&response) } else { None };
                    hinted
                        .map(|d| d.min(Duration::from_millis(policy.max_delay_ms)))
                        .unwrap_or_else(|| backoff_delay(policy, attempt))
                }
                Err(ureq::Error::Status(status, response)) => {
                    let body = response.into_string().unwrap_or_default();
                    return Err(GatewayError::Rejected { status, body });
                }
                Err(ureq::Error::Transport(t)) => {
                    last_error = t.to_string();
                    backoff_delay(policy, attempt)
                }
            };
            if attempt < policy.max_attempts {
                std::thread::sleep(wait);
            }
        }
        Err(GatewayError::Transport {
            attempts: policy.max_attempts,
            message: last_error,
        })
    }
}
