//! Model providers and the run driver.
//!
//! A [`Provider`] turns one rendered prompt into a [`Completion`]. The live
//! HTTP client speaks the common JSON chat-completion shape; the replay
//! provider serves canned transcripts; the synthetic providers answer from
//! the puzzle oracles, optionally with an injected fault, so whole runs can
//! be exercised offline.

pub mod http;
pub mod replay;
pub mod run;
pub mod synthetic;

use std::collections::BTreeMap;

use puzzlebench_core::model::{PuzzleInstance, Usage};
use puzzlebench_core::prompt::PromptPair;
use puzzlebench_core::tokenizer::Tokenizer;
use serde::{Deserialize, Serialize};

pub use puzzlebench_core::config::{ProviderConfig, ProviderKind, RetryPolicy};

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("provider rejected the request with status {status}: {body}")]
    Rejected { status: u16, body: String },
    #[error("unexpected provider reply: {0}")]
    BadReply(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("replay: {0}")]
    Replay(String),
    #[error(transparent)]
    Core(#[from] puzzlebench_core::Error),
}

pub type Result<T, E = GatewayError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Completion {
    pub final_text: String,
    pub thinking_text: Option<String>,
    pub usage: Usage,
    #[serde(default)]
    pub provider_meta: BTreeMap<String, serde_json::Value>,
}

pub trait Provider: Send + Sync {
    fn config(&self) -> &ProviderConfig;

    fn complete(&self, instance: &PuzzleInstance, prompt: &PromptPair, sample_idx: u32) -> Result<Completion>;
}

/// Usage estimated from text when a provider reports none.
pub fn estimate_usage(tokenizer: &Tokenizer, prompt: &PromptPair, final_text: &str, thinking: Option<&str>) -> Usage {
    let count = |t: &str| tokenizer.count(t).unwrap_or_else(|_| t.len().div_ceil(4) as u64);
    let thinking_tokens = thinking.map_or(0, count);
    Usage {
        prompt_tokens: count(&prompt.system_text) + count(&prompt.user_text),
        completion_tokens: count(final_text) + thinking_tokens,
        thinking_tokens,
    }
}

pub fn build_provider(config: &ProviderConfig) -> Result<Box<dyn Provider>> {
    config.validate()?;
    Ok(match config.provider_kind {
        ProviderKind::HttpChat => Box::new(http::HttpChat::new(config.clone())?),
        ProviderKind::Replay => Box::new(replay::Replay::from_config(config.clone())?),
        ProviderKind::OracleSynthetic | ProviderKind::CorruptingSynthetic => {
            Box::new(synthetic::Synthetic::new(config.clone()))
        }
    })
}
