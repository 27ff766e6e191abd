//! Provider configuration shared by run manifests and the gateway.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    HttpChat,
    Replay,
    OracleSynthetic,
    CorruptingSynthetic,
}

impl ProviderKind {
    pub fn is_synthetic(self) -> bool {
        matches!(self, Self::OracleSynthetic | Self::CorruptingSynthetic)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            base_delay_ms: 1_000,
            max_delay_ms: 60_000,
        }
    }
}

fn default_temperature() -> f64 {
    1.0
}
fn default_max_output_tokens() -> u32 {
    64_000
}
fn default_samples() -> u32 {
    25
}
fn default_parallelism() -> usize {
    4
}
fn default_timeout() -> u64 {
    900
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub provider_kind: ProviderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    pub model_id: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_output_tokens")]
    pub max_output_tokens: u32,
    #[serde(default = "default_samples")]
    pub samples_per_instance: u32,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    /// Name of the environment variable holding the API key. The key itself
    /// never appears in configuration files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
    /// Reply field carrying separated reasoning, when the provider uses a
    /// name other than the common ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thinking_field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay_path: Option<PathBuf>,
    /// Move index the corrupting provider breaks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrupt_index: Option<usize>,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

impl ProviderConfig {
    pub fn synthetic(kind: ProviderKind, model_id: &str) -> Self {
        Self {
            provider_kind: kind,
            endpoint: None,
            model_id: model_id.to_string(),
            temperature: default_temperature(),
            max_output_tokens: default_max_output_tokens(),
            samples_per_instance: default_samples(),
            parallelism: default_parallelism(),
            api_key_env: None,
            thinking_field: None,
            replay_path: None,
            corrupt_index: None,
            retry: RetryPolicy::default(),
            timeout_secs: default_timeout(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let missing = |what: &str| {
            Err(Error::InvalidArgument(format!(
                "{} provider requires `{what}`",
                serde_json::to_value(self.provider_kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
            )))
        };
        if self.parallelism == 0 {
            return Err(Error::InvalidArgument("parallelism must be positive".into()));
        }
        if self.samples_per_instance == 0 {
            return Err(Error::InvalidArgument("samples_per_instance must be positive".into()));
        }
        if self.retry.max_attempts == 0 {
            return Err(Error::InvalidArgument("retry.max_attempts must be positive".into()));
        }
        match self.provider_kind {
            ProviderKind::HttpChat if self.endpoint.is_none() => missing("endpoint"),
            ProviderKind::HttpChat if self.api_key_env.is_none() => missing("api_key_env"),
            ProviderKind::Replay if self.replay_path.is_none() => missing("replay_path"),
            ProviderKind::CorruptingSynthetic if self.corrupt_index.is_none() => missing("corrupt_index"),
            _ => Ok(()),
        }
    }
}
