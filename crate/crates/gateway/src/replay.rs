//! Replays canned transcripts. The fixture is JSON lines, one object per
//! transcript: `{prompt_hash, final_text, thinking_text?, usage?}`. Transcripts
//! sharing a prompt hash are served by sample index in file order.

use std::collections::HashMap;
use std::path::Path;

use puzzlebench_core::extract::split_thinking;
use puzzlebench_core::model::{PuzzleInstance, Usage};
use puzzlebench_core::prompt::PromptPair;
use puzzlebench_core::tokenizer::Tokenizer;
use serde::{Deserialize, Serialize};

use crate::{estimate_usage, Completion, GatewayError, Provider, ProviderConfig, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub prompt_hash: String,
    pub final_text: String,
    #[serde(default)]
    pub thinking_text: Option<String>,
    #[serde(default)]
    pub usage: Option<Usage>,
}

pub struct Replay {
    config: ProviderConfig,
    by_hash: HashMap<String, Vec<Transcript>>,
    tokenizer: Tokenizer,
}

impl Replay {
    pub fn from_config(config: ProviderConfig) -> Result<Self> {
        let path = config
            .replay_path
            .clone()
            .ok_or_else(|| GatewayError::Config("replay provider needs `replay_path`".into()))?;
        let transcripts = load_transcripts(&path)?;
        Ok(Self::new(config, transcripts))
    }

    pub fn new(config: ProviderConfig, transcripts: Vec<Transcript>) -> Self {
        let mut by_hash: HashMap<String, Vec<Transcript>> = HashMap::new();
        for t in transcripts {
            by_hash.entry(t.prompt_hash.clone()).or_default().push(t);
        }
        Self {
            config,
            by_hash,
            tokenizer: Tokenizer::character(),
        }
    }
}

pub fn load_transcripts(path: &Path) -> Result<Vec<Transcript>> {
    let text = std::fs::read_to_string(path).map_err(|e| GatewayError::Replay(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| GatewayError::Replay(format!("{} line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

impl Provider for Replay {
    fn config(&self) -> &ProviderConfig {
        &self.config
    }

    fn complete(&self, _instance: &PuzzleInstance, prompt: &PromptPair, sample_idx: u32) -> Result<Completion> {
        let transcript = self
            .by_hash
            .get(&prompt.prompt_hash)
            .and_then(|list| list.get(sample_idx as usize))
            .ok_or_else(|| {
                GatewayError::Replay(format!("no transcript for prompt {} sample {sample_idx}", prompt.prompt_hash))
            })?;
        let (thinking, final_text) = match &transcript.thinking_text {
            Some(t) => (Some(t.clone()), transcript.final_text.clone()),
            None => split_thinking(&transcript.final_text),
        };
        let usage = transcript
            .usage
            .unwrap_or_else(|| estimate_usage(&self.tokenizer, prompt, &final_text, thinking.as_deref()));
        Ok(Completion {
            final_text,
            thinking_text: thinking,
            usage,
            provider_meta: Default::default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use puzzlebench_core::config::ProviderKind;
    use puzzlebench_core::env::make_instance;
    use puzzlebench_core::model::{Params, PromptVariant, PuzzleKind};
    use puzzlebench_core::prompt::render;

    #[test]
    fn inline_think_block_is_split_losslessly() {
        let inst = make_instance(PuzzleKind::Hanoi, 1, &Params::new()).unwrap();
        let prompt = render(&inst, PromptVariant::Standard).unwrap();
        let raw = "<think>\nMove the only disk.\n</think>\n\nmoves = [[1, 0, 2]]";
        let replay = Replay::new(ProviderConfig::synthetic(ProviderKind::Replay, "r1"), vec![Transcript {
            prompt_hash: prompt.prompt_hash.clone(),
            final_text: raw.into(),
            thinking_text: None,
            usage: None,
        }]);
        let c = replay.complete(&inst, &prompt, 0).unwrap();
        assert_eq!(c.thinking_text.as_deref(), Some("\nMove the only disk.\n"));
        assert_eq!(format!("<think>{}</think>{}", c.thinking_text.unwrap(), c.final_text), raw);
        assert!(c.usage.thinking_tokens > 0);
        assert!(replay.complete(&inst, &prompt, 1).is_err());
    }
}
