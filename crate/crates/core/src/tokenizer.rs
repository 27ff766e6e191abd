//! Token positions for extracted solutions.
//!
//! Character mode needs no vocabulary and measures positions in bytes. BPE
//! mode loads a byte-level vocabulary in the tiktoken text format (one
//! `base64(token) rank` pair per line) and pre-splits text with the cl100k
//! pattern before merging.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use base64::Engine;
use fancy_regex::Regex;

use crate::error::{Error, Result};

const CL100K_PATTERN: &str = r"(?i:'s|'t|'re|'ve|'m|'ll|'d)|[^\r\n\p{L}\p{N}]?\p{L}+|\p{N}{1,3}| ?[^\s\p{L}\p{N}]+[\r\n]*|\s*[\r\n]+|\s+(?!\S)|\s+";

struct Bpe {
    ranks: HashMap<Vec<u8>, u32>,
    pattern: Regex,
}

#[derive(Clone, Default)]
pub struct Tokenizer {
    bpe: Option<Arc<Bpe>>,
}

impl std::fmt::Debug for Tokenizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.bpe {
            None => f.write_str("Tokenizer(character)"),
            Some(b) => write!(f, "Tokenizer(bpe, {} ranks)", b.ranks.len()),
        }
    }
}

impl Tokenizer {
    pub fn character() -> Self {
        Self { bpe: None }
    }

    pub fn is_bpe(&self) -> bool {
        self.bpe.is_some()
    }

    pub fn mode(&self) -> &'static str {
        if self.is_bpe() {
            "bpe"
        } else {
            "character"
        }
    }

    pub fn from_tiktoken_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_tiktoken_str(&text)
    }

    pub fn from_tiktoken_str(text: &str) -> Result<Self> {
        let engine = base64::engine::general_purpose::STANDARD;
        let mut ranks = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Tokenizer(format!("vocabulary line {}: expected `<base64> <rank>`", lineno + 1));
            let (token, rank) = line.split_once(' ').ok_or_else(bad)?;
            let token = engine.decode(token).map_err(|_| bad())?;
            let rank: u32 = rank.trim().parse().map_err(|_| bad())?;
            ranks.insert(token, rank);
        }
        if let Some(b) = (0..=255u8).find(|b| !ranks.contains_key(&vec![*b])) {
            return Err(Error::Tokenizer(format!("vocabulary has no token for byte 0x{b:02x}")));
        }
        let pattern = Regex::new(CL100K_PATTERN).map_err(|e| Error::Tokenizer(e.to_string()))?;
        Ok(Self {
            bpe: Some(Arc::new(Bpe { ranks, pattern })),
        })
    }

    /// Byte offsets at which each token starts. Character mode yields one
    /// entry per byte.
    pub fn token_starts(&self, text: &str) -> Result<Vec<usize>> {
        let Some(bpe) = &self.bpe else {
            return Ok((0..text.len()).collect());
        };
        let mut starts = Vec::new();
        for piece in bpe.pattern.find_iter(text) {
            let piece = piece.map_err(|e| Error::Tokenizer(e.to_string()))?;
            let bytes = &text.as_bytes()[piece.start()..piece.end()];
            if bpe.ranks.contains_key(bytes) {
                starts.push(piece.start());
                continue;
            }
            starts.extend(bpe.merge(bytes).into_iter().map(|s| piece.start() + s));
        }
        Ok(starts)
    }

    /// Token count; character mode estimates one token per four bytes.
    pub fn count(&self, text: &str) -> Result<u64> {
        if self.is_bpe() {
            Ok(self.token_starts(text)?.len() as u64)
        } else {
            Ok(text.len().div_ceil(4) as u64)
        }
    }

    /// `(index of the token containing byte offset, total tokens)`, or `None`
    /// in character mode.
    pub fn token_index_at(&self, text: &str, offset: usize) -> Result<Option<(usize, usize)>> {
        if !self.is_bpe() {
            return Ok(None);
        }
        let starts = self.token_starts(text)?;
        if starts.is_empty() {
            return Err(Error::EmptyText);
        }
        let index = starts.partition_point(|&s| s <= offset).saturating_sub(1);
        Ok(Some((index, starts.len())))
    }
}

impl Bpe {
    /// Start offsets of the tokens of one pre-token piece after merging the
    /// lowest-ranked adjacent pair until none remains in the vocabulary.
    fn merge(&self, piece: &[u8]) -> Vec<usize> {
        let mut bounds: Vec<usize> = (0..=piece.len()).collect();
        loop {
            let mut best: Option<(u32, usize)> = None;
            for i in 0..bounds.len().saturating_sub(2) {
                if let Some(&r) = self.ranks.get(&piece[bounds[i]..bounds[i + 2]]) {
                    if best.is_none_or(|(b, _)| r < b) {
                        best = Some((r, i));
                    }
                }
            }
            match best {
                Some((_, i)) => {
                    bounds.remove(i + 1);
                }
                None => break,
            }
        }
        bounds.pop();
        bounds
    }
}
