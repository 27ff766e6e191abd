//! Prompt rendering from the template assets in `templates/`.
//!
//! One file per (puzzle, role, variant), named `<puzzle>.<role>.<variant>.txt`,
//! with `${name}` placeholders. Rendering is deterministic and every
//! placeholder must be bound.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{PromptVariant, PuzzleInstance, PuzzleKind, PuzzleState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPair {
    pub system_text: String,
    pub user_text: String,
    pub variant: PromptVariant,
    pub prompt_hash: String,
}

impl PromptPair {
    fn new(system_text: String, user_text: String, variant: PromptVariant) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(system_text.as_bytes());
        hasher.update([0u8]);
        hasher.update(user_text.as_bytes());
        Self {
            prompt_hash: hex::encode(hasher.finalize()),
            system_text,
            user_text,
            variant,
        }
    }
}

macro_rules! builtin {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../templates/", $name, ".txt")))),*]
    };
}

const BUILTIN: &[(&str, &str)] = builtin!(
    "hanoi.system.standard",
    "hanoi.user.standard",
    "hanoi.system.prescribed_algorithm",
    "hanoi.user.prescribed_algorithm",
    "checkers.system.standard",
    "checkers.user.standard",
    "river.system.standard",
    "river.user.standard",
    "blocks.system.standard",
    "blocks.user.standard",
);

#[derive(Debug, Clone)]
pub struct TemplateSet {
    files: BTreeMap<String, String>,
}

impl Default for TemplateSet {
    fn default() -> Self {
        Self::builtin()
    }
}

fn strip_final_newline(text: &str) -> String {
    text.strip_suffix('\n').unwrap_or(text).to_string()
}

impl TemplateSet {
    pub fn builtin() -> Self {
        let files = BUILTIN
            .iter()
            .map(|(name, text)| (name.to_string(), strip_final_newline(text)))
            .collect();
        Self { files }
    }

    /// Built-in set overridden by any `*.txt` files found in `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut set = Self::builtin();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "txt") {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                set.files.insert(stem, strip_final_newline(&std::fs::read_to_string(&path)?));
            }
        }
        Ok(set)
    }

    fn get(&self, kind: PuzzleKind, role: &str, variant: PromptVariant) -> Result<&str> {
        let key = format!("{}.{}.{}", kind, role, variant.as_str());
        self.files.get(&key).map(String::as_str).ok_or_else(|| Error::UnsupportedVariant {
            kind,
            variant: variant.as_str().into(),
        })
    }

    pub fn render(&self, instance: &PuzzleInstance, variant: PromptVariant) -> Result<PromptPair> {
        let vars = bindings(instance);
        let standard_system = substitute(self.get(instance.kind, "system", PromptVariant::Standard)?, &vars)?;
        let system = match variant {
            PromptVariant::Standard => standard_system,
            PromptVariant::PrescribedAlgorithm => {
                let mut with_base = vars.clone();
                with_base.insert("standard_system", standard_system);
                substitute(self.get(instance.kind, "system", variant)?, &with_base)?
            }
        };
        let user = substitute(self.get(instance.kind, "user", variant)?, &vars)?;
        Ok(PromptPair::new(system, user, variant))
    }
}

/// Renders with the built-in templates.
pub fn render(instance: &PuzzleInstance, variant: PromptVariant) -> Result<PromptPair> {
    TemplateSet::builtin().render(instance, variant)
}

/// Replaces every `${name}`; an unbound name is an error.
pub fn substitute(template: &str, vars: &BTreeMap<&str, String>) -> Result<String> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find("${") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let end = after
            .find('}')
            .ok_or_else(|| Error::InvalidArgument("unterminated placeholder in template".into()))?;
        let name = &after[..end];
        let value = vars
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("template placeholder `{name}` has no value")))?;
        out.push_str(value);
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn peg_listing(state: &PuzzleState) -> String {
    let PuzzleState::Hanoi { pegs } = state else { return String::new() };
    pegs.iter()
        .enumerate()
        .map(|(i, peg)| {
            let body = match peg.as_slice() {
                [] => "(empty)".to_string(),
                [only] => format!("{only} (bottom) (top)"),
                [bottom, middle @ .., top] => {
                    let mut parts = vec![format!("{bottom} (bottom)")];
                    parts.extend(middle.iter().map(u32::to_string));
                    parts.push(format!("{top} (top)"));
                    parts.join(", ")
                }
            };
            format!("- Peg {i}: {body}")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn board_listing(state: &PuzzleState) -> String {
    let PuzzleState::Checkers { board } = state else { return String::new() };
    board.iter().map(|c| c.symbol().to_string()).collect::<Vec<_>>().join(" ")
}

fn stack_listing(state: &PuzzleState) -> String {
    let PuzzleState::Blocks { stacks } = state else { return String::new() };
    stacks
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if s.is_empty() {
                format!("Stack {i}: (empty)")
            } else {
                format!("Stack {i}: {} (top)", s.join(" "))
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn bindings(instance: &PuzzleInstance) -> BTreeMap<&'static str, String> {
    let mut vars = BTreeMap::new();
    vars.insert("N", instance.size_n.to_string());
    match instance.kind {
        PuzzleKind::Hanoi => {
            vars.insert("initial_pegs", peg_listing(&instance.initial));
            vars.insert("goal_pegs", peg_listing(&instance.goal));
        }
        PuzzleKind::Checkers => {
            vars.insert("positions", (2 * instance.size_n + 1).to_string());
            vars.insert("initial_board", board_listing(&instance.initial));
            vars.insert("goal_board", board_listing(&instance.goal));
        }
        PuzzleKind::River => {
            let k = instance
                .param("k")
                .unwrap_or_else(|| crate::env::river::default_capacity(instance.size_n));
            vars.insert("k", k.to_string());
        }
        PuzzleKind::Blocks => {
            vars.insert("initial_stacks", stack_listing(&instance.initial));
            vars.insert("goal_stacks", stack_listing(&instance.goal));
        }
    }
    vars
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::make_instance;
    use crate::model::Params;

    fn instance(kind: PuzzleKind, n: u32) -> PuzzleInstance {
        make_instance(kind, n, &Params::new()).unwrap()
    }

    #[test]
    fn hanoi_user_prompt_lists_pegs() {
        let pair = render(&instance(PuzzleKind::Hanoi, 3), PromptVariant::Standard).unwrap();
        assert!(pair.user_text.starts_with("I have a puzzle with 3 disks of different sizes with"));
        assert!(pair.user_text.contains("- Peg 0: 3 (bottom), 2, 1 (top)\n- Peg 1: (empty)\n- Peg 2: (empty)"));
        assert!(pair.user_text.contains("- Peg 2: 3 (bottom), 2, 1 (top)\n\nRules:"));
        assert!(!pair.system_text.contains("ALGORITHM"));
    }

    #[test]
    fn prescribed_variant_appends_the_algorithm() {
        let inst = instance(PuzzleKind::Hanoi, 3);
        let standard = render(&inst, PromptVariant::Standard).unwrap();
        let prescribed = render(&inst, PromptVariant::PrescribedAlgorithm).unwrap();
        assert!(prescribed.system_text.starts_with(&standard.system_text));
        assert!(prescribed.system_text.contains("ALGORITHM Solve(n, source, target, auxiliary, moves)"));
        assert_eq!(prescribed.user_text, standard.user_text);
        assert_ne!(prescribed.prompt_hash, standard.prompt_hash);
    }

    #[test]
    fn prescribed_variant_is_hanoi_only() {
        for kind in [PuzzleKind::Checkers, PuzzleKind::River, PuzzleKind::Blocks] {
            let n = if kind == PuzzleKind::Checkers { 1 } else { 2 };
            let err = render(&instance(kind, n), PromptVariant::PrescribedAlgorithm).unwrap_err();
            assert!(matches!(err, Error::UnsupportedVariant { .. }));
        }
    }

    #[test]
    fn river_prompt_carries_capacity() {
        let pair = render(&instance(PuzzleKind::River, 2), PromptVariant::Standard).unwrap();
        assert!(pair.user_text.contains("capable of holding only 2 people at a time"));
        assert!(pair.user_text.starts_with("2 actors and their 2 agents"));
    }

    #[test]
    fn checkers_and_blocks_boards_are_expanded() {
        let pair = render(&instance(PuzzleKind::Checkers, 3), PromptVariant::Standard).unwrap();
        assert!(pair.user_text.contains("Initial board: R R R _ B B B\n\nGoal board: B B B _ R R R"));
        assert!(pair.user_text.contains("with 7 positions, where 3 red checkers"));
        let pair = render(&instance(PuzzleKind::Blocks, 4), PromptVariant::Standard).unwrap();
        assert!(pair.user_text.contains("Stack 0: A B (top)\nStack 1: C D (top)\nStack 2: (empty)"));
        assert!(pair.user_text.contains("Stack 0: D B C A (top)\nStack 1: (empty)"));
    }

    #[test]
    fn rendering_is_deterministic_and_hash_tracks_bytes() {
        let a = render(&instance(PuzzleKind::Blocks, 5), PromptVariant::Standard).unwrap();
        let b = render(&instance(PuzzleKind::Blocks, 5), PromptVariant::Standard).unwrap();
        assert_eq!(a, b);
        let c = render(&instance(PuzzleKind::Blocks, 6), PromptVariant::Standard).unwrap();
        assert_ne!(a.prompt_hash, c.prompt_hash);
    }

    #[test]
    fn substitution_rejects_unbound_names() {
        let vars = BTreeMap::from([("N", "3".to_string())]);
        assert_eq!(substitute("n=${N}.", &vars).unwrap(), "n=3.");
        assert!(substitute("${missing}", &vars).is_err());
        assert!(substitute("${N", &vars).is_err());
    }
}
