//! Offline providers answering from the puzzle oracles.
//!
//! `oracle_synthetic` returns the oracle solution. `corrupting_synthetic`
//! returns it with the move at `corrupt_index` replaced by one the simulator
//! rejects. When the index lies past the end of the oracle solution, the
//! answer is padded after the goal with a legal move and its inverse,
//! alternating, so the failure still lands exactly at the index. Checkers
//! moves cannot be undone, so there the last oracle move is corrupted instead.

use puzzlebench_core::env::{environment_for, solve, validate_move};
use puzzlebench_core::model::{format_moves, Move, Person, PuzzleInstance, PuzzleKind, PuzzleState};
use puzzlebench_core::prompt::PromptPair;
use puzzlebench_core::tokenizer::Tokenizer;
use puzzlebench_core::Error;

use crate::{estimate_usage, Completion, Provider, ProviderConfig, ProviderKind, Result};

pub struct Synthetic {
    config: ProviderConfig,
    tokenizer: Tokenizer,
}

impl Synthetic {
    pub fn new(config: ProviderConfig) -> Self {
        Self {
            config,
            tokenizer: Tokenizer::character(),
        }
    }
}

fn replay(instance: &PuzzleInstance, moves: &[Move]) -> PuzzleState {
    let mut state = instance.initial.clone();
    for mv in moves {
        state = validate_move(instance, &state, mv).expect("oracle and padding moves are legal");
    }
    state
}

fn inverse(mv: &Move) -> Move {
    match mv {
        Move::River { .. } => mv.clone(),
        other => other.swapped(),
    }
}

/// A move the simulator rejects in `state`, derived from the legal `mv`.
fn illegal_variant(instance: &PuzzleInstance, state: &PuzzleState, mv: &Move) -> Move {
    let candidates = match mv {
        Move::River { .. } => vec![Move::River {
            passengers: vec![Person::actor(1), Person::agent(2)],
        }],
        Move::Hanoi { disk, from, .. } => vec![mv.swapped(), Move::Hanoi { disk: *disk, from: *from, to: *from }],
        Move::Checkers { color, from, .. } => vec![mv.swapped(), Move::Checkers { color: *color, from: *from, to: *from }],
        Move::Blocks { block, from, .. } => vec![mv.swapped(), Move::Blocks {
            block: block.clone(),
            from: *from,
            to: *from,
        }],
    };
    candidates
        .into_iter()
        .find(|c| validate_move(instance, state, c).is_err())
        .expect("a same-source-and-target move is always rejected")
}

/// Oracle solution with the move at index `m` made illegal.
pub fn corrupted_solution(instance: &PuzzleInstance, m: usize) -> puzzlebench_core::Result<Vec<Move>> {
    let mut moves = solve(instance)?;
    if moves.is_empty() {
        return Err(Error::InvalidArgument("instance is solved by the empty sequence".into()));
    }
    let target = if instance.kind == PuzzleKind::Checkers { m.min(moves.len() - 1) } else { m };
    if target >= moves.len() {
        let goal = replay(instance, &moves);
        let first = environment_for(instance.kind)
            .legal_moves(instance, &goal)
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidState("goal state has no legal moves to pad with".into()))?;
        let back = inverse(&first);
        let mut flip = true;
        while moves.len() <= target {
            moves.push(if flip { first.clone() } else { back.clone() });
            flip = !flip;
        }
    }
    let before = replay(instance, &moves[..target]);
    moves[target] = illegal_variant(instance, &before, &moves[target]);
    moves.truncate(target + 1);
    Ok(moves)
}

impl Provider for Synthetic {
    fn config(&self) -> &ProviderConfig {
        &self.config
    }

    fn complete(&self, instance: &PuzzleInstance, prompt: &PromptPair, _sample_idx: u32) -> Result<Completion> {
        let moves = if !instance.solvable {
            None
        } else if self.config.provider_kind == ProviderKind::CorruptingSynthetic {
            Some(corrupted_solution(instance, self.config.corrupt_index.unwrap_or(0))?)
        } else {
            Some(solve(instance)?)
        };
        let (thinking, final_text) = match moves {
            Some(moves) => {
                let listing = format_moves(&moves);
                (
                    format!("Working through the moves one at a time.\n{listing}\nThat sequence reaches the goal."),
                    format!("Here is the complete solution.\n\n{listing}\n"),
                )
            }
            None => (
                "Every reachable configuration has been tried.".to_string(),
                "No valid sequence of moves exists for this puzzle.\n".to_string(),
            ),
        };
        Ok(Completion {
            usage: estimate_usage(&self.tokenizer, prompt, &final_text, Some(&thinking)),
            final_text,
            thinking_text: Some(thinking),
            provider_meta: Default::default(),
        })
    }
}
