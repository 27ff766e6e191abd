//! Puzzle simulators and their oracle solvers.
//!
//! Every environment validates single moves, replays whole move lists into a
//! [`Verdict`], and knows how to solve its own instances. Simulators are pure
//! functions of immutable inputs.

pub mod blocks;
pub mod checkers;
pub mod hanoi;
pub mod river;
mod search;

use crate::error::{Error, Result};
use crate::model::{FailureReason, Move, Params, PuzzleInstance, PuzzleKind, PuzzleState, Verdict, Violation};

pub trait Environment: Send + Sync {
    fn kind(&self) -> PuzzleKind;

    /// Validates `params` for size `size_n` and fills in defaults.
    fn resolve_params(&self, size_n: u32, params: &Params) -> Result<Params>;

    fn make_instance(&self, size_n: u32, params: &Params) -> Result<PuzzleInstance>;

    /// Returns the successor state, or the rule the move breaks.
    fn validate_move(&self, instance: &PuzzleInstance, state: &PuzzleState, mv: &Move) -> Result<PuzzleState, Violation>;

    /// Every move the simulator accepts from `state`.
    fn legal_moves(&self, instance: &PuzzleInstance, state: &PuzzleState) -> Vec<Move>;

    fn is_goal(&self, instance: &PuzzleInstance, state: &PuzzleState) -> bool {
        *state == instance.goal
    }

    /// A solution that replays to the goal. Search-based oracles return a
    /// shortest one.
    fn solve(&self, instance: &PuzzleInstance) -> Result<Vec<Move>>;

    /// Closed form where one exists, otherwise the search oracle's length when
    /// the size is tractable.
    fn min_moves(&self, size_n: u32, params: &Params) -> Option<u64>;

    /// Replays `moves` from the initial state, stopping at the first rejected
    /// move. Optimality is not graded.
    fn apply_solution(&self, instance: &PuzzleInstance, moves: &[Move]) -> Verdict {
        let mut state = instance.initial.clone();
        for (index, mv) in moves.iter().enumerate() {
            let step = if mv.kind() == instance.kind {
                self.validate_move(instance, &state, mv)
            } else {
                Err(Violation::KindMismatch)
            };
            match step {
                Ok(next) => state = next,
                Err(violation) => {
                    return Verdict {
                        moves_checked: index + 1,
                        first_failure_index: Some(index),
                        failure_reason: Some(violation.reason()),
                        violation: Some(violation),
                        success: false,
                        final_state: state,
                    }
                }
            }
        }
        let success = self.is_goal(instance, &state);
        Verdict {
            moves_checked: moves.len(),
            first_failure_index: None,
            failure_reason: (!success).then_some(FailureReason::GoalNotReached),
            violation: None,
            success,
            final_state: state,
        }
    }
}

static HANOI: hanoi::Hanoi = hanoi::Hanoi;
static CHECKERS: checkers::Checkers = checkers::Checkers;
static RIVER: river::River = river::River;
static BLOCKS: blocks::Blocks = blocks::Blocks;

pub fn environment_for(kind: PuzzleKind) -> &'static dyn Environment {
    match kind {
        PuzzleKind::Hanoi => &HANOI,
        PuzzleKind::Checkers => &CHECKERS,
        PuzzleKind::River => &RIVER,
        PuzzleKind::Blocks => &BLOCKS,
    }
}

pub fn make_instance(kind: PuzzleKind, size_n: u32, params: &Params) -> Result<PuzzleInstance> {
    environment_for(kind).make_instance(size_n, params)
}

pub fn validate_move(instance: &PuzzleInstance, state: &PuzzleState, mv: &Move) -> Result<PuzzleState, Violation> {
    if mv.kind() != instance.kind || state.kind() != instance.kind {
        return Err(Violation::KindMismatch);
    }
    environment_for(instance.kind).validate_move(instance, state, mv)
}

pub fn apply_solution(instance: &PuzzleInstance, moves: &[Move]) -> Verdict {
    environment_for(instance.kind).apply_solution(instance, moves)
}

pub fn solve(instance: &PuzzleInstance) -> Result<Vec<Move>> {
    environment_for(instance.kind).solve(instance)
}

pub fn min_moves(kind: PuzzleKind, size_n: u32, params: &Params) -> Option<u64> {
    environment_for(kind).min_moves(size_n, params)
}

pub(crate) fn check_size(kind: PuzzleKind, size_n: u32, range: std::ops::RangeInclusive<u32>) -> Result<()> {
    if range.contains(&size_n) {
        Ok(())
    } else {
        Err(Error::InvalidSize {
            kind,
            size_n,
            reason: format!("supported sizes are {}..={}", range.start(), range.end()),
        })
    }
}

pub(crate) fn reject_unknown_params(params: &Params, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(key) => Err(Error::InvalidParams(format!("unknown parameter `{key}`"))),
        None => Ok(()),
    }
}
