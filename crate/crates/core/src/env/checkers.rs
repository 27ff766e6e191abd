//! Checker jumping on a board of `2N + 1` cells. Red moves right, blue moves
//! left; a move is a slide into the adjacent gap or a jump over one checker of
//! the other color into the gap.

use super::search::{breadth_first, Search};
use super::{check_size, reject_unknown_params, Environment};
use crate::error::{Error, Result};
use crate::model::{instance_id, Cell, Color, Move, Params, PuzzleInstance, PuzzleKind, PuzzleState, Violation};

pub const MAX_PER_COLOR: u32 = 30;
/// Largest size solved by exhaustive search; larger boards use the
/// constructive schedule.
pub const SEARCH_LIMIT: u32 = 6;

pub struct Checkers;

fn layout(n: u32, left: Color, right: Color) -> Vec<Cell> {
    let n = n as usize;
    let mut board = vec![Cell::Checker(left); n];
    board.push(Cell::Empty);
    board.extend(std::iter::repeat_n(Cell::Checker(right), n));
    board
}

fn forward(color: Color) -> isize {
    match color {
        Color::Red => 1,
        Color::Blue => -1,
    }
}

fn opposite(color: Color) -> Color {
    match color {
        Color::Red => Color::Blue,
        Color::Blue => Color::Red,
    }
}

pub(crate) fn step(board: &mut [Cell], color: Color, from: usize, to: usize) -> Result<(), Violation> {
    if from >= board.len() || to >= board.len() {
        return Err(Violation::IndexOutOfBounds);
    }
    if from == to {
        return Err(Violation::SameSourceAndTarget);
    }
    match board[from] {
        Cell::Empty => return Err(Violation::SourceEmpty),
        Cell::Checker(c) if c != color => return Err(Violation::WrongColor),
        Cell::Checker(_) => {}
    }
    if board[to] != Cell::Empty {
        return Err(Violation::TargetOccupied);
    }
    let delta = to as isize - from as isize;
    if delta.signum() != forward(color) {
        return Err(Violation::BackwardMove);
    }
    match delta.abs() {
        1 => {}
        2 => {
            let middle = (from + to) / 2;
            if board[middle] != Cell::Checker(opposite(color)) {
                return Err(Violation::NoOpponentToJump);
            }
        }
        _ => return Err(Violation::InvalidDistance),
    }
    board[to] = board[from];
    board[from] = Cell::Empty;
    Ok(())
}

fn moves_from(board: &[Cell]) -> Vec<(Move, Vec<Cell>)> {
    let mut out = Vec::new();
    for from in 0..board.len() {
        let Cell::Checker(color) = board[from] else { continue };
        for distance in [1isize, 2] {
            let to = from as isize + forward(color) * distance;
            if to < 0 || to as usize >= board.len() {
                continue;
            }
            let mut next = board.to_vec();
            if step(&mut next, color, from, to as usize).is_ok() {
                out.push((Move::Checkers { color, from, to: to as usize }, next));
            }
        }
    }
    out
}

/// Shortest solution by exhaustive breadth-first search.
pub fn search_solution(n: u32) -> Result<Vec<Move>> {
    let start = layout(n, Color::Red, Color::Blue);
    let goal = layout(n, Color::Blue, Color::Red);
    let outcome = breadth_first(
        start,
        |s| *s == goal,
        |s, out| out.extend(moves_from(s)),
        5_000_000,
    )
    .map_err(|_| Error::RangeExceeded(format!("checkers search for N={n}")))?;
    match outcome {
        Search::Found(path) => Ok(path),
        Search::Exhausted => Err(Error::Unsolvable),
    }
}

/// Phase schedule `1, 2, .., N, N, N, N-1, .., 1`, alternating colors from red;
/// within a phase the current color jumps when it can and slides otherwise.
pub fn constructive_solution(n: u32) -> Vec<Move> {
    let mut board = layout(n, Color::Red, Color::Blue);
    let phases: Vec<u32> = (1..=n).chain([n, n]).chain((1..n).rev()).collect();
    let mut moves = Vec::new();
    for (i, &count) in phases.iter().enumerate() {
        let color = if i % 2 == 0 { Color::Red } else { Color::Blue };
        for _ in 0..count {
            let mut options: Vec<(Move, Vec<Cell>)> = moves_from(&board)
                .into_iter()
                .filter(|(m, _)| matches!(m, Move::Checkers { color: c, .. } if *c == color))
                .collect();
            options.sort_by_key(|(m, _)| match m {
                Move::Checkers { from, to, .. } => std::cmp::Reverse(from.abs_diff(*to)),
                _ => unreachable!(),
            });
            let (mv, next) = options.into_iter().next().expect("schedule always has a move");
            board = next;
            moves.push(mv);
        }
    }
    moves
}

impl Environment for Checkers {
    fn kind(&self) -> PuzzleKind {
        PuzzleKind::Checkers
    }

    fn resolve_params(&self, size_n: u32, params: &Params) -> Result<Params> {
        check_size(PuzzleKind::Checkers, size_n, 1..=MAX_PER_COLOR)?;
        reject_unknown_params(params, &[])?;
        Ok(Params::new())
    }

    fn make_instance(&self, size_n: u32, params: &Params) -> Result<PuzzleInstance> {
        let params = self.resolve_params(size_n, params)?;
        Ok(PuzzleInstance {
            kind: PuzzleKind::Checkers,
            size_n,
            instance_id: instance_id(PuzzleKind::Checkers, size_n, &params)?,
            params,
            initial: PuzzleState::checkers(layout(size_n, Color::Red, Color::Blue))?,
            goal: PuzzleState::checkers(layout(size_n, Color::Blue, Color::Red))?,
            min_moves: self.min_moves(size_n, &Params::new()),
            solvable: true,
        })
    }

    fn validate_move(&self, _instance: &PuzzleInstance, state: &PuzzleState, mv: &Move) -> Result<PuzzleState, Violation> {
        let (PuzzleState::Checkers { board }, Move::Checkers { color, from, to }) = (state, mv) else {
            return Err(Violation::KindMismatch);
        };
        let mut board = board.clone();
        step(&mut board, *color, *from, *to)?;
        Ok(PuzzleState::Checkers { board })
    }

    fn legal_moves(&self, _instance: &PuzzleInstance, state: &PuzzleState) -> Vec<Move> {
        match state {
            PuzzleState::Checkers { board } => moves_from(board).into_iter().map(|(m, _)| m).collect(),
            _ => Vec::new(),
        }
    }

    fn solve(&self, instance: &PuzzleInstance) -> Result<Vec<Move>> {
        let n = instance.size_n;
        if n <= SEARCH_LIMIT {
            search_solution(n)
        } else {
            Ok(constructive_solution(n))
        }
    }

    fn min_moves(&self, size_n: u32, _params: &Params) -> Option<u64> {
        let n = size_n as u64;
        Some((n + 1) * (n + 1) - 1)
    }
}
