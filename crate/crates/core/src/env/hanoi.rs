//! Tower of Hanoi: three pegs (0-based), disks numbered 1 (smallest) to N.

use super::{check_size, reject_unknown_params, Environment};
use crate::error::{Error, Result};
use crate::model::{instance_id, Move, Params, PuzzleInstance, PuzzleKind, PuzzleState, Violation};

pub const MAX_DISKS: u32 = 25;

pub struct Hanoi;

fn tower(n: u32) -> Vec<u32> {
    (1..=n).rev().collect()
}

fn pegs_of(state: &PuzzleState) -> Result<&[Vec<u32>], Violation> {
    match state {
        PuzzleState::Hanoi { pegs } => Ok(pegs),
        _ => Err(Violation::KindMismatch),
    }
}

/// Applies one move in place after the boundary, source, topmost and size
/// ordering checks.
pub(crate) fn step(pegs: &mut [Vec<u32>], disk: u32, from: usize, to: usize) -> Result<(), Violation> {
    if from >= pegs.len() || to >= pegs.len() {
        return Err(Violation::IndexOutOfBounds);
    }
    if from == to {
        return Err(Violation::SameSourceAndTarget);
    }
    let top = *pegs[from].last().ok_or(Violation::SourceEmpty)?;
    if top != disk {
        return Err(Violation::NotTopmost);
    }
    if pegs[to].last().is_some_and(|&t| t < disk) {
        return Err(Violation::LargerOnSmaller);
    }
    pegs[from].pop();
    pegs[to].push(disk);
    Ok(())
}

/// The recursive algorithm: move `n - 1` disks to the auxiliary peg, the
/// largest to the target, then the `n - 1` back on top. Disk ids are read off
/// the simulated pegs.
pub fn recursive_solution(n: u32) -> Vec<Move> {
    fn go(n: u32, source: usize, target: usize, auxiliary: usize, pegs: &mut [Vec<u32>; 3], moves: &mut Vec<Move>) {
        if n == 0 {
            return;
        }
        if n > 1 {
            go(n - 1, source, auxiliary, target, pegs, moves);
        }
        let disk = pegs[source].pop().expect("source peg holds the next disk");
        pegs[target].push(disk);
        moves.push(Move::Hanoi { disk, from: source, to: target });
        if n > 1 {
            go(n - 1, auxiliary, target, source, pegs, moves);
        }
    }
    let mut pegs = [tower(n), Vec::new(), Vec::new()];
    let mut moves = Vec::with_capacity((1usize << n) - 1);
    go(n, 0, 2, 1, &mut pegs, &mut moves);
    moves
}

impl Environment for Hanoi {
    fn kind(&self) -> PuzzleKind {
        PuzzleKind::Hanoi
    }

    fn resolve_params(&self, size_n: u32, params: &Params) -> Result<Params> {
        check_size(PuzzleKind::Hanoi, size_n, 1..=MAX_DISKS)?;
        reject_unknown_params(params, &[])?;
        Ok(Params::new())
    }

    fn make_instance(&self, size_n: u32, params: &Params) -> Result<PuzzleInstance> {
        let params = self.resolve_params(size_n, params)?;
        Ok(PuzzleInstance {
            kind: PuzzleKind::Hanoi,
            size_n,
            instance_id: instance_id(PuzzleKind::Hanoi, size_n, &params)?,
            params,
            initial: PuzzleState::hanoi(vec![tower(size_n), vec![], vec![]])?,
            goal: PuzzleState::hanoi(vec![vec![], vec![], tower(size_n)])?,
            min_moves: self.min_moves(size_n, &Params::new()),
            solvable: true,
        })
    }

    fn validate_move(&self, _instance: &PuzzleInstance, state: &PuzzleState, mv: &Move) -> Result<PuzzleState, Violation> {
        let Move::Hanoi { disk, from, to } = *mv else {
            return Err(Violation::KindMismatch);
        };
        let mut pegs = pegs_of(state)?.to_vec();
        step(&mut pegs, disk, from, to)?;
        Ok(PuzzleState::Hanoi { pegs })
    }

    fn legal_moves(&self, _instance: &PuzzleInstance, state: &PuzzleState) -> Vec<Move> {
        let Ok(pegs) = pegs_of(state) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for from in 0..pegs.len() {
            let Some(&disk) = pegs[from].last() else { continue };
            for to in 0..pegs.len() {
                if to != from && pegs[to].last().is_none_or(|&t| t > disk) {
                    out.push(Move::Hanoi { disk, from, to });
                }
            }
        }
        out
    }

    fn solve(&self, instance: &PuzzleInstance) -> Result<Vec<Move>> {
        let standard = self.make_instance(instance.size_n, &instance.params)?;
        if instance.initial != standard.initial || instance.goal != standard.goal {
            return Err(Error::RangeExceeded("hanoi oracle solves the standard peg 0 to peg 2 transfer only".into()));
        }
        Ok(recursive_solution(instance.size_n))
    }

    fn min_moves(&self, size_n: u32, _params: &Params) -> Option<u64> {
        (1..=63).contains(&size_n).then(|| (1u64 << size_n) - 1)
    }
}
