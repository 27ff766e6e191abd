//! Blocks world over a row of stacks. Only a stack's top block moves, onto any
//! other stack.
//!
//! Generated instances split the blocks alphabetically over the first two
//! stacks (the first receives the extra block when `N` is odd) and ask for a
//! single tower on stack 0 that interleaves both stacks top-down, starting
//! with stack 1. For `N = 4` that is `[[A, B], [C, D], []]` to
//! `[[D, B, C, A], [], []]`.

use std::collections::BTreeMap;

use super::search::{bidirectional, Search};
use super::{check_size, reject_unknown_params, Environment};
use crate::error::{Error, Result};
use crate::model::{block_name, instance_id, Move, Params, PuzzleInstance, PuzzleKind, PuzzleState, Violation};

pub const MIN_BLOCKS: u32 = 2;
pub const MAX_BLOCKS: u32 = 200;
/// Largest size handed to the optimal search.
pub const SEARCH_LIMIT: u32 = 8;
pub const DEFAULT_STACKS: u32 = 3;

pub struct Blocks;

type Stacks = Vec<Vec<String>>;

/// Initial and goal stacks of the generated instance family.
pub fn family_layout(n: u32, stacks: u32) -> (Stacks, Stacks) {
    let names: Vec<String> = (0..n as usize).map(block_name).collect();
    let split = names.len().div_ceil(2);
    let mut initial = vec![Vec::new(); stacks as usize];
    initial[0] = names[..split].to_vec();
    initial[1] = names[split..].to_vec();

    let mut first = initial[1].iter().rev();
    let mut second = initial[0].iter().rev();
    let mut tower = Vec::with_capacity(names.len());
    loop {
        let a = first.next();
        let b = second.next();
        if a.is_none() && b.is_none() {
            break;
        }
        tower.extend(a.cloned());
        tower.extend(b.cloned());
    }
    let mut goal = vec![Vec::new(); stacks as usize];
    goal[0] = tower;
    (initial, goal)
}

fn stacks_of(state: &PuzzleState) -> Result<&Stacks, Violation> {
    match state {
        PuzzleState::Blocks { stacks } => Ok(stacks),
        _ => Err(Violation::KindMismatch),
    }
}

pub(crate) fn step(stacks: &mut [Vec<String>], block: &str, from: usize, to: usize) -> Result<(), Violation> {
    if from >= stacks.len() || to >= stacks.len() {
        return Err(Violation::IndexOutOfBounds);
    }
    if from == to {
        return Err(Violation::SameSourceAndTarget);
    }
    let top = stacks[from].last().ok_or(Violation::SourceEmpty)?;
    if top != block {
        return Err(Violation::NotTopmost);
    }
    let moved = stacks[from].pop().expect("checked non-empty");
    stacks[to].push(moved);
    Ok(())
}

fn shift(stacks: &mut [Vec<String>], from: usize, to: usize, out: &mut Vec<Move>) {
    let block = stacks[from].last().expect("shift from a non-empty stack").clone();
    step(stacks, &block, from, to).expect("planned move is legal");
    out.push(Move::Blocks { block, from, to });
}

/// Builds `tower` (bottom to top) on `target`, digging each next block out
/// and parking whatever covers it on another stack. Needs three stacks.
fn tower_plan(mut stacks: Stacks, target: usize, tower: &[String], out: &mut Vec<Move>) -> Result<()> {
    if stacks.len() < 3 {
        return Err(Error::RangeExceeded("constructive blocks solver needs three stacks".into()));
    }
    let keep = stacks[target].iter().zip(tower).take_while(|(a, b)| a == b).count();
    let park = |stacks: &Stacks, avoid: usize| -> usize {
        (0..stacks.len())
            .filter(|&i| i != target && i != avoid)
            .min_by_key(|&i| stacks[i].len())
            .expect("three stacks leave a parking spot")
    };
    while stacks[target].len() > keep {
        let to = park(&stacks, target);
        shift(&mut stacks, target, to, out);
    }
    for block in &tower[keep..] {
        let from = stacks
            .iter()
            .position(|s| s.contains(block))
            .ok_or_else(|| Error::InvalidState(format!("block {block} missing")))?;
        while stacks[from].last() != Some(block) {
            let to = park(&stacks, from);
            shift(&mut stacks, from, to, out);
        }
        shift(&mut stacks, from, target, out);
    }
    Ok(())
}

/// Valid, not necessarily minimal, plan for tower goals. On the generated
/// family it first moves stack 0 onto stack 2 in order (through stack 1), after
/// which every goal block is on top of stack 1 or 2; this reaches `2N - 1`
/// moves for even `N` and `2N` for odd `N`.
pub fn constructive_solution(instance: &PuzzleInstance) -> Result<Vec<Move>> {
    let (PuzzleState::Blocks { stacks: initial }, PuzzleState::Blocks { stacks: goal }) = (&instance.initial, &instance.goal) else {
        return Err(Error::InvalidState("not a blocks instance".into()));
    };
    let filled: Vec<usize> = (0..goal.len()).filter(|&i| !goal[i].is_empty()).collect();
    let &[target] = filled.as_slice() else {
        return Err(Error::RangeExceeded("constructive blocks solver handles single-tower goals".into()));
    };
    let mut stacks = initial.clone();
    let mut moves = Vec::new();
    let family = family_layout(instance.size_n, initial.len() as u32);
    if (initial, goal) == (&family.0, &family.1) {
        let lifted = stacks[0].len() - 1;
        for _ in 0..lifted {
            shift(&mut stacks, 0, 1, &mut moves);
        }
        shift(&mut stacks, 0, 2, &mut moves);
        for _ in 0..lifted {
            shift(&mut stacks, 1, 2, &mut moves);
        }
    }
    tower_plan(stacks, target, &goal[target], &mut moves)?;
    Ok(moves)
}

/// Shortest plan by bidirectional breadth-first search.
pub fn search_solution(initial: &Stacks, goal: &Stacks) -> Result<Vec<Move>> {
    let names: Vec<String> = {
        let mut v: Vec<String> = initial.iter().flatten().cloned().collect();
        v.sort();
        v
    };
    if names.len() > SEARCH_LIMIT as usize {
        return Err(Error::RangeExceeded(format!("optimal blocks search is limited to {SEARCH_LIMIT} blocks")));
    }
    let ids: BTreeMap<&str, u8> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i as u8)).collect();
    let encode = |s: &Stacks| -> Vec<Vec<u8>> { s.iter().map(|st| st.iter().map(|b| ids[b.as_str()]).collect()).collect() };
    let expand = |s: &Vec<Vec<u8>>, out: &mut Vec<((u8, usize, usize), Vec<Vec<u8>>)>| {
        for from in 0..s.len() {
            let Some(&b) = s[from].last() else { continue };
            for to in 0..s.len() {
                if to != from {
                    let mut next = s.clone();
                    next[from].pop();
                    next[to].push(b);
                    out.push(((b, from, to), next));
                }
            }
        }
    };
    let outcome = bidirectional(encode(initial), encode(goal), expand, |&(b, f, t)| (b, t, f), 20_000_000)
        .map_err(|_| Error::RangeExceeded("blocks search state limit".into()))?;
    match outcome {
        Search::Found(path) => Ok(path
            .into_iter()
            .map(|(b, from, to)| Move::Blocks {
                block: names[b as usize].clone(),
                from,
                to,
            })
            .collect()),
        Search::Exhausted => Err(Error::Unsolvable),
    }
}

/// Instance with caller-supplied stacks.
pub fn custom_instance(initial: Stacks, goal: Stacks) -> Result<PuzzleInstance> {
    let initial = PuzzleState::blocks(initial)?;
    let goal = PuzzleState::blocks(goal)?;
    let size_n = initial.size();
    let PuzzleState::Blocks { stacks } = &initial else { unreachable!() };
    let params = Params::from([("stacks".to_string(), stacks.len() as u32)]);
    let instance = PuzzleInstance {
        kind: PuzzleKind::Blocks,
        size_n,
        instance_id: instance_id(PuzzleKind::Blocks, size_n, &params)?,
        params,
        initial,
        goal,
        min_moves: None,
        solvable: true,
    };
    instance.validate()?;
    Ok(instance)
}

impl Environment for Blocks {
    fn kind(&self) -> PuzzleKind {
        PuzzleKind::Blocks
    }

    fn resolve_params(&self, size_n: u32, params: &Params) -> Result<Params> {
        check_size(PuzzleKind::Blocks, size_n, MIN_BLOCKS..=MAX_BLOCKS)?;
        reject_unknown_params(params, &["stacks"])?;
        let stacks = params.get("stacks").copied().unwrap_or(DEFAULT_STACKS);
        if !(3..=9).contains(&stacks) {
            return Err(Error::InvalidParams(format!("stacks must be within 3..=9, got {stacks}")));
        }
        Ok(Params::from([("stacks".to_string(), stacks)]))
    }

    fn make_instance(&self, size_n: u32, params: &Params) -> Result<PuzzleInstance> {
        let params = self.resolve_params(size_n, params)?;
        let (initial, goal) = family_layout(size_n, params["stacks"]);
        Ok(PuzzleInstance {
            kind: PuzzleKind::Blocks,
            size_n,
            instance_id: instance_id(PuzzleKind::Blocks, size_n, &params)?,
            min_moves: self.min_moves(size_n, &params),
            params,
            initial: PuzzleState::blocks(initial)?,
            goal: PuzzleState::blocks(goal)?,
            solvable: true,
        })
    }

    fn validate_move(&self, _instance: &PuzzleInstance, state: &PuzzleState, mv: &Move) -> Result<PuzzleState, Violation> {
        let Move::Blocks { block, from, to } = mv else {
            return Err(Violation::KindMismatch);
        };
        let mut stacks = stacks_of(state)?.clone();
        step(&mut stacks, block, *from, *to)?;
        Ok(PuzzleState::Blocks { stacks })
    }

    fn legal_moves(&self, _instance: &PuzzleInstance, state: &PuzzleState) -> Vec<Move> {
        let Ok(stacks) = stacks_of(state) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (from, stack) in stacks.iter().enumerate() {
            let Some(block) = stack.last() else { continue };
            for to in (0..stacks.len()).filter(|&t| t != from) {
                out.push(Move::Blocks {
                    block: block.clone(),
                    from,
                    to,
                });
            }
        }
        out
    }

    fn solve(&self, instance: &PuzzleInstance) -> Result<Vec<Move>> {
        let (PuzzleState::Blocks { stacks: initial }, PuzzleState::Blocks { stacks: goal }) = (&instance.initial, &instance.goal) else {
            return Err(Error::InvalidState("not a blocks instance".into()));
        };
        if instance.size_n <= SEARCH_LIMIT {
            search_solution(initial, goal)
        } else {
            constructive_solution(instance)
        }
    }

    fn min_moves(&self, size_n: u32, params: &Params) -> Option<u64> {
        if size_n > SEARCH_LIMIT {
            return None;
        }
        let params = self.resolve_params(size_n, params).ok()?;
        let (initial, goal) = family_layout(size_n, params["stacks"]);
        search_solution(&initial, &goal).ok().map(|s| s.len() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::apply_solution;

    fn names(stacks: &[&[&str]]) -> Stacks {
        stacks.iter().map(|s| s.iter().map(|b| b.to_string()).collect()).collect()
    }

    #[test]
    fn family_layout_matches_printed_examples() {
        let (initial, goal) = family_layout(4, 3);
        assert_eq!(initial, names(&[&["A", "B"], &["C", "D"], &[]]));
        assert_eq!(goal, names(&[&["D", "B", "C", "A"], &[], &[]]));
        let (initial, goal) = family_layout(6, 3);
        assert_eq!(initial, names(&[&["A", "B", "C"], &["D", "E", "F"], &[]]));
        assert_eq!(goal, names(&[&["F", "C", "E", "B", "D", "A"], &[], &[]]));
        let (initial, goal) = family_layout(5, 3);
        assert_eq!(initial, names(&[&["A", "B", "C"], &["D", "E"], &[]]));
        assert_eq!(goal, names(&[&["E", "C", "D", "B", "A"], &[], &[]]));
    }

    #[test]
    fn prompt_example_moves() {
        let inst = custom_instance(names(&[&["A", "B"], &["C"], &[]]), names(&[&["A"], &["B"], &["C"]])).unwrap();
        let moves = vec![
            Move::Blocks { block: "C".into(), from: 1, to: 2 },
            Move::Blocks { block: "B".into(), from: 0, to: 1 },
        ];
        assert!(apply_solution(&inst, &moves).success);
        assert_eq!(search_solution(&names(&[&["A", "B"], &["C"], &[]]), &names(&[&["A"], &["B"], &["C"]])).unwrap().len(), 2);
    }

    #[test]
    fn typed_rejections() {
        let inst = Blocks.make_instance(4, &Params::new()).unwrap();
        let s = &inst.initial;
        let mv = |b: &str, from, to| Move::Blocks { block: b.into(), from, to };
        assert_eq!(Blocks.validate_move(&inst, s, &mv("A", 0, 2)), Err(Violation::NotTopmost));
        assert_eq!(Blocks.validate_move(&inst, s, &mv("B", 0, 3)), Err(Violation::IndexOutOfBounds));
        assert_eq!(Blocks.validate_move(&inst, s, &mv("B", 2, 0)), Err(Violation::SourceEmpty));
        assert_eq!(Blocks.validate_move(&inst, s, &mv("B", 0, 0)), Err(Violation::SameSourceAndTarget));
        assert!(Blocks.validate_move(&inst, s, &mv("D", 1, 0)).is_ok());
    }

    #[test]
    fn family_plan_matches_search_optimum() {
        for n in 2..=7 {
            let inst = Blocks.make_instance(n, &Params::new()).unwrap();
            let plan = constructive_solution(&inst).unwrap();
            assert!(apply_solution(&inst, &plan).success, "N={n}");
            let expected = if n % 2 == 0 { 2 * n - 1 } else { 2 * n };
            assert_eq!(plan.len() as u32, expected, "N={n}");
            assert_eq!(inst.min_moves, Some(expected as u64), "N={n}");
        }
    }

    #[test]
    fn generic_tower_plan_handles_custom_instances() {
        let inst = custom_instance(
            names(&[&["C", "A"], &["B", "E"], &["D"]]),
            names(&[&[], &["A", "B", "C", "D", "E"], &[]]),
        )
        .unwrap();
        let plan = constructive_solution(&inst).unwrap();
        assert!(apply_solution(&inst, &plan).success);
        let split_goal = custom_instance(names(&[&["A", "B"], &[], &[]]), names(&[&["A"], &["B"], &[]])).unwrap();
        assert!(constructive_solution(&split_goal).is_err());
    }

    #[test]
    fn params_and_sizes() {
        assert!(Blocks.make_instance(1, &Params::new()).is_err());
        assert!(Blocks.make_instance(4, &Params::from([("stacks".to_string(), 2)])).is_err());
        let four = Blocks.make_instance(9, &Params::from([("stacks".to_string(), 4)])).unwrap();
        assert_eq!(four.min_moves, None);
        assert!(apply_solution(&four, &Blocks.solve(&four).unwrap()).success);
    }
}
