//! River crossing with `N` actor/agent pairs and a boat of capacity `k`.
//!
//! An actor may never share a bank or the boat with a foreign agent unless its
//! own agent is present too. The boat starts on the left and switches sides
//! after every crossing.

use std::collections::BTreeSet;

use super::search::{breadth_first, Search};
use super::{check_size, reject_unknown_params, Environment};
use crate::error::{Error, Result};
use crate::model::{instance_id, Bank, Move, Params, Person, PuzzleInstance, PuzzleKind, PuzzleState, Role, Violation};

pub const MIN_PAIRS: u32 = 2;
pub const MAX_PAIRS: u32 = 15;

pub struct River;

/// Capacity used when the caller does not pick one: 2 for up to three pairs,
/// 3 beyond.
pub fn default_capacity(n: u32) -> u32 {
    if n <= 3 {
        2
    } else {
        3
    }
}

/// True when no actor in `group` is with a foreign agent while its own agent is
/// absent.
pub fn is_safe<'a>(group: impl IntoIterator<Item = &'a Person> + Clone) -> bool {
    let agents: BTreeSet<u32> = group
        .clone()
        .into_iter()
        .filter(|p| p.role == Role::Agent)
        .map(|p| p.index)
        .collect();
    group
        .into_iter()
        .filter(|p| p.role == Role::Actor)
        .all(|a| agents.contains(&a.index) || agents.is_empty())
}

/// Bitmask layout: bit `i - 1` is agent `i`, bit `n + i - 1` is actor `i`.
#[derive(Clone, Copy)]
struct Masks {
    n: u32,
    all: u32,
    agents: u32,
}

impl Masks {
    fn new(n: u32) -> Self {
        let agents = (1u32 << n) - 1;
        Self {
            n,
            all: (1u32 << (2 * n)) - 1,
            agents,
        }
    }

    fn safe(&self, group: u32) -> bool {
        let agents = group & self.agents;
        let actors = (group >> self.n) & self.agents;
        agents == 0 || actors & !agents == 0
    }

    fn person(&self, bit: u32) -> Person {
        if bit < self.n {
            Person::agent(bit + 1)
        } else {
            Person::actor(bit - self.n + 1)
        }
    }
}

/// (bank holding the boat is left, left-bank mask)
type Node = (bool, u32);

fn crossings(m: Masks, k: u32, (boat_left, left): Node, out: &mut Vec<(u32, Node)>) {
    let bank = if boat_left { left } else { m.all & !left };
    let bits: Vec<u32> = (0..2 * m.n).filter(|b| bank & (1 << b) != 0).collect();
    let mut pick = |group: u32| {
        if !m.safe(group) {
            return;
        }
        let next_left = if boat_left { left & !group } else { left | group };
        if m.safe(next_left) && m.safe(m.all & !next_left) {
            out.push((group, (!boat_left, next_left)));
        }
    };
    for (i, &a) in bits.iter().enumerate() {
        pick(1 << a);
        if k < 2 {
            continue;
        }
        for (j, &b) in bits.iter().enumerate().skip(i + 1) {
            pick((1 << a) | (1 << b));
            if k < 3 {
                continue;
            }
            for &c in &bits[j + 1..] {
                pick((1 << a) | (1 << b) | (1 << c));
            }
        }
    }
}

/// Shortest crossing sequence, or `None` when the goal is unreachable.
pub fn search_solution(n: u32, k: u32) -> Result<Option<Vec<Move>>> {
    check_size(PuzzleKind::River, n, MIN_PAIRS..=MAX_PAIRS)?;
    let m = Masks::new(n);
    let outcome = breadth_first(
        (true, m.all),
        |&(_, left)| left == 0,
        |&node, out| crossings(m, k, node, out),
        50_000_000,
    )
    .map_err(|_| Error::RangeExceeded(format!("river search for N={n}, k={k}")))?;
    Ok(match outcome {
        Search::Found(groups) => Some(
            groups
                .into_iter()
                .map(|g| Move::River {
                    passengers: (0..2 * n).filter(|b| g & (1 << b) != 0).map(|b| m.person(b)).collect(),
                })
                .collect(),
        ),
        Search::Exhausted => None,
    })
}

fn capacity(instance: &PuzzleInstance) -> u32 {
    instance.param("k").unwrap_or_else(|| default_capacity(instance.size_n))
}

impl Environment for River {
    fn kind(&self) -> PuzzleKind {
        PuzzleKind::River
    }

    fn resolve_params(&self, size_n: u32, params: &Params) -> Result<Params> {
        check_size(PuzzleKind::River, size_n, MIN_PAIRS..=MAX_PAIRS)?;
        reject_unknown_params(params, &["k"])?;
        let k = params.get("k").copied().unwrap_or_else(|| default_capacity(size_n));
        if !(2..=3).contains(&k) {
            return Err(Error::InvalidParams(format!("boat capacity k must be 2 or 3, got {k}")));
        }
        Ok(Params::from([("k".to_string(), k)]))
    }

    fn make_instance(&self, size_n: u32, params: &Params) -> Result<PuzzleInstance> {
        let params = self.resolve_params(size_n, params)?;
        let solution = search_solution(size_n, params["k"])?;
        Ok(PuzzleInstance {
            kind: PuzzleKind::River,
            size_n,
            instance_id: instance_id(PuzzleKind::River, size_n, &params)?,
            params,
            initial: PuzzleState::river(Person::all(size_n), BTreeSet::new(), Bank::Left)?,
            goal: PuzzleState::river(BTreeSet::new(), Person::all(size_n), Bank::Right)?,
            min_moves: solution.as_ref().map(|s| s.len() as u64),
            solvable: solution.is_some(),
        })
    }

    fn validate_move(&self, instance: &PuzzleInstance, state: &PuzzleState, mv: &Move) -> Result<PuzzleState, Violation> {
        let (PuzzleState::River { left, right, boat }, Move::River { passengers }) = (state, mv) else {
            return Err(Violation::KindMismatch);
        };
        if passengers.is_empty() {
            return Err(Violation::EmptyBoat);
        }
        if passengers.len() > capacity(instance) as usize {
            return Err(Violation::OverloadedBoat);
        }
        let aboard: BTreeSet<Person> = passengers.iter().copied().collect();
        if aboard.len() != passengers.len() {
            return Err(Violation::DuplicatePassenger);
        }
        if aboard.iter().any(|p| p.index == 0 || p.index > instance.size_n) {
            return Err(Violation::UnknownIndividual);
        }
        let (mut here, mut there) = match boat {
            Bank::Left => (left.clone(), right.clone()),
            Bank::Right => (right.clone(), left.clone()),
        };
        if !aboard.is_subset(&here) {
            return Err(Violation::PassengerNotWithBoat);
        }
        if !is_safe(&aboard) {
            return Err(Violation::UnprotectedActor);
        }
        here.retain(|p| !aboard.contains(p));
        there.extend(aboard);
        if !is_safe(&here) || !is_safe(&there) {
            return Err(Violation::UnprotectedActor);
        }
        let (left, right) = match boat {
            Bank::Left => (here, there),
            Bank::Right => (there, here),
        };
        Ok(PuzzleState::River {
            left,
            right,
            boat: boat.other(),
        })
    }

    fn legal_moves(&self, instance: &PuzzleInstance, state: &PuzzleState) -> Vec<Move> {
        let PuzzleState::River { left, right, boat } = state else {
            return Vec::new();
        };
        let bank: Vec<Person> = match boat {
            Bank::Left => left.iter().copied().collect(),
            Bank::Right => right.iter().copied().collect(),
        };
        let k = capacity(instance) as usize;
        let mut groups: Vec<Vec<Person>> = Vec::new();
        for mask in 1u64..(1u64 << bank.len()) {
            if mask.count_ones() as usize <= k {
                groups.push((0..bank.len()).filter(|i| mask & (1 << i) != 0).map(|i| bank[i]).collect());
            }
        }
        groups
            .into_iter()
            .map(|passengers| Move::River { passengers })
            .filter(|mv| self.validate_move(instance, state, mv).is_ok())
            .collect()
    }

    fn is_goal(&self, _instance: &PuzzleInstance, state: &PuzzleState) -> bool {
        matches!(state, PuzzleState::River { left, .. } if left.is_empty())
    }

    fn solve(&self, instance: &PuzzleInstance) -> Result<Vec<Move>> {
        search_solution(instance.size_n, capacity(instance))?.ok_or(Error::Unsolvable)
    }

    fn min_moves(&self, size_n: u32, params: &Params) -> Option<u64> {
        let params = self.resolve_params(size_n, params).ok()?;
        search_solution(size_n, params["k"]).ok()?.map(|s| s.len() as u64)
    }
}
