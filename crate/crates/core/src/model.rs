//! Shared domain model: puzzle kinds, states, moves, verdicts and run records.
//!
//! States serialize to the same bracket notation the prompts use, e.g. a
//! three-disk Hanoi start is `[[3,2,1],[],[]]` and a checkers board is
//! `["R","_","B"]`. River states are `[[left bank], [right bank], "left"]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PuzzleKind {
    Hanoi,
    Checkers,
    River,
    Blocks,
}

impl PuzzleKind {
    pub const ALL: [PuzzleKind; 4] = [Self::Hanoi, Self::Checkers, Self::River, Self::Blocks];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Hanoi => "hanoi",
            Self::Checkers => "checkers",
            Self::River => "river",
            Self::Blocks => "blocks",
        }
    }
}

impl fmt::Display for PuzzleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PuzzleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hanoi" | "tower_of_hanoi" => Ok(Self::Hanoi),
            "checkers" | "checker_jumping" => Ok(Self::Checkers),
            "river" | "river_crossing" => Ok(Self::River),
            "blocks" | "blocks_world" => Ok(Self::Blocks),
            other => Err(Error::InvalidArgument(format!("unknown puzzle `{other}`"))),
        }
    }
}

/// Kind-specific integer parameters (`k` for river boat capacity, `stacks` for
/// blocks). Sorted keys give a canonical serialization.
pub type Params = BTreeMap<String, u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Agent,
    Actor,
}

/// One river-crossing individual: `A_i` is agent i, `a_i` is actor i (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Person {
    pub role: Role,
    pub index: u32,
}

impl Person {
    pub fn agent(index: u32) -> Self {
        Self { role: Role::Agent, index }
    }

    pub fn actor(index: u32) -> Self {
        Self { role: Role::Actor, index }
    }

    /// Everyone in an `n`-pair instance, agents first.
    pub fn all(n: u32) -> BTreeSet<Person> {
        (1..=n).flat_map(|i| [Self::agent(i), Self::actor(i)]).collect()
    }
}

impl fmt::Display for Person {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            Role::Agent => write!(f, "A_{}", self.index),
            Role::Actor => write!(f, "a_{}", self.index),
        }
    }
}

impl FromStr for Person {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not an individual id: `{s}`"));
        let (head, tail) = s.split_once('_').ok_or_else(bad)?;
        let index: u32 = tail.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        match head {
            "A" => Ok(Self::agent(index)),
            "a" => Ok(Self::actor(index)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn symbol(self) -> char {
        match self {
            Self::Red => 'R',
            Self::Blue => 'B',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Checker(Color),
    Empty,
}

impl Cell {
    pub fn symbol(self) -> char {
        match self {
            Self::Checker(c) => c.symbol(),
            Self::Empty => '_',
        }
    }

    fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "R" => Some(Self::Checker(Color::Red)),
            "B" => Some(Self::Checker(Color::Blue)),
            "_" => Some(Self::Empty),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bank {
    Left,
    Right,
}

impl Bank {
    pub fn other(self) -> Self {
        match self {
            Self::Left => Self::Right,
            Self::Right => Self::Left,
        }
    }
}

/// Spreadsheet-style block label: 0 → `A`, 25 → `Z`, 26 → `AA`.
pub fn block_name(index: usize) -> String {
    let mut n = index + 1;
    let mut out = Vec::new();
    while n > 0 {
        let rem = (n - 1) % 26;
        out.push(b'A' + rem as u8);
        n = (n - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PuzzleState {
    /// Pegs listed left to right; each peg bottom to top.
    Hanoi { pegs: Vec<Vec<u32>> },
    Checkers { board: Vec<Cell> },
    River {
        left: BTreeSet<Person>,
        right: BTreeSet<Person>,
        boat: Bank,
    },
    /// Stacks listed left to right; each stack bottom to top.
    Blocks { stacks: Vec<Vec<String>> },
}

impl PuzzleState {
    /// Three pegs holding disks `1..=N`, each peg strictly decreasing upwards.
    pub fn hanoi(pegs: Vec<Vec<u32>>) -> Result<Self> {
        if pegs.len() != 3 {
            return Err(Error::InvalidState(format!("hanoi needs 3 pegs, got {}", pegs.len())));
        }
        for peg in &pegs {
            if peg.windows(2).any(|w| w[0] <= w[1]) {
                return Err(Error::InvalidState(format!("peg {peg:?} is not strictly decreasing")));
            }
        }
        let mut disks: Vec<u32> = pegs.iter().flatten().copied().collect();
        disks.sort_unstable();
        if disks.is_empty() || disks.iter().enumerate().any(|(i, &d)| d as usize != i + 1) {
            return Err(Error::InvalidState(format!("disk ids {disks:?} are not 1..=N")));
        }
        Ok(Self::Hanoi { pegs })
    }

    /// Board of length `2N + 1` with exactly one gap and `N` of each color.
    pub fn checkers(board: Vec<Cell>) -> Result<Self> {
        let empties = board.iter().filter(|c| **c == Cell::Empty).count();
        let reds = board.iter().filter(|c| **c == Cell::Checker(Color::Red)).count();
        let blues = board.len() - empties - reds;
        if empties != 1 || reds != blues || reds == 0 {
            return Err(Error::InvalidState(format!(
                "checkers board needs one gap and equal colors (gaps {empties}, R {reds}, B {blues})"
            )));
        }
        Ok(Self::Checkers { board })
    }

    /// Banks must partition all `2N` individuals of an `N`-pair instance.
    pub fn river(left: BTreeSet<Person>, right: BTreeSet<Person>, boat: Bank) -> Result<Self> {
        if !left.is_disjoint(&right) {
            return Err(Error::InvalidState("an individual is on both banks".into()));
        }
        let everyone: BTreeSet<Person> = left.union(&right).copied().collect();
        let n = (everyone.len() / 2) as u32;
        if n == 0 || everyone != Person::all(n) {
            return Err(Error::InvalidState(
                "banks do not hold exactly a_1..a_N and A_1..A_N".into(),
            ));
        }
        Ok(Self::River { left, right, boat })
    }

    /// Stacks of uniquely named blocks.
    pub fn blocks(stacks: Vec<Vec<String>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for name in stacks.iter().flatten() {
            if name.is_empty() || !seen.insert(name.as_str()) {
                return Err(Error::InvalidState(format!("duplicate or empty block `{name}`")));
            }
        }
        if stacks.is_empty() {
            return Err(Error::InvalidState("blocks state needs at least one stack".into()));
        }
        Ok(Self::Blocks { stacks })
    }

    pub fn kind(&self) -> PuzzleKind {
        match self {
            Self::Hanoi { .. } => PuzzleKind::Hanoi,
            Self::Checkers { .. } => PuzzleKind::Checkers,
            Self::River { .. } => PuzzleKind::River,
            Self::Blocks { .. } => PuzzleKind::Blocks,
        }
    }

    /// Re-runs the constructor checks for this state's kind.
    pub fn validate(&self) -> Result<()> {
        match self.clone() {
            Self::Hanoi { pegs } => Self::hanoi(pegs).map(drop),
            Self::Checkers { board } => Self::checkers(board).map(drop),
            Self::River { left, right, boat } => Self::river(left, right, boat).map(drop),
            Self::Blocks { stacks } => Self::blocks(stacks).map(drop),
        }
    }

    /// Disks, checker pairs, actor/agent pairs or blocks.
    pub fn size(&self) -> u32 {
        match self {
            Self::Hanoi { pegs } => pegs.iter().map(Vec::len).sum::<usize>() as u32,
            Self::Checkers { board } => ((board.len() - 1) / 2) as u32,
            Self::River { left, right, .. } => ((left.len() + right.len()) / 2) as u32,
            Self::Blocks { stacks } => stacks.iter().map(Vec::len).sum::<usize>() as u32,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Self::Hanoi { pegs } => json!(pegs),
            Self::Checkers { board } => {
                Value::Array(board.iter().map(|c| Value::String(c.symbol().to_string())).collect())
            }
            Self::River { left, right, boat } => {
                let names = |s: &BTreeSet<Person>| -> Vec<String> { s.iter().map(Person::to_string).collect() };
                json!([names(left), names(right), boat])
            }
            Self::Blocks { stacks } => json!(stacks),
        }
    }

    /// Parses bracket notation. The kind is inferred from the shape: string
    /// cells are checkers, a trailing side name is river, integer stacks are
    /// Hanoi and string stacks are blocks.
    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |why: &str| Error::InvalidState(format!("{why}: {value}"));
        let items = value.as_array().ok_or_else(|| bad("state must be an array"))?;
        if items.iter().all(Value::is_string) && !items.is_empty() {
            let board = items
                .iter()
                .map(|v| v.as_str().and_then(Cell::from_symbol))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("unknown checkers cell"))?;
            return Self::checkers(board);
        }
        if items.len() == 3 && items[2].is_string() {
            let side: Bank = serde_json::from_value(items[2].clone()).map_err(|_| bad("unknown boat side"))?;
            let bank = |v: &Value| -> Result<BTreeSet<Person>> {
                v.as_array()
                    .ok_or_else(|| bad("bank must be an array"))?
                    .iter()
                    .map(|p| p.as_str().ok_or_else(|| bad("individual must be a string"))?.parse())
                    .collect()
            };
            return Self::river(bank(&items[0])?, bank(&items[1])?, side);
        }
        let stacks = items
            .iter()
            .map(|s| s.as_array().cloned().ok_or_else(|| bad("stack must be an array")))
            .collect::<Result<Vec<_>>>()?;
        let flat: Vec<&Value> = stacks.iter().flatten().collect();
        if flat.iter().all(|v| v.is_u64()) && !flat.is_empty() {
            let pegs = stacks
                .iter()
                .map(|s| s.iter().map(|v| v.as_u64().map(|d| d as u32)).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("disk ids must be integers"))?;
            return Self::hanoi(pegs);
        }
        if flat.iter().all(|v| v.is_string()) {
            let stacks = stacks
                .iter()
                .map(|s| s.iter().map(|v| v.as_str().map(str::to_owned)).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("block names must be strings"))?;
            return Self::blocks(stacks);
        }
        Err(bad("unrecognized state shape"))
    }
}

impl Serialize for PuzzleState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PuzzleState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        Self::from_json(&value).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Move {
    Hanoi { disk: u32, from: usize, to: usize },
    Checkers { color: Color, from: usize, to: usize },
    River { passengers: Vec<Person> },
    Blocks { block: String, from: usize, to: usize },
}

impl Move {
    pub fn kind(&self) -> PuzzleKind {
        match self {
            Self::Hanoi { .. } => PuzzleKind::Hanoi,
            Self::Checkers { .. } => PuzzleKind::Checkers,
            Self::River { .. } => PuzzleKind::River,
            Self::Blocks { .. } => PuzzleKind::Blocks,
        }
    }

    /// Same move with source and destination exchanged. River moves have no
    /// endpoints and are returned unchanged.
    pub fn swapped(&self) -> Self {
        match self.clone() {
            Self::Hanoi { disk, from, to } => Self::Hanoi { disk, from: to, to: from },
            Self::Checkers { color, from, to } => Self::Checkers { color, from: to, to: from },
            Self::Blocks { block, from, to } => Self::Blocks { block, from: to, to: from },
            river @ Self::River { .. } => river,
        }
    }
}

/// Prompt notation for a single move, e.g. `[1, 0, 2]` or `['R', 0, 1]`.
impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Hanoi { disk, from, to } => write!(f, "[{disk}, {from}, {to}]"),
            Self::Checkers { color, from, to } => write!(f, "['{}', {from}, {to}]", color.symbol()),
            Self::River { passengers } => {
                f.write_str("[")?;
                for (i, p) in passengers.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "\"{p}\"")?;
                }
                f.write_str("]")
            }
            Self::Blocks { block, from, to } => write!(f, "[\"{block}\", {from}, {to}]"),
        }
    }
}

/// Renders `moves = [[...], ...]` exactly as the prompts request it.
pub fn format_moves(moves: &[Move]) -> String {
    let body: Vec<String> = moves.iter().map(Move::to_string).collect();
    format!("moves = [{}]", body.join(", "))
}

/// Coarse failure classes recorded on a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    Malformed,
    IllegalMove,
    ConstraintViolation,
    GoalNotReached,
}

/// Why a simulator rejected a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    KindMismatch,
    IndexOutOfBounds,
    SameSourceAndTarget,
    SourceEmpty,
    NotTopmost,
    LargerOnSmaller,
    WrongColor,
    TargetOccupied,
    BackwardMove,
    InvalidDistance,
    NoOpponentToJump,
    EmptyBoat,
    OverloadedBoat,
    DuplicatePassenger,
    UnknownIndividual,
    PassengerNotWithBoat,
    UnprotectedActor,
}

impl Violation {
    pub fn reason(self) -> FailureReason {
        match self {
            Self::KindMismatch => FailureReason::Malformed,
            Self::LargerOnSmaller | Self::EmptyBoat | Self::OverloadedBoat | Self::UnprotectedActor => {
                FailureReason::ConstraintViolation
            }
            _ => FailureReason::IllegalMove,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = serde_json::to_value(self).expect("unit variant");
        f.write_str(text.as_str().unwrap_or("unknown"))
    }
}

/// Outcome of replaying a move list from an instance's initial state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub moves_checked: usize,
    pub first_failure_index: Option<usize>,
    pub failure_reason: Option<FailureReason>,
    pub violation: Option<Violation>,
    pub success: bool,
    /// State reached before the failing move, or after the last move.
    pub final_state: PuzzleState,
}

impl Verdict {
    /// Verdict for an attempt that produced no parseable solution.
    pub fn malformed(initial: &PuzzleState) -> Self {
        Self {
            moves_checked: 0,
            first_failure_index: None,
            failure_reason: Some(FailureReason::Malformed),
            violation: None,
            success: false,
            final_state: initial.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptVariant {
    #[default]
    Standard,
    PrescribedAlgorithm,
}

impl PromptVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::PrescribedAlgorithm => "prescribed_algorithm",
        }
    }
}

impl FromStr for PromptVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Self::Standard),
            "prescribed_algorithm" | "prescribed" => Ok(Self::PrescribedAlgorithm),
            other => Err(Error::InvalidArgument(format!("unknown prompt variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuzzleInstance {
    pub kind: PuzzleKind,
    #[serde(rename = "n")]
    pub size_n: u32,
    pub params: Params,
    pub initial: PuzzleState,
    pub goal: PuzzleState,
    pub min_moves: Option<u64>,
    pub solvable: bool,
    pub instance_id: String,
}

impl PuzzleInstance {
    pub fn param(&self, key: &str) -> Option<u32> {
        self.params.get(key).copied()
    }

    /// Checks the cross-field invariants after deserialization.
    pub fn validate(&self) -> Result<()> {
        for state in [&self.initial, &self.goal] {
            if state.kind() != self.kind {
                return Err(Error::InvalidState(format!("state kind {} in a {} instance", state.kind(), self.kind)));
            }
            state.validate()?;
            if state.size() != self.size_n {
                return Err(Error::InvalidState(format!(
                    "state holds {} items, instance size is {}",
                    state.size(),
                    self.size_n
                )));
            }
        }
        if let (PuzzleState::Blocks { stacks: a }, PuzzleState::Blocks { stacks: b }) = (&self.initial, &self.goal) {
            let set = |s: &Vec<Vec<String>>| s.iter().flatten().cloned().collect::<BTreeSet<_>>();
            if set(a) != set(b) || a.len() != b.len() {
                return Err(Error::InvalidState("initial and goal hold different blocks".into()));
            }
        }
        if !self.solvable && self.min_moves.is_some() {
            return Err(Error::InvalidState("unsolvable instance cannot carry min_moves".into()));
        }
        Ok(())
    }
}

/// Stable id over `(kind, size_n, params)`: the first 16 hex digits of the
/// SHA-256 of the canonical JSON `{"kind":..,"n":..,"params":{..}}`.
pub fn instance_id(kind: PuzzleKind, size_n: u32, params: &Params) -> Result<String> {
    if size_n < 1 {
        return Err(Error::InvalidSize {
            kind,
            size_n,
            reason: "size must be at least 1".into(),
        });
    }
    let mut canonical = BTreeMap::new();
    canonical.insert("kind", json!(kind));
    canonical.insert("n", json!(size_n));
    canonical.insert("params", json!(params));
    let bytes = serde_json::to_vec(&canonical)?;
    let digest = Sha256::digest(&bytes);
    Ok(hex::encode(&digest[..8]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub thinking_tokens: u64,
}

/// One sampled model attempt as persisted in a run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub instance_id: String,
    pub sample_idx: u32,
    pub model_id: String,
    pub kind: PuzzleKind,
    #[serde(rename = "n")]
    pub size_n: u32,
    pub params: Params,
    pub variant: PromptVariant,
    pub prompt_hash: String,
    pub response_text: String,
    pub thinking_text: Option<String>,
    pub usage: Usage,
    /// Labels of the solutions extracted at run time, e.g. `final#0`.
    pub extracted: Vec<String>,
    pub final_verdict: Verdict,
    pub started_at_ms: u64,
    pub finished_at_ms: u64,
}

impl RunRecord {
    pub fn key(&self) -> (String, String, u32) {
        (self.run_id.clone(), self.instance_id.clone(), self.sample_idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_names_roll_over_like_spreadsheet_columns() {
        assert_eq!(block_name(0), "A");
        assert_eq!(block_name(25), "Z");
        assert_eq!(block_name(26), "AA");
        assert_eq!(block_name(27), "AB");
        assert_eq!(block_name(26 + 26 * 26), "AAA");
    }

    #[test]
    fn instance_id_is_deterministic_and_param_sensitive() {
        let empty = Params::new();
        assert_eq!(
            instance_id(PuzzleKind::Hanoi, 3, &empty).unwrap(),
            instance_id(PuzzleKind::Hanoi, 3, &empty).unwrap()
        );
        let k2 = Params::from([("k".to_string(), 2)]);
        let k3 = Params::from([("k".to_string(), 3)]);
        assert_ne!(
            instance_id(PuzzleKind::River, 3, &k2).unwrap(),
            instance_id(PuzzleKind::River, 3, &k3).unwrap()
        );
        assert!(matches!(instance_id(PuzzleKind::Hanoi, 0, &empty), Err(Error::InvalidSize { .. })));
    }

    #[test]
    fn instance_id_golden_value() {
        // sha256 of {"kind":"blocks","n":4,"params":{"stacks":3}}, first 8 bytes
        let params = Params::from([("stacks".to_string(), 3)]);
        assert_eq!(instance_id(PuzzleKind::Blocks, 4, &params).unwrap(), "cd7f8721b53b8c22");
    }

    #[test]
    fn state_json_round_trips_in_bracket_notation() {
        let hanoi = PuzzleState::hanoi(vec![vec![3, 2, 1], vec![], vec![]]).unwrap();
        assert_eq!(hanoi.to_json().to_string(), "[[3,2,1],[],[]]");
        let board = PuzzleState::from_json(&json!(["R", "_", "B"])).unwrap();
        assert_eq!(board.kind(), PuzzleKind::Checkers);
        let river = PuzzleState::river(Person::all(2), BTreeSet::new(), Bank::Left).unwrap();
        assert_eq!(river.to_json().to_string(), r#"[["A_1","A_2","a_1","a_2"],[],"left"]"#);
        for state in [hanoi, board, river] {
            assert_eq!(PuzzleState::from_json(&state.to_json()).unwrap(), state);
        }
        let blocks = PuzzleState::from_json(&json!([["A", "B"], ["C", "D"], []])).unwrap();
        assert_eq!(blocks.kind(), PuzzleKind::Blocks);
    }

    #[test]
    fn constructors_reject_invariant_violations() {
        assert!(PuzzleState::hanoi(vec![vec![1, 2], vec![], vec![]]).is_err());
        assert!(PuzzleState::hanoi(vec![vec![3, 1], vec![], vec![]]).is_err());
        assert!(PuzzleState::hanoi(vec![vec![2, 1], vec![]]).is_err());
        let r = Cell::Checker(Color::Red);
        assert!(PuzzleState::checkers(vec![r, Cell::Empty, r]).is_err());
        assert!(PuzzleState::checkers(vec![r, Cell::Empty, Cell::Empty]).is_err());
        let mut right = BTreeSet::new();
        right.insert(Person::actor(1));
        assert!(PuzzleState::river(Person::all(2), right, Bank::Left).is_err());
        assert!(PuzzleState::blocks(vec![vec!["A".into()], vec!["A".into()]]).is_err());
    }

    #[test]
    fn move_notation_matches_prompt_examples() {
        let moves = vec![
            Move::Hanoi { disk: 1, from: 0, to: 2 },
            Move::Hanoi { disk: 2, from: 0, to: 1 },
        ];
        assert_eq!(format_moves(&moves), "moves = [[1, 0, 2], [2, 0, 1]]");
        let c = Move::Checkers { color: Color::Red, from: 0, to: 1 };
        assert_eq!(c.to_string(), "['R', 0, 1]");
        let r = Move::River { passengers: vec![Person::agent(2), Person::actor(2)] };
        assert_eq!(r.to_string(), r#"["A_2", "a_2"]"#);
        let b = Move::Blocks { block: "C".into(), from: 1, to: 2 };
        assert_eq!(b.to_string(), r#"["C", 1, 2]"#);
    }

    #[test]
    fn person_parsing() {
        assert_eq!("A_2".parse::<Person>().unwrap(), Person::agent(2));
        assert_eq!("a_10".parse::<Person>().unwrap(), Person::actor(10));
        assert!("b_1".parse::<Person>().is_err());
        assert!("a_0".parse::<Person>().is_err());
    }
}
