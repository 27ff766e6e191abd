//! Candidate solution extraction from model responses and thinking traces.
//!
//! Anchors are either a `moves =` assignment or a bare `[[` opener; from the
//! opening bracket a tolerant parser reads one balanced list. `#` starts a
//! comment running to the end of the line. Quoting is normalized, numeric
//! strings are accepted as integers and trailing commas are ignored. Lists
//! whose inner entries have the wrong shape for the puzzle are dropped, never
//! repaired. Identical move lists are kept once, at their first occurrence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Color, Move, Person, PuzzleKind};
use crate::tokenizer::Tokenizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Thinking,
    Final,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Thinking => "thinking",
            Self::Final => "final",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedSolution {
    pub moves: Vec<Move>,
    pub source: Source,
    /// Byte offsets `[start, end)` into the source text.
    pub char_span: (usize, usize),
    pub token_index: Option<usize>,
    pub normalized_position: f64,
    pub ordinal: usize,
}

impl ExtractedSolution {
    /// Short label used in run records, e.g. `thinking#2`.
    pub fn label(&self) -> String {
        format!("{}#{}", self.source.as_str(), self.ordinal)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extraction {
    pub solutions: Vec<ExtractedSolution>,
    /// Balanced lists found at an anchor that did not normalize into moves,
    /// plus unbalanced anchors after a `moves =` assignment.
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    List(Vec<Token>),
    Str(String),
    Int(i64),
    Bare(String),
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            match b {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn value(&mut self, depth: usize) -> Option<Token> {
        if depth > 8 {
            return None;
        }
        self.skip_ws();
        match *self.bytes.get(self.pos)? {
            b'[' => self.list(depth),
            q @ (b'"' | b'\'') => {
                let start = self.pos + 1;
                let len = self.bytes[start..].iter().position(|&c| c == q || c == b'\n')?;
                if self.bytes[start + len] != q {
                    return None;
                }
                self.pos = start + len + 1;
                Some(Token::Str(String::from_utf8_lossy(&self.bytes[start..start + len]).into_owned()))
            }
            b'-' | b'0'..=b'9' => {
                let start = self.pos;
                self.pos += 1;
                while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                std::str::from_utf8(&self.bytes[start..self.pos]).ok()?.parse().ok().map(Token::Int)
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                let start = self.pos;
                while self.bytes.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
                    self.pos += 1;
                }
                Some(Token::Bare(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()))
            }
            _ => None,
        }
    }

    fn list(&mut self, depth: usize) -> Option<Token> {
        debug_assert_eq!(self.bytes[self.pos], b'[');
        self.pos += 1;
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match *self.bytes.get(self.pos)? {
                b']' => {
                    self.pos += 1;
                    return Some(Token::List(items));
                }
                _ => items.push(self.value(depth + 1)?),
            }
            self.skip_ws();
            match *self.bytes.get(self.pos)? {
                b',' => self.pos += 1,
                b']' => {}
                _ => return None,
            }
        }
    }
}

fn as_index(token: &Token) -> Option<usize> {
    match token {
        Token::Int(i) => usize::try_from(*i).ok(),
        Token::Str(s) | Token::Bare(s) => s.trim().parse().ok(),
        Token::List(_) => None,
    }
}

fn as_text(token: &Token) -> Option<&str> {
    match token {
        Token::Str(s) | Token::Bare(s) => Some(s.trim()),
        _ => None,
    }
}

fn as_color(token: &Token) -> Option<Color> {
    match as_text(token)?.to_ascii_uppercase().as_str() {
        "R" | "RED" => Some(Color::Red),
        "B" | "BLUE" => Some(Color::Blue),
        _ => None,
    }
}

fn as_block(token: &Token) -> Option<String> {
    let name = as_text(token)?;
    (!name.is_empty() && name.chars().all(|c| c.is_ascii_uppercase())).then(|| name.to_string())
}

fn normalize_move(kind: PuzzleKind, entry: &Token) -> Option<Move> {
    let Token::List(items) = entry else { return None };
    match (kind, items.as_slice()) {
        (PuzzleKind::Hanoi, [d, f, t]) => Some(Move::Hanoi {
            disk: u32::try_from(as_index(d)?).ok()?,
            from: as_index(f)?,
            to: as_index(t)?,
        }),
        (PuzzleKind::Checkers, [c, f, t]) => Some(Move::Checkers {
            color: as_color(c)?,
            from: as_index(f)?,
            to: as_index(t)?,
        }),
        (PuzzleKind::Blocks, [b, f, t]) => Some(Move::Blocks {
            block: as_block(b)?,
            from: as_index(f)?,
            to: as_index(t)?,
        }),
        (PuzzleKind::River, people) if !people.is_empty() => Some(Move::River {
            passengers: people
                .iter()
                .map(|p| as_text(p)?.parse::<Person>().ok())
                .collect::<Option<Vec<_>>>()?,
        }),
        _ => None,
    }
}

fn normalize(kind: PuzzleKind, list: &Token) -> Option<Vec<Move>> {
    let Token::List(entries) = list else { return None };
    if entries.is_empty() {
        return None;
    }
    entries.iter().map(|e| normalize_move(kind, e)).collect()
}

/// Position of the next anchor at or after `from`: `(anchor start, bracket)`.
fn next_anchor(text: &[u8], from: usize) -> Option<(usize, usize)> {
    let mut i = from;
    while i < text.len() {
        if text[i..].starts_with(b"moves") && (i == 0 || !(text[i - 1].is_ascii_alphanumeric() || text[i - 1] == b'_')) {
            let mut j = i + 5;
            while text.get(j).is_some_and(|c| *c == b' ' || *c == b'\t') {
                j += 1;
            }
            if matches!(text.get(j), Some(b'=') | Some(b':')) {
                j += 1;
                while text.get(j).is_some_and(|c| c.is_ascii_whitespace()) {
                    j += 1;
                }
                if text.get(j) == Some(&b'[') {
                    return Some((i, j));
                }
            }
        }
        if text[i] == b'[' {
            let mut j = i + 1;
            while text.get(j).is_some_and(|c| c.is_ascii_whitespace()) {
                j += 1;
            }
            if text.get(j) == Some(&b'[') {
                return Some((i, i));
            }
        }
        i += 1;
    }
    None
}

/// All candidate solutions in `text`, in text order.
pub fn extract(text: &str, kind: PuzzleKind, source: Source) -> Extraction {
    let bytes = text.as_bytes();
    let mut out = Extraction::default();
    let mut pos = 0;
    while let Some((anchor, bracket)) = next_anchor(bytes, pos) {
        let mut parser = Parser { bytes, pos: bracket };
        match parser.list(0) {
            Some(list) => {
                match normalize(kind, &list) {
                    Some(moves) if !out.solutions.iter().any(|s| s.moves == moves) => {
                        out.solutions.push(ExtractedSolution {
                            moves,
                            source,
                            char_span: (anchor, parser.pos),
                            token_index: None,
                            normalized_position: anchor as f64 / bytes.len() as f64,
                            ordinal: out.solutions.len(),
                        });
                    }
                    Some(_) => {}
                    None => out.dropped += 1,
                }
                pos = parser.pos;
            }
            None => {
                if anchor != bracket {
                    out.dropped += 1;
                }
                pos = bracket + 1;
            }
        }
    }
    out
}

/// Position of a solution within `full_text`, in `[0, 1]`. Character mode
/// divides the start byte offset by the text length; BPE mode divides the
/// index of the token containing that offset by the token count.
pub fn position_of(solution: &ExtractedSolution, full_text: &str, tokenizer: &Tokenizer) -> Result<f64> {
    if full_text.is_empty() {
        return Err(Error::EmptyText);
    }
    let start = solution.char_span.0;
    if start > full_text.len() {
        return Err(Error::InvalidArgument("solution span lies outside the text".into()));
    }
    let ratio = match tokenizer.token_index_at(full_text, start)? {
        Some((index, total)) => index as f64 / total as f64,
        None => start as f64 / full_text.len() as f64,
    };
    Ok(ratio.clamp(0.0, 1.0))
}

/// Extracts and, in BPE mode, fills token indices and token-based positions.
pub fn extract_with(text: &str, kind: PuzzleKind, source: Source, tokenizer: &Tokenizer) -> Result<Extraction> {
    let mut extraction = extract(text, kind, source);
    if tokenizer.is_bpe() {
        for solution in &mut extraction.solutions {
            if let Some((index, _)) = tokenizer.token_index_at(text, solution.char_span.0)? {
                solution.token_index = Some(index);
            }
            solution.normalized_position = position_of(solution, text, tokenizer)?;
        }
    }
    Ok(extraction)
}

/// Splits an inline `<think>...</think>` block off a transcript. Returns
/// `(thinking, final)`; the final text is everything outside the block. A
/// closing tag without an opening one treats the whole prefix as thinking.
pub fn split_thinking(raw: &str) -> (Option<String>, String) {
    const OPEN: &str = "<think>";
    const CLOSE: &str = "</think>";
    let Some(close) = raw.find(CLOSE) else {
        return (None, raw.to_string());
    };
    let (before, inner_start) = match raw[..close].find(OPEN) {
        Some(open) => (&raw[..open], open + OPEN.len()),
        None => ("", 0),
    };
    let thinking = raw[inner_start..close].to_string();
    let final_text = format!("{before}{}", &raw[close + CLOSE.len()..]);
    (Some(thinking), final_text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::format_moves;

    #[test]
    fn hanoi_prompt_example() {
        let text = "moves = [[1, 0, 2], [2, 0, 1], [1, 2, 1], [3, 0, 2], [1, 1, 0], [2, 1, 2], [1, 0, 2]]";
        let found = extract(text, PuzzleKind::Hanoi, Source::Final);
        assert_eq!(found.solutions.len(), 1);
        assert_eq!(found.solutions[0].moves.len(), 7);
        assert_eq!(found.solutions[0].char_span, (0, text.len()));
        assert_eq!(found.dropped, 0);
    }

    #[test]
    fn river_prompt_example() {
        let text = r#"moves=[["A_2", "a_2"], ["A_2"], ["A_1", "A_2"], ["A_1"], ["A_1", "a_1"]]"#;
        let found = extract(text, PuzzleKind::River, Source::Final);
        assert_eq!(found.solutions.len(), 1);
        assert_eq!(found.solutions[0].moves.len(), 5);
    }

    #[test]
    fn duplicates_keep_first_occurrence() {
        let list = "moves = [[1, 0, 2], [2, 0, 1], [1, 2, 1], [3, 0, 2], [1, 1, 0], [2, 1, 2], [1, 0, 2]]";
        let text = format!("First try:\n{list}\nChecking again:\n{list}\n");
        let found = extract(&text, PuzzleKind::Hanoi, Source::Thinking);
        assert_eq!(found.solutions.len(), 1);
        assert_eq!(found.solutions[0].char_span.0, "First try:\n".len());
    }

    #[test]
    fn comments_are_stripped() {
        let found = extract("moves = [[1,0,2], # move small disk\n [2,0,1]]", PuzzleKind::Hanoi, Source::Final);
        assert_eq!(found.solutions[0].moves.len(), 2);
    }

    #[test]
    fn tolerant_forms_normalize() {
        let text = "moves = [['1', \"0\", 2], [2, 0, 1],]";
        let found = extract(text, PuzzleKind::Hanoi, Source::Final);
        assert_eq!(found.solutions[0].moves, vec![
            Move::Hanoi { disk: 1, from: 0, to: 2 },
            Move::Hanoi { disk: 2, from: 0, to: 1 },
        ]);
        let found = extract("[[R, 0, 1], ['b', 2, 0]]", PuzzleKind::Checkers, Source::Final);
        assert_eq!(found.solutions[0].moves.len(), 2);
    }

    #[test]
    fn wrong_arity_is_dropped_not_repaired() {
        let found = extract("state [[3, 2, 1], [], []] then moves = [[1, 0]]", PuzzleKind::Hanoi, Source::Final);
        assert!(found.solutions.is_empty());
        assert_eq!(found.dropped, 2);
    }

    #[test]
    fn bare_bracket_lists_are_found_in_prose() {
        let text = "I think [[\"C\", 1, 2], [\"B\", 0, 1]] works, or maybe not.";
        let found = extract(text, PuzzleKind::Blocks, Source::Thinking);
        assert_eq!(found.solutions.len(), 1);
        assert_eq!(found.solutions[0].char_span.0, 8);
    }

    #[test]
    fn ordinals_and_positions_follow_text_order() {
        let text = "moves = [[1, 0, 1]] and later moves = [[1, 0, 2]]";
        let found = extract(text, PuzzleKind::Hanoi, Source::Thinking);
        let s = &found.solutions;
        assert_eq!((s[0].ordinal, s[1].ordinal), (0, 1));
        assert!(s[0].normalized_position < s[1].normalized_position);
        assert_eq!(s[0].normalized_position, 0.0);
    }

    #[test]
    fn notation_round_trip() {
        let moves = vec![Move::Checkers { color: Color::Blue, from: 2, to: 0 }];
        let found = extract(&format_moves(&moves), PuzzleKind::Checkers, Source::Final);
        assert_eq!(found.solutions[0].moves, moves);
    }

    #[test]
    fn positions_in_character_mode() {
        let text = "x".repeat(1000);
        let mut sol = ExtractedSolution {
            moves: vec![],
            source: Source::Thinking,
            char_span: (0, 1),
            token_index: None,
            normalized_position: 0.0,
            ordinal: 0,
        };
        let chars = Tokenizer::character();
        assert_eq!(position_of(&sol, &text, &chars).unwrap(), 0.0);
        sol.char_span = (999, 1000);
        assert!((position_of(&sol, &text, &chars).unwrap() - 0.999).abs() < 1e-12);
        assert!(matches!(position_of(&sol, "", &chars), Err(Error::EmptyText)));
    }

    #[test]
    fn thinking_split() {
        let (thinking, fin) = split_thinking("<think>plan\nmoves = [[1, 0, 2]]</think>\nmoves = [[1, 0, 2]]");
        assert_eq!(thinking.as_deref(), Some("plan\nmoves = [[1, 0, 2]]"));
        assert_eq!(fin, "\nmoves = [[1, 0, 2]]");
        let (thinking, fin) = split_thinking("reasoning only</think>answer");
        assert_eq!(thinking.as_deref(), Some("reasoning only"));
        assert_eq!(fin, "answer");
        assert_eq!(split_thinking("no tags"), (None, "no tags".to_string()));
    }
}
