use proptest::prelude::*;
use puzzlebench_core::extract::{extract, extract_with, position_of, Source};
use puzzlebench_core::model::{format_moves, Color, Move, Person, PuzzleKind};
use puzzlebench_core::tokenizer::Tokenizer;

fn arb_moves(kind: PuzzleKind) -> BoxedStrategy<Vec<Move>> {
    let one: BoxedStrategy<Move> = match kind {
        PuzzleKind::Hanoi => (1u32..30, 0usize..3, 0usize..3)
            .prop_map(|(disk, from, to)| Move::Hanoi { disk, from, to })
            .boxed(),
        PuzzleKind::Checkers => (any::<bool>(), 0usize..40, 0usize..40)
            .prop_map(|(red, from, to)| Move::Checkers {
                color: if red { Color::Red } else { Color::Blue },
                from,
                to,
            })
            .boxed(),
        PuzzleKind::River => proptest::collection::vec((any::<bool>(), 1u32..12), 1..4)
            .prop_map(|people| Move::River {
                passengers: people
                    .into_iter()
                    .map(|(agent, i)| if agent { Person::agent(i) } else { Person::actor(i) })
                    .collect(),
            })
            .boxed(),
        PuzzleKind::Blocks => ("[A-Z]{1,2}", 0usize..5, 0usize..5)
            .prop_map(|(block, from, to)| Move::Blocks { block, from, to })
            .boxed(),
    };
    proptest::collection::vec(one, 1..25).boxed()
}

fn arb_case() -> impl Strategy<Value = (PuzzleKind, Vec<Move>)> {
    (0usize..4).prop_flat_map(|i| {
        let kind = PuzzleKind::ALL[i];
        arb_moves(kind).prop_map(move |m| (kind, m))
    })
}

/// Prose without brackets, so it can never open a candidate.
fn prose() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 ,.;:!?'\n-]{0,200}"
}

proptest! {
    #[test]
    fn notation_round_trips((kind, moves) in arb_case()) {
        let found = extract(&format_moves(&moves), kind, Source::Final);
        prop_assert_eq!(found.solutions.len(), 1);
        prop_assert_eq!(&found.solutions[0].moves, &moves);
        prop_assert_eq!(found.dropped, 0);
    }

    #[test]
    fn surrounding_prose_changes_positions_only(
        (kind, moves) in arb_case(),
        before in prose(),
        after in prose(),
    ) {
        let listing = format_moves(&moves);
        let bare = extract(&listing, kind, Source::Thinking);
        let text = format!("{before}\n{listing}\n{after}");
        let wrapped = extract(&text, kind, Source::Thinking);
        prop_assert_eq!(bare.solutions.len(), wrapped.solutions.len());
        prop_assert_eq!(&bare.solutions[0].moves, &wrapped.solutions[0].moves);
        let expected_start = before.len() + 1 + bare.solutions[0].char_span.0;
        prop_assert_eq!(wrapped.solutions[0].char_span.0, expected_start);
        prop_assert!((0.0..=1.0).contains(&wrapped.solutions[0].normalized_position));
    }

    #[test]
    fn extraction_is_deterministic((kind, moves) in arb_case(), noise in prose()) {
        let text = format!("{noise}\n{}\n{noise}", format_moves(&moves));
        prop_assert_eq!(extract(&text, kind, Source::Final), extract(&text, kind, Source::Final));
    }

    #[test]
    fn positions_are_monotone_in_text_order(
        lists in proptest::collection::vec(arb_moves(PuzzleKind::Hanoi), 1..6),
        gaps in proptest::collection::vec(prose(), 6),
    ) {
        let mut text = String::new();
        for (i, moves) in lists.iter().enumerate() {
            text.push_str(&gaps[i]);
            text.push_str(&format_moves(moves));
        }
        let found = extract(&text, PuzzleKind::Hanoi, Source::Thinking);
        for pair in found.solutions.windows(2) {
            prop_assert!(pair[0].char_span.0 < pair[1].char_span.0);
            prop_assert!(pair[0].normalized_position <= pair[1].normalized_position);
            prop_assert_eq!(pair[0].ordinal + 1, pair[1].ordinal);
        }
        for s in &found.solutions {
            prop_assert!(s.normalized_position >= 0.0 && s.normalized_position <= 1.0);
        }
    }
}

#[test]
fn multi_line_lists_with_comments() {
    let text = "Plan:\nmoves = [\n  [1, 0, 2],  # smallest first\n  [2, 0, 1],\n  # now bring it back\n  [1, 2, 1],\n]\n";
    let found = extract(text, PuzzleKind::Hanoi, Source::Final);
    assert_eq!(found.solutions.len(), 1);
    assert_eq!(found.solutions[0].moves.len(), 3);
}

#[test]
fn nested_brackets_in_comments_do_not_break_parsing() {
    let text = "moves = [[1, 0, 2], # see [[x]]\n[2, 0, 1]]";
    let found = extract(text, PuzzleKind::Hanoi, Source::Final);
    assert_eq!(found.solutions[0].moves.len(), 2);
}

#[test]
fn unbalanced_candidates_are_counted_as_dropped() {
    let found = extract("moves = [[1, 0, 2], [2, 0", PuzzleKind::Hanoi, Source::Final);
    assert!(found.solutions.is_empty());
    assert_eq!(found.dropped, 1);
}

#[test]
fn natural_language_moves_are_not_extracted() {
    let found = extract("Move disk 1 from peg 0 to peg 2, then disk 2 to peg 1.", PuzzleKind::Hanoi, Source::Final);
    assert!(found.solutions.is_empty());
}

#[test]
fn river_ids_are_case_sensitive() {
    let found = extract(r#"moves = [["a_1", "A_1"], ["A_1"]]"#, PuzzleKind::River, Source::Final);
    assert_eq!(found.solutions[0].moves[0], Move::River { passengers: vec![Person::actor(1), Person::agent(1)] });
    let found = extract(r#"moves = [["B_1"]]"#, PuzzleKind::River, Source::Final);
    assert!(found.solutions.is_empty());
}

const CL100K_ENV: &str = "PUZZLEBENCH_CL100K";
const CL100K_FALLBACK: &str = "/usr/local/lib/python3.10/dist-packages/marimo/_lsp/copilot/cl100k_base.tiktoken";

/// Token positions pinned from a reference cl100k_base tokenization of the
/// fixture: 76 tokens, solutions starting at tokens 10 and 47.
#[test]
fn bpe_positions_match_reference_segmentation() {
    let path = std::env::var(CL100K_ENV).unwrap_or_else(|_| CL100K_FALLBACK.to_string());
    if !std::path::Path::new(&path).exists() {
        eprintln!("cl100k vocabulary not found; set {CL100K_ENV} to run this check");
        return;
    }
    let tok = Tokenizer::from_tiktoken_file(std::path::Path::new(&path)).unwrap();
    let text = "Let me think about the disks.\nFirst attempt: moves = [[1, 0, 2], [2, 0, 1], [1, 2, 1]]\nThat's wrong; I'll retry.\nmoves = [[1, 0, 1], [2, 0, 2], [1, 1, 2]]\n";
    assert_eq!(tok.count(text).unwrap(), 76);
    let found = extract_with(text, PuzzleKind::Hanoi, Source::Thinking, &tok).unwrap();
    let indices: Vec<Option<usize>> = found.solutions.iter().map(|s| s.token_index).collect();
    assert_eq!(indices, vec![Some(10), Some(47)]);
    assert_eq!(found.solutions[0].normalized_position, 10.0 / 76.0);
    assert_eq!(position_of(&found.solutions[1], text, &tok).unwrap(), 47.0 / 76.0);
}
