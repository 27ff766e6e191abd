#![allow(dead_code)]

use puzzlebench_core::env::{apply_solution, make_instance, solve};
use puzzlebench_core::model::{format_moves, Params, PromptVariant, PuzzleInstance, PuzzleKind, RunRecord, Usage, Verdict};

pub fn instance(kind: PuzzleKind, n: u32) -> PuzzleInstance {
    make_instance(kind, n, &Params::new()).unwrap()
}

/// A record as a run would persist it. The run-time verdict is the oracle's
/// judgement of the last listing in `response`, or malformed.
pub fn record(run_id: &str, model: &str, inst: &PuzzleInstance, sample_idx: u32, thinking: Option<&str>, response: &str) -> RunRecord {
    let found = puzzlebench_core::extract::extract(response, inst.kind, puzzlebench_core::extract::Source::Final);
    let final_verdict = match found.solutions.last() {
        Some(s) => apply_solution(inst, &s.moves),
        None => Verdict::malformed(&inst.initial),
    };
    let thinking_tokens = thinking.map_or(0, |t| t.len() as u64 / 4);
    RunRecord {
        run_id: run_id.into(),
        instance_id: inst.instance_id.clone(),
        sample_idx,
        model_id: model.into(),
        kind: inst.kind,
        size_n: inst.size_n,
        params: inst.params.clone(),
        variant: PromptVariant::Standard,
        prompt_hash: "0".repeat(64),
        response_text: response.into(),
        thinking_text: thinking.map(str::to_string),
        usage: Usage {
            prompt_tokens: 100,
            completion_tokens: thinking_tokens + response.len() as u64 / 4,
            thinking_tokens,
        },
        extracted: Vec::new(),
        final_verdict,
        started_at_ms: 1_000,
        finished_at_ms: 2_000,
    }
}

pub fn oracle_answer(inst: &PuzzleInstance) -> String {
    format!("Here is the plan.\n{}\n", format_moves(&solve(inst).unwrap()))
}

/// Oracle answer with move `at` replaced by its reverse.
pub fn wrong_answer(inst: &PuzzleInstance, at: usize) -> String {
    let mut moves = solve(inst).unwrap();
    let at = at.min(moves.len() - 1);
    moves[at] = moves[at].swapped();
    format!("Here is the plan.\n{}\n", format_moves(&moves))
}
