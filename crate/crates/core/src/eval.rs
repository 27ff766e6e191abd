//! Attempt scoring and the metric suite built on top of it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::env::{apply_solution, environment_for, make_instance};
use crate::error::{Error, Result};
use crate::extract::{extract_with, split_thinking, ExtractedSolution, Source};
use crate::model::{FailureReason, Params, PromptVariant, PuzzleInstance, PuzzleKind, RunRecord, Verdict};
use crate::par::{self, Execution};
use crate::tokenizer::Tokenizer;

pub const DEFAULT_BINS: usize = 10;
pub const DEFAULT_K_LIST: &[usize] = &[1, 2, 4, 8, 16, 25];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntermediatePoint {
    pub ordinal: usize,
    pub position: f64,
    pub correct: bool,
    pub move_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptScore {
    pub run_id: String,
    pub instance_id: String,
    pub sample_idx: u32,
    pub model_id: String,
    pub kind: PuzzleKind,
    pub size_n: u32,
    pub variant: PromptVariant,
    pub solvable: bool,
    pub required_moves: Option<u64>,
    pub final_success: bool,
    pub first_failure_index: Option<usize>,
    pub failure_reason: Option<FailureReason>,
    pub final_move_count: Option<usize>,
    pub intermediate: Vec<IntermediatePoint>,
    pub thinking_tokens: u64,
    pub completion_tokens: u64,
}

/// Grouping used by every per-configuration table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKey {
    pub kind: PuzzleKind,
    pub size_n: u32,
    pub model_id: String,
    pub variant: PromptVariant,
}

impl AttemptScore {
    pub fn group(&self) -> GroupKey {
        GroupKey {
            kind: self.kind,
            size_n: self.size_n,
            model_id: self.model_id.clone(),
            variant: self.variant,
        }
    }
}

/// The designated final answer: the last solution extracted from the final
/// response text.
pub fn final_solution(extracted: &[ExtractedSolution]) -> Option<&ExtractedSolution> {
    extracted
        .iter()
        .filter(|s| s.source == Source::Final)
        .max_by_key(|s| s.char_span.0)
}

pub fn final_verdict(instance: &PuzzleInstance, extracted: &[ExtractedSolution]) -> Verdict {
    match final_solution(extracted) {
        Some(solution) => apply_solution(instance, &solution.moves),
        None => Verdict::malformed(&instance.initial),
    }
}

pub fn score_attempt(instance: &PuzzleInstance, record: &RunRecord, extracted: &[ExtractedSolution]) -> AttemptScore {
    let verdict = final_verdict(instance, extracted);
    let mut thinking: Vec<&ExtractedSolution> = extracted.iter().filter(|s| s.source == Source::Thinking).collect();
    thinking.sort_by_key(|s| s.ordinal);
    let intermediate = thinking
        .into_iter()
        .map(|s| IntermediatePoint {
            ordinal: s.ordinal,
            position: s.normalized_position,
            correct: apply_solution(instance, &s.moves).success,
            move_count: s.moves.len(),
        })
        .collect();
    AttemptScore {
        run_id: record.run_id.clone(),
        instance_id: record.instance_id.clone(),
        sample_idx: record.sample_idx,
        model_id: record.model_id.clone(),
        kind: record.kind,
        size_n: record.size_n,
        variant: record.variant,
        solvable: instance.solvable,
        required_moves: instance.min_moves,
        final_success: verdict.success,
        first_failure_index: verdict.first_failure_index,
        failure_reason: verdict.failure_reason,
        final_move_count: final_solution(extracted).map(|s| s.moves.len()),
        intermediate,
        thinking_tokens: record.usage.thinking_tokens,
        completion_tokens: record.usage.completion_tokens,
    }
}

/// All solutions in a record: thinking first, then the final response. Uses
/// the stored thinking text, or splits inline `<think>` tags when none was
/// stored.
pub fn extract_record(record: &RunRecord, tokenizer: &Tokenizer) -> Result<Vec<ExtractedSolution>> {
    let (thinking, final_text) = match &record.thinking_text {
        Some(t) => (Some(t.clone()), record.response_text.clone()),
        None => split_thinking(&record.response_text),
    };
    let mut out = Vec::new();
    if let Some(t) = thinking.filter(|t| !t.is_empty()) {
        out.extend(extract_with(&t, record.kind, Source::Thinking, tokenizer)?.solutions);
    }
    if !final_text.is_empty() {
        out.extend(extract_with(&final_text, record.kind, Source::Final, tokenizer)?.solutions);
    }
    Ok(out)
}

type InstanceKey = (PuzzleKind, u32, Params);

fn instance_key(record: &RunRecord) -> InstanceKey {
    (record.kind, record.size_n, record.params.clone())
}

/// Rebuilds the instances behind `records`, with the oracle length filled in
/// where the closed form or search bound gives none.
fn instances_for(records: &[RunRecord], execution: Execution) -> Result<HashMap<InstanceKey, PuzzleInstance>> {
    let keys: Vec<InstanceKey> = records.iter().map(instance_key).collect::<BTreeSet<_>>().into_iter().collect();
    let built = par::map(execution, &keys, |(kind, n, params)| {
        let mut instance = make_instance(*kind, *n, params)?;
        if instance.min_moves.is_none() && instance.solvable {
            instance.min_moves = environment_for(*kind).solve(&instance).ok().map(|s| s.len() as u64);
        }
        Ok::<_, Error>(instance)
    });
    keys.into_iter().zip(built).map(|(k, i)| Ok((k, i?))).collect()
}

/// Re-extracts and re-verifies every record. Output order follows input order.
pub fn score_records(records: &[RunRecord], tokenizer: &Tokenizer, execution: Execution) -> Result<Vec<AttemptScore>> {
    let instances = instances_for(records, execution)?;
    par::map(execution, records, |record| {
        let instance = &instances[&instance_key(record)];
        let extracted = extract_record(record, tokenizer)?;
        Ok(score_attempt(instance, record, &extracted))
    })
    .into_iter()
    .collect()
}

fn binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Unbiased pass@k estimate `1 - C(n-c, k) / C(n, k)`.
pub fn pass_at_k(n: u64, c: u64, k: u64) -> Result<f64> {
    if c > n {
        return Err(Error::InvalidArgument(format!("correct count {c} exceeds sample count {n}")));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k must be in 1..={n}, got {k}")));
    }
    if n - c < k {
        return Ok(1.0);
    }
    if let (Some(miss), Some(all)) = (binomial(n - c, k), binomial(n, k)) {
        return Ok((all - miss) as f64 / all as f64);
    }
    let miss: f64 = (n - c + 1..=n).map(|i| 1.0 - k as f64 / i as f64).product();
    Ok(1.0 - miss)
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.into_iter().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn std_dev(values: &[f64]) -> Option<f64> {
    let m = mean(values.iter().copied())?;
    Some((values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt())
}

fn grouped(scores: &[AttemptScore], keep: impl Fn(&AttemptScore) -> bool) -> BTreeMap<GroupKey, Vec<&AttemptScore>> {
    let mut groups: BTreeMap<GroupKey, Vec<&AttemptScore>> = BTreeMap::new();
    for s in scores.iter().filter(|s| keep(s)) {
        groups.entry(s.group()).or_default().push(s);
    }
    groups
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub key: GroupKey,
    pub samples: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub required_moves: Option<u64>,
    pub mean_thinking_tokens: f64,
    pub std_thinking_tokens: f64,
    pub mean_completion_tokens: f64,
}

/// Accuracy and token effort per configuration, over solvable instances only.
pub fn accuracy_table(scores: &[AttemptScore]) -> Vec<AccuracyRow> {
    grouped(scores, |s| s.solvable)
        .into_iter()
        .map(|(key, group)| {
            let thinking: Vec<f64> = group.iter().map(|s| s.thinking_tokens as f64).collect();
            let correct = group.iter().filter(|s| s.final_success).count();
            AccuracyRow {
                samples: group.len(),
                correct,
                accuracy: correct as f64 / group.len() as f64,
                required_moves: group.iter().find_map(|s| s.required_moves),
                mean_thinking_tokens: mean(thinking.iter().copied()).unwrap_or(0.0),
                std_thinking_tokens: std_dev(&thinking).unwrap_or(0.0),
                mean_completion_tokens: mean(group.iter().map(|s| s.completion_tokens as f64)).unwrap_or(0.0),
                key,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnsolvableRow {
    pub key: GroupKey,
    pub samples: usize,
    pub malformed: usize,
    pub rejected: usize,
}

/// Attempts on instances proven unsolvable, kept out of accuracy.
pub fn unsolvable_table(scores: &[AttemptScore]) -> Vec<UnsolvableRow> {
    grouped(scores, |s| !s.solvable)
        .into_iter()
        .map(|(key, group)| {
            let malformed = group.iter().filter(|s| s.failure_reason == Some(FailureReason::Malformed)).count();
            UnsolvableRow {
                samples: group.len(),
                malformed,
                rejected: group.len() - malformed,
                key,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassAtKRow {
    pub key: GroupKey,
    pub k: usize,
    pub pass_at_k: f64,
    pub token_budget: f64,
}

/// pass@k per configuration, averaged over the instances in the group. A `k`
/// is emitted only when every instance has at least `k` samples.
pub fn pass_at_k_table(scores: &[AttemptScore], k_list: &[usize]) -> Result<Vec<PassAtKRow>> {
    let mut rows = Vec::new();
    for (key, group) in grouped(scores, |s| s.solvable) {
        let mut per_instance: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
        for s in &group {
            let e = per_instance.entry(&s.instance_id).or_default();
            e.0 += 1;
            e.1 += u64::from(s.final_success);
        }
        let min_n = per_instance.values().map(|v| v.0).min().unwrap_or(0);
        let mean_tokens = mean(group.iter().map(|s| s.completion_tokens as f64)).unwrap_or(0.0);
        for &k in k_list.iter().collect::<BTreeSet<_>>() {
            if k == 0 || k as u64 > min_n {
                continue;
            }
            let values = per_instance
                .values()
                .map(|&(n, c)| pass_at_k(n, c, k as u64))
                .collect::<Result<Vec<_>>>()?;
            rows.push(PassAtKRow {
                key: key.clone(),
                k,
                pass_at_k: mean(values).unwrap_or(0.0),
                token_budget: k as f64 * mean_tokens,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetRow {
    pub kind: PuzzleKind,
    pub size_n: u32,
    pub variant: PromptVariant,
    pub model_id: String,
    pub budget_tokens: f64,
    pub k: usize,
    pub pass_at_k: f64,
}

/// Compares models at matched completion-token budgets. For each requested
/// `k`, the budget is `k` samples of the cheapest model in the comparison;
/// every other model gets as many whole samples as fit in that budget
/// (at least one), and its pass@k is evaluated at that sample count.
pub fn pass_at_budget_table(scores: &[AttemptScore], k_list: &[usize]) -> Result<Vec<BudgetRow>> {
    let mut by_config: BTreeMap<(PuzzleKind, u32, PromptVariant), BTreeMap<String, (u64, u64, f64)>> = BTreeMap::new();
    for s in scores.iter().filter(|s| s.solvable) {
        let e = by_config
            .entry((s.kind, s.size_n, s.variant))
            .or_default()
            .entry(s.model_id.clone())
            .or_default();
        e.0 += 1;
        e.1 += u64::from(s.final_success);
        e.2 += s.completion_tokens as f64;
    }
    let mut rows = Vec::new();
    for ((kind, size_n, variant), models) in by_config {
        let per_sample: BTreeMap<&String, f64> = models.iter().map(|(m, &(n, _, t))| (m, t / n as f64)).collect();
        let Some(cheapest) = per_sample.values().copied().filter(|t| *t > 0.0).reduce(f64::min) else {
            continue;
        };
        for &k in k_list.iter().collect::<BTreeSet<_>>() {
            if k == 0 {
                continue;
            }
            let budget = k as f64 * cheapest;
            for (model, &(n, c, _)) in &models {
                let cost = per_sample[model];
                if cost <= 0.0 {
                    continue;
                }
                let affordable = ((budget / cost).floor() as u64).clamp(1, n);
                rows.push(BudgetRow {
                    kind,
                    size_n,
                    variant,
                    model_id: model.clone(),
                    budget_tokens: budget,
                    k: affordable as usize,
                    pass_at_k: pass_at_k(n, c, affordable)?,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionBin {
    pub lo: f64,
    pub hi: f64,
    pub correct: usize,
    pub incorrect: usize,
    /// Absent when no solution fell in the bin.
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PositionalAnalysis {
    pub bins: Vec<PositionBin>,
    pub pairs: Vec<(f64, bool)>,
    pub mean_position_correct: Option<f64>,
    pub mean_position_incorrect: Option<f64>,
}

fn bin_index(position: f64, bins: usize) -> usize {
    ((position * bins as f64).floor() as usize).min(bins - 1)
}

pub fn positional_analysis<'a>(scores: impl IntoIterator<Item = &'a AttemptScore>, bins: usize) -> Result<PositionalAnalysis> {
    if bins < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bins, got {bins}")));
    }
    let pairs: Vec<(f64, bool)> = scores
        .into_iter()
        .flat_map(|s| s.intermediate.iter().map(|p| (p.position, p.correct)))
        .collect();
    let mut counts = vec![(0usize, 0usize); bins];
    for &(p, ok) in &pairs {
        let slot = &mut counts[bin_index(p, bins)];
        if ok {
            slot.0 += 1;
        } else {
            slot.1 += 1;
        }
    }
    let bins_out = counts
        .into_iter()
        .enumerate()
        .map(|(i, (correct, incorrect))| PositionBin {
            lo: i as f64 / bins as f64,
            hi: (i + 1) as f64 / bins as f64,
            correct,
            incorrect,
            accuracy: (correct + incorrect > 0).then(|| correct as f64 / (correct + incorrect) as f64),
        })
        .collect();
    Ok(PositionalAnalysis {
        bins: bins_out,
        mean_position_correct: mean(pairs.iter().filter(|p| p.1).map(|p| p.0)),
        mean_position_incorrect: mean(pairs.iter().filter(|p| !p.1).map(|p| p.0)),
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureRow {
    pub key: GroupKey,
    pub failed: usize,
    /// Failed attempts without a failing move (malformed or goal not reached).
    pub unindexed: usize,
    pub mean_index: Option<f64>,
    pub histogram: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PooledFailure {
    pub kind: PuzzleKind,
    pub model_id: String,
    pub variant: PromptVariant,
    pub indexed: usize,
    pub mean_index: Option<f64>,
    pub density: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FailureAnalysis {
    pub by_n: Vec<FailureRow>,
    pub pooled: Vec<PooledFailure>,
}

pub fn failure_analysis(scores: &[AttemptScore]) -> FailureAnalysis {
    let mut out = FailureAnalysis::default();
    let mut pooled: BTreeMap<(PuzzleKind, String, PromptVariant), Vec<usize>> = BTreeMap::new();
    for (key, group) in grouped(scores, |s| s.solvable && !s.final_success) {
        let indices: Vec<usize> = group.iter().filter_map(|s| s.first_failure_index).collect();
        let mut histogram = BTreeMap::new();
        for &i in &indices {
            *histogram.entry(i).or_insert(0) += 1;
        }
        pooled
            .entry((key.kind, key.model_id.clone(), key.variant))
            .or_default()
            .extend(&indices);
        out.by_n.push(FailureRow {
            failed: group.len(),
            unindexed: group.len() - indices.len(),
            mean_index: mean(indices.iter().map(|&i| i as f64)),
            histogram,
            key,
        });
    }
    for ((kind, model_id, variant), indices) in pooled {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &i in &indices {
            *counts.entry(i).or_insert(0) += 1;
        }
        let density = counts.into_iter().map(|(i, c)| (i, c as f64 / indices.len() as f64)).collect();
        out.pooled.push(PooledFailure {
            kind,
            model_id,
            variant,
            indexed: indices.len(),
            mean_index: mean(indices.iter().map(|&i| i as f64)),
            density,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRow {
    pub kind: PuzzleKind,
    pub size_n: u32,
    /// Absent for unsolvable or unsupported sizes.
    pub required_moves: Option<u64>,
    /// False when the length comes from a constructive solver rather than a
    /// closed form or exhaustive search.
    pub exact: bool,
}

pub fn depth_table(kind: PuzzleKind, range: RangeInclusive<u32>) -> Vec<DepthRow> {
    depth_table_with(kind, range, Execution::default())
}

pub fn depth_table_with(kind: PuzzleKind, range: RangeInclusive<u32>, execution: Execution) -> Vec<DepthRow> {
    let sizes: Vec<u32> = range.collect();
    par::map(execution, &sizes, |&n| {
        let env = environment_for(kind);
        let params = Params::new();
        if let Some(m) = env.min_moves(n, &params) {
            return DepthRow { kind, size_n: n, required_moves: Some(m), exact: true };
        }
        let constructive = make_instance(kind, n, &params)
            .ok()
            .filter(|i| i.solvable)
            .and_then(|i| env.solve(&i).ok())
            .map(|s| s.len() as u64);
        DepthRow { kind, size_n: n, required_moves: constructive, exact: false }
    })
}
