//! Executes a manifest against a provider: computes the pending
//! `(instance, sample)` pairs, issues requests on up to `parallelism` worker
//! threads, and hands every completion to a single writer that extracts,
//! scores and appends the record.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{SystemTime, UNIX_EPOCH};

use puzzlebench_core::env::make_instance;
use puzzlebench_core::eval::{extract_record, final_verdict};
use puzzlebench_core::model::{PromptVariant, PuzzleInstance, RunRecord, Verdict};
use puzzlebench_core::prompt::{PromptPair, TemplateSet};
use puzzlebench_core::store::{append_failure, ExperimentManifest, FailedRequest, RecordLog};
use puzzlebench_core::tokenizer::Tokenizer;

use crate::{Completion, Provider, Result};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub store_dir: PathBuf,
    pub templates: TemplateSet,
    pub tokenizer: Tokenizer,
}

impl RunOptions {
    pub fn new(store_dir: impl Into<PathBuf>) -> Self {
        Self {
            store_dir: store_dir.into(),
            templates: TemplateSet::builtin(),
            tokenizer: Tokenizer::character(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunSummary {
    /// Pairs already in the log before this invocation.
    pub completed_before: usize,
    pub requests: usize,
    pub appended: usize,
    pub failed: usize,
}

struct WorkItem {
    instance: usize,
    sample_idx: u32,
}

struct Prepared {
    instance: PuzzleInstance,
    variant: PromptVariant,
    prompt: PromptPair,
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

/// Builds the persisted record for one completion.
#[allow(clippy::too_many_arguments)]
pub fn make_record(
    run_id: &str,
    model_id: &str,
    prepared_instance: &PuzzleInstance,
    variant: PromptVariant,
    prompt: &PromptPair,
    sample_idx: u32,
    completion: Completion,
    tokenizer: &Tokenizer,
    started_at_ms: u64,
    finished_at_ms: u64,
) -> puzzlebench_core::Result<RunRecord> {
    let mut record = RunRecord {
        run_id: run_id.to_string(),
        instance_id: prepared_instance.instance_id.clone(),
        sample_idx,
        model_id: model_id.to_string(),
        kind: prepared_instance.kind,
        size_n: prepared_instance.size_n,
        params: prepared_instance.params.clone(),
        variant,
        prompt_hash: prompt.prompt_hash.clone(),
        response_text: completion.final_text,
        thinking_text: completion.thinking_text,
        usage: completion.usage,
        extracted: Vec::new(),
        final_verdict: Verdict::malformed(&prepared_instance.initial),
        started_at_ms,
        finished_at_ms,
    };
    let extracted = extract_record(&record, tokenizer)?;
    record.extracted = extracted.iter().map(|s| s.label()).collect();
    record.final_verdict = final_verdict(prepared_instance, &extracted);
    Ok(record)
}

pub fn execute(manifest: &ExperimentManifest, provider: &dyn Provider, options: &RunOptions) -> Result<RunSummary> {
    manifest.validate()?;
    let mut log = RecordLog::open(&options.store_dir, &manifest.run_id)?;
    let pending = log.resume_set(manifest)?;
    let planned = manifest.instances()?;
    let total = planned.len() * manifest.samples() as usize;

    let pending_ids: HashSet<&String> = pending.iter().map(|(id, _)| id).collect();
    let mut prepared = Vec::new();
    let mut by_id = HashMap::new();
    for p in planned {
        if !pending_ids.contains(&p.instance_id) {
            continue;
        }
        let instance = make_instance(p.kind, p.size_n, &p.params)?;
        let prompt = options.templates.render(&instance, p.variant)?;
        by_id.insert(instance.instance_id.clone(), prepared.len());
        prepared.push(Prepared {
            instance,
            variant: p.variant,
            prompt,
        });
    }
    let work: Vec<WorkItem> = pending
        .iter()
        .map(|(id, sample_idx)| WorkItem {
            instance: by_id[id],
            sample_idx: *sample_idx,
        })
        .collect();

    let mut summary = RunSummary {
        completed_before: total - work.len(),
        requests: work.len(),
        ..RunSummary::default()
    };
    if work.is_empty() {
        return Ok(summary);
    }

    let next = AtomicUsize::new(0);
    let workers = provider.config().parallelism.clamp(1, work.len());
    let model_id = provider.config().model_id.clone();
    std::thread::scope(|scope| -> Result<()> {
        let (tx, rx) = mpsc::channel();
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, work, prepared) = (&next, &work, &prepared);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = work.get(i) else { break };
                let p = &prepared[item.instance];
                let started = now_ms();
                let outcome = provider.complete(&p.instance, &p.prompt, item.sample_idx);
                if tx.send((i, outcome, started, now_ms())).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut first_error = None;
        for (i, outcome, started, finished) in rx {
            let item = &work[i];
            let p = &prepared[item.instance];
            match outcome {
                Ok(completion) => {
                    let record = make_record(
                        &manifest.run_id,
                        &model_id,
                        &p.instance,
                        p.variant,
                        &p.prompt,
                        item.sample_idx,
                        completion,
                        &options.tokenizer,
                        started,
                        finished,
                    );
                    match record.and_then(|r| log.append(&r)) {
                        Ok(()) => summary.appended += 1,
                        Err(e) => {
                            // Keep draining so workers finish, then report.
                            first_error.get_or_insert(e);
                            next.store(usize::MAX / 2, Ordering::Relaxed);
                        }
                    }
                }
                Err(e) => {
                    summary.failed += 1;
                    let attempts = match &e {
                        crate::GatewayError::Transport { attempts, .. } => *attempts,
                        _ => 1,
                    };
                    let failure = FailedRequest {
                        run_id: manifest.run_id.clone(),
                        instance_id: p.instance.instance_id.clone(),
                        sample_idx: item.sample_idx,
                        attempts,
                        error: e.to_string(),
                        at_ms: finished,
                    };
                    if let Err(e) = append_failure(&options.store_dir, &failure) {
                        first_error.get_or_insert(e);
                    }
                }
            }
        }
        match first_error {
            Some(e) => Err(e.into()),
            None => Ok(()),
        }
    })?;
    Ok(summary)
}
