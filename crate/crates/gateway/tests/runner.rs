use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use puzzlebench_core::eval::{accuracy_table, score_records};
use puzzlebench_core::model::{Params, PromptVariant, PuzzleInstance, PuzzleKind};
use puzzlebench_core::par::Execution;
use puzzlebench_core::prompt::PromptPair;
use puzzlebench_core::store::{read_failures, ExperimentManifest, RecordLog, SweepEntry};
use puzzlebench_core::tokenizer::Tokenizer;
use puzzlebench_gateway::run::{execute, RunOptions};
use puzzlebench_gateway::synthetic::Synthetic;
use puzzlebench_gateway::{build_provider, Completion, GatewayError, Provider, ProviderConfig, ProviderKind};

fn manifest(run_id: &str, provider: ProviderConfig, sweep: &[(PuzzleKind, &str)], samples: u32) -> ExperimentManifest {
    ExperimentManifest {
        run_id: run_id.into(),
        sweep: sweep
            .iter()
            .map(|(kind, n)| SweepEntry {
                puzzle: *kind,
                n: n.parse().unwrap(),
                params: Params::new(),
                variant: PromptVariant::Standard,
            })
            .collect(),
        provider,
        samples_per_instance: Some(samples),
        seed: 0,
    }
}

#[test]
fn oracle_run_is_fully_correct_and_resumes_to_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ProviderConfig::synthetic(ProviderKind::OracleSynthetic, "oracle");
    let m = manifest("oracle-run", cfg.clone(), &[(PuzzleKind::Hanoi, "1..4"), (PuzzleKind::River, "2..3")], 3);
    let provider = build_provider(&cfg).unwrap();
    let summary = execute(&m, provider.as_ref(), &RunOptions::new(dir.path())).unwrap();
    assert_eq!((summary.requests, summary.appended, summary.failed), (18, 18, 0));

    let log = RecordLog::open(dir.path(), "oracle-run").unwrap();
    let records = log.records().unwrap();
    assert!(records.iter().all(|r| r.final_verdict.success));
    assert!(records.iter().all(|r| r.extracted.contains(&"final#0".to_string())));
    let scores = score_records(&records, &Tokenizer::character(), Execution::Sequential).unwrap();
    assert!(accuracy_table(&scores).iter().all(|row| row.accuracy == 1.0));

    let again = execute(&m, provider.as_ref(), &RunOptions::new(dir.path())).unwrap();
    assert_eq!((again.requests, again.completed_before), (0, 18));
}

#[test]
fn corrupting_run_fails_at_the_configured_move() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ProviderConfig::synthetic(ProviderKind::CorruptingSynthetic, "faulty");
    cfg.corrupt_index = Some(4);
    let m = manifest("faulty-run", cfg.clone(), &[(PuzzleKind::Hanoi, "3"), (PuzzleKind::Blocks, "2..3")], 2);
    let summary = execute(&m, &Synthetic::new(cfg), &RunOptions::new(dir.path())).unwrap();
    assert_eq!(summary.appended, 6);
    let records = RecordLog::open(dir.path(), "faulty-run").unwrap().records().unwrap();
    for r in records {
        assert!(!r.final_verdict.success);
        assert_eq!(r.final_verdict.first_failure_index, Some(4), "{} N={}", r.kind, r.size_n);
    }
}

/// Fails each (instance, sample) on its first request only.
struct Flaky {
    config: ProviderConfig,
    inner: Synthetic,
    seen: Mutex<HashMap<(String, u32), usize>>,
    calls: AtomicUsize,
}

impl Provider for Flaky {
    fn config(&self) -> &ProviderConfig {
        &self.config
    }

    fn complete(&self, instance: &PuzzleInstance, prompt: &PromptPair, sample_idx: u32) -> Result<Completion, GatewayError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let mut seen = self.seen.lock().unwrap();
        let count = seen.entry((instance.instance_id.clone(), sample_idx)).or_default();
        *count += 1;
        if *count == 1 && sample_idx.is_multiple_of(2) {
            return Err(GatewayError::Transport { attempts: 5, message: "connection reset".into() });
        }
        drop(seen);
        self.inner.complete(instance, prompt, sample_idx)
    }
}

#[test]
fn transport_failures_are_recorded_and_retried_on_resume() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ProviderConfig::synthetic(ProviderKind::OracleSynthetic, "oracle");
    cfg.parallelism = 3;
    let m = manifest("flaky-run", cfg.clone(), &[(PuzzleKind::Checkers, "1..2")], 4);
    let flaky = Flaky {
        config: cfg.clone(),
        inner: Synthetic::new(cfg),
        seen: Mutex::default(),
        calls: AtomicUsize::new(0),
    };
    let first = execute(&m, &flaky, &RunOptions::new(dir.path())).unwrap();
    assert_eq!((first.requests, first.appended, first.failed), (8, 4, 4));
    let failures = read_failures(dir.path(), "flaky-run").unwrap();
    assert_eq!(failures.len(), 4);
    assert!(failures.iter().all(|f| f.sample_idx % 2 == 0 && f.attempts == 5));

    let log = RecordLog::open(dir.path(), "flaky-run").unwrap();
    assert_eq!(log.resume_set(&m).unwrap().len(), 4);
    drop(log);

    let second = execute(&m, &flaky, &RunOptions::new(dir.path())).unwrap();
    assert_eq!((second.completed_before, second.requests, second.appended), (4, 4, 4));
    assert_eq!(flaky.calls.load(Ordering::SeqCst), 12);
    let third = execute(&m, &flaky, &RunOptions::new(dir.path())).unwrap();
    assert_eq!(third.requests, 0);
}

#[test]
fn unsolvable_instances_get_an_answer_without_moves() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ProviderConfig::synthetic(ProviderKind::OracleSynthetic, "oracle");
    let mut m = manifest("river-unsolvable", cfg.clone(), &[(PuzzleKind::River, "6")], 1);
    m.sweep[0].params.insert("k".into(), 3);
    execute(&m, &Synthetic::new(cfg), &RunOptions::new(dir.path())).unwrap();
    let records = RecordLog::open(dir.path(), "river-unsolvable").unwrap().records().unwrap();
    assert_eq!(records.len(), 1);
    let scores = score_records(&records, &Tokenizer::character(), Execution::Sequential).unwrap();
    assert!(!scores[0].solvable);
    assert!(accuracy_table(&scores).is_empty());
}
