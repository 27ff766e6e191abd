use puzzlebench_core::env::make_instance;
use puzzlebench_core::model::{Params, PromptVariant, PuzzleKind};
use puzzlebench_core::prompt::render;
use puzzlebench_core::store::{read_failures, ExperimentManifest, RecordLog, SweepEntry};
use puzzlebench_gateway::replay::Transcript;
use puzzlebench_gateway::run::{execute, RunOptions};
use puzzlebench_gateway::{build_provider, ProviderConfig, ProviderKind};

#[test]
fn replayed_transcripts_are_scored_like_live_ones() {
    let dir = tempfile::tempdir().unwrap();
    let inst = make_instance(PuzzleKind::Hanoi, 2, &Params::new()).unwrap();
    let hash = render(&inst, PromptVariant::Standard).unwrap().prompt_hash;
    let transcripts = [
        Transcript {
            prompt_hash: hash.clone(),
            final_text: "<think>first guess moves = [[2, 0, 2]]</think>moves = [[1, 0, 1], [2, 0, 2], [1, 1, 2]]".into(),
            thinking_text: None,
            usage: None,
        },
        Transcript {
            prompt_hash: hash,
            final_text: "moves = [[1, 0, 2], [2, 0, 2]]".into(),
            thinking_text: Some("no listing here".into()),
            usage: None,
        },
    ];
    let fixture = dir.path().join("transcripts.jsonl");
    let lines: Vec<String> = transcripts.iter().map(|t| serde_json::to_string(t).unwrap()).collect();
    std::fs::write(&fixture, lines.join("\n") + "\n").unwrap();

    let mut cfg = ProviderConfig::synthetic(ProviderKind::Replay, "replayed");
    cfg.replay_path = Some(fixture);
    let manifest = ExperimentManifest {
        run_id: "replay".into(),
        sweep: vec![SweepEntry {
            puzzle: PuzzleKind::Hanoi,
            n: "2".parse().unwrap(),
            params: Params::new(),
            variant: PromptVariant::Standard,
        }],
        provider: cfg.clone(),
        samples_per_instance: Some(3),
        seed: 0,
    };
    let provider = build_provider(&cfg).unwrap();
    let summary = execute(&manifest, provider.as_ref(), &RunOptions::new(dir.path())).unwrap();
    assert_eq!((summary.appended, summary.failed), (2, 1));

    let mut records = RecordLog::open(dir.path(), "replay").unwrap().records().unwrap();
    records.sort_by_key(|r| r.sample_idx);
    assert!(records[0].final_verdict.success);
    assert_eq!(records[0].thinking_text.as_deref(), Some("first guess moves = [[2, 0, 2]]"));
    assert_eq!(records[0].extracted, vec!["thinking#0".to_string(), "final#0".to_string()]);
    assert!(records[0].usage.thinking_tokens > 0);
    assert_eq!(records[1].final_verdict.first_failure_index, Some(1));
    assert_eq!(records[1].extracted, vec!["final#0".to_string()]);

    let failures = read_failures(dir.path(), "replay").unwrap();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].sample_idx, 2);
}
