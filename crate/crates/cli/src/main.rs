use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use puzzlebench_core::config::ProviderConfig;
use puzzlebench_core::env::{make_instance, solve};
use puzzlebench_core::eval::{score_records, DEFAULT_BINS, DEFAULT_K_LIST};
use puzzlebench_core::model::{format_moves, Params, PuzzleKind};
use puzzlebench_core::par::Execution;
use puzzlebench_core::report::{build_report, ReportOptions};
use puzzlebench_core::store::{log_path, read_log, ExperimentManifest, SizeRange};
use puzzlebench_core::tokenizer::Tokenizer;
use puzzlebench_gateway::run::{execute, RunOptions};
use puzzlebench_gateway::{build_provider, GatewayError};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNSOLVABLE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "puzzlebench", version, about = "Puzzle environments and evaluation harness for reasoning models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one instance JSON file per size.
    Gen {
        #[command(flatten)]
        puzzle: PuzzleArgs,
        /// Output directory.
        #[arg(long, default_value = "instances")]
        out: PathBuf,
    },
    /// Print the oracle solution in prompt notation.
    Oracle {
        #[command(flatten)]
        puzzle: PuzzleArgs,
    },
    /// Execute a run manifest and append records to its log.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        /// Provider config JSON replacing the manifest's provider.
        #[arg(long)]
        provider: Option<PathBuf>,
        /// Continue an existing log, requesting only missing samples.
        #[arg(long)]
        resume: bool,
        /// Directory holding run logs.
        #[arg(long, default_value = "runs")]
        store: PathBuf,
    },
    /// Score run logs and write the CSV and SVG report bundle.
    Report {
        /// Log files, or directories whose `*.jsonl` logs are all read.
        #[arg(long, required = true, num_args = 1..)]
        runs: Vec<PathBuf>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Comma-separated pass@k values.
        #[arg(long, value_delimiter = ',')]
        k_list: Option<Vec<usize>>,
        /// BPE vocabulary in tiktoken format; positions are byte-based without it.
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// Score on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct PuzzleArgs {
    #[arg(long)]
    puzzle: PuzzleKind,
    /// Size, or inclusive range `a..b`.
    #[arg(long)]
    n: SizeRange,
    /// River boat capacity.
    #[arg(long)]
    k: Option<u32>,
    /// Blocks stack count.
    #[arg(long)]
    stacks: Option<u32>,
    /// Extra parameter as `key=value`.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, u32)>,
}

impl PuzzleArgs {
    fn params(&self) -> Params {
        let mut params: Params = self.params.iter().cloned().collect();
        if let Some(k) = self.k {
            params.insert("k".into(), k);
        }
        if let Some(s) = self.stacks {
            params.insert("stacks".into(), s);
        }
        params
    }
}

fn parse_param(s: &str) -> Result<(String, u32), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v = v.trim().parse().map_err(|_| format!("`{v}` is not a non-negative integer"))?;
    Ok((k.trim().to_string(), v))
}

/// Bad input from the command line, reported with the usage exit code.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    Usage(message.into()).into()
}

fn cmd_gen(puzzle: &PuzzleArgs, out: &Path) -> anyhow::Result<u8> {
    let params = puzzle.params();
    let mut instances = Vec::new();
    for n in puzzle.n.iter() {
        instances.push(make_instance(puzzle.puzzle, n, &params).map_err(|e| usage(e.to_string()))?);
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for inst in instances {
        let path = out.join(format!("{}_n{}.json", inst.kind, inst.size_n));
        let text = serde_json::to_string_pretty(&inst)? + "\n";
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        let moves = inst.min_moves.map_or("unknown".to_string(), |m| m.to_string());
        println!(
            "{}  id={}  solvable={}  min_moves={moves}",
            path.display(),
            inst.instance_id,
            inst.solvable
        );
    }
    Ok(0)
}

fn cmd_oracle(puzzle: &PuzzleArgs) -> anyhow::Result<u8> {
    if puzzle.n.start != puzzle.n.end {
        return Err(usage("oracle takes a single size"));
    }
    let inst = make_instance(puzzle.puzzle, puzzle.n.start, &puzzle.params()).map_err(|e| usage(e.to_string()))?;
    if !inst.solvable {
        println!("UNSOLVABLE");
        return Ok(EXIT_UNSOLVABLE);
    }
    match solve(&inst) {
        Ok(moves) => {
            println!("{}", format_moves(&moves));
            Ok(0)
        }
        Err(puzzlebench_core::Error::Unsolvable) => {
            println!("UNSOLVABLE");
            Ok(EXIT_UNSOLVABLE)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_run(manifest_path: &Path, provider: Option<&Path>, resume: bool, store: &Path) -> anyhow::Result<u8> {
    let mut manifest = ExperimentManifest::load(manifest_path).map_err(|e| match e {
        puzzlebench_core::Error::Io(io) => anyhow::Error::new(io).context(format!("reading {}", manifest_path.display())),
        other => usage(format!("{}: {other}", manifest_path.display())),
    })?;
    if let Some(path) = provider {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        manifest.provider =
            serde_json::from_str::<ProviderConfig>(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        manifest.validate().map_err(|e| usage(e.to_string()))?;
    }
    let existing = log_path(store, &manifest.run_id);
    if !resume && existing.exists() && std::fs::metadata(&existing)?.len() > 0 {
        return Err(usage(format!(
            "{} already holds records; pass --resume to continue it",
            existing.display()
        )));
    }
    let provider = build_provider(&manifest.provider).map_err(|e| match e {
        GatewayError::Config(_) | GatewayError::Core(_) => usage(e.to_string()),
        other => other.into(),
    })?;
    let summary = execute(&manifest, provider.as_ref(), &RunOptions::new(store))?;
    println!(
        "run {}: {} already complete, {} requested, {} appended, {} failed",
        manifest.run_id, summary.completed_before, summary.requests, summary.appended, summary.failed
    );
    println!("log: {}", existing.display());
    Ok(0)
}

fn collect_logs(inputs: &[PathBuf]) -> anyhow::Result<Vec<PathBuf>> {
    let mut logs = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(input)
                .with_context(|| format!("reading {}", input.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()?;
            found.retain(|p| {
                let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default();
                name.ends_with(".jsonl") && !name.ends_with(".errors.jsonl")
            });
            found.sort();
            logs.extend(found);
        } else {
            logs.push(input.clone());
        }
    }
    Ok(logs)
}

fn cmd_report(
    runs: &[PathBuf],
    out: &Path,
    bins: usize,
    k_list: Option<Vec<usize>>,
    vocab: Option<&Path>,
    sequential: bool,
) -> anyhow::Result<u8> {
    if bins < 2 {
        return Err(usage("--bins must be at least 2"));
    }
    let tokenizer = match vocab {
        Some(path) => Tokenizer::from_tiktoken_file(path)?,
        None => Tokenizer::character(),
    };
    let mut records = Vec::new();
    for log in collect_logs(runs)? {
        records.extend(read_log(&log).with_context(|| format!("reading {}", log.display()))?);
    }
    records.sort_by_key(|a| a.key());
    let execution = if sequential { Execution::Sequential } else { Execution::Parallel };
    let scores = score_records(&records, &tokenizer, execution)?;
    let options = ReportOptions {
        bins,
        k_list: k_list.unwrap_or_else(|| DEFAULT_K_LIST.to_vec()),
        execution,
    };
    let written = build_report(&scores, &options)?.write(out)?;
    println!(
        "scored {} records ({} positions); wrote {} files to {}",
        records.len(),
        tokenizer.mode(),
        written.len(),
        out.display()
    );
    Ok(0)
}

fn core_code(err: &puzzlebench_core::Error) -> u8 {
    match err {
        puzzlebench_core::Error::Io(_) | puzzlebench_core::Error::CorruptLog { .. } => EXIT_IO,
        puzzlebench_core::Error::Unsolvable => EXIT_UNSOLVABLE,
        _ => EXIT_FAILURE,
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return EXIT_USAGE;
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
        if let Some(core) = cause.downcast_ref::<puzzlebench_core::Error>() {
            return core_code(core);
        }
        if let Some(GatewayError::Core(core)) = cause.downcast_ref::<GatewayError>() {
            return core_code(core);
        }
    }
    EXIT_FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Gen { puzzle, out } => cmd_gen(puzzle, out),
        Command::Oracle { puzzle } => cmd_oracle(puzzle),
        Command::Run { manifest, provider, resume, store } => cmd_run(manifest, provider.as_deref(), *resume, store),
        Command::Report { runs, out, bins, k_list, vocab, sequential } => {
            cmd_report(runs, out, *bins, k_list.clone(), vocab.as_deref(), *sequential)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
