//! Run manifests and append-only record logs.
//!
//! Each run owns `<dir>/<run_id>.jsonl`, one [`RunRecord`] per line. Requests
//! that failed after all retries go to `<dir>/<run_id>.errors.jsonl`, which is
//! informational only: those samples stay pending and are retried on resume.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::ProviderConfig;
use crate::env::environment_for;
use crate::error::{Error, Result};
use crate::model::{instance_id, Params, PromptVariant, PuzzleKind, RunRecord};

/// Inclusive size range, written `a..b` or a single `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeRange {
    pub start: u32,
    pub end: u32,
}

impl SizeRange {
    pub fn iter(self) -> std::ops::RangeInclusive<u32> {
        self.start..=self.end
    }
}

impl FromStr for SizeRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("invalid size range `{s}`, expected `a..b` or `a`"));
        let (a, b) = match s.split_once("..") {
            Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
            None => (s.trim(), s.trim()),
        };
        let start: u32 = a.parse().map_err(|_| bad())?;
        let end: u32 = b.parse().map_err(|_| bad())?;
        if start == 0 || start > end {
            return Err(bad());
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for SizeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}..{}", self.start, self.end)
        }
    }
}

impl Serialize for SizeRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SizeRange {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Single(u32),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Raw::Single(n) => format!("{n}").parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub puzzle: PuzzleKind,
    pub n: SizeRange,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub variant: PromptVariant,
}

/// One instance demanded by a manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedInstance {
    pub kind: PuzzleKind,
    pub size_n: u32,
    pub params: Params,
    pub variant: PromptVariant,
    pub instance_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub run_id: String,
    pub sweep: Vec<SweepEntry>,
    pub provider: ProviderConfig,
    /// Overrides the provider's sample count when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_instance: Option<u32>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let manifest: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn samples(&self) -> u32 {
        self.samples_per_instance.unwrap_or(self.provider.samples_per_instance)
    }

    pub fn validate(&self) -> Result<()> {
        if self.run_id.is_empty() || !self.run_id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(Error::InvalidArgument(format!(
                "run_id `{}` must be non-empty and use only letters, digits, `-`, `_` or `.`",
                self.run_id
            )));
        }
        if self.sweep.is_empty() {
            return Err(Error::InvalidArgument("manifest sweep is empty".into()));
        }
        if self.samples() == 0 {
            return Err(Error::InvalidArgument("samples_per_instance must be positive".into()));
        }
        self.provider.validate()?;
        self.instances().map(|_| ())
    }

    /// Every instance of the sweep, with parameters resolved to their
    /// defaults. An instance may appear only once per manifest, since record
    /// keys do not carry the prompt variant.
    pub fn instances(&self) -> Result<Vec<PlannedInstance>> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for entry in &self.sweep {
            for n in entry.n.iter() {
                let params = environment_for(entry.puzzle).resolve_params(n, &entry.params)?;
                let id = instance_id(entry.puzzle, n, &params)?;
                if !seen.insert(id.clone()) {
                    return Err(Error::InvalidArgument(format!(
                        "{} N={n} appears twice in the sweep; use one run per prompt variant",
                        entry.puzzle
                    )));
                }
                out.push(PlannedInstance {
                    kind: entry.puzzle,
                    size_n: n,
                    params,
                    variant: entry.variant,
                    instance_id: id,
                });
            }
        }
        Ok(out)
    }
}

pub fn log_path(dir: &Path, run_id: &str) -> PathBuf {
    dir.join(format!("{run_id}.jsonl"))
}

pub fn error_log_path(dir: &Path, run_id: &str) -> PathBuf {
    dir.join(format!("{run_id}.errors.jsonl"))
}

/// Parses log text. A malformed final line (an interrupted write) is
/// reported through the returned byte length of the valid prefix; a malformed
/// line anywhere else is corruption.
fn parse_log(path: &Path, text: &str) -> Result<(Vec<RunRecord>, usize)> {
    let mut records = Vec::new();
    let mut valid = 0;
    let mut offset = 0;
    let lines: Vec<&str> = text.split_inclusive('\n').collect();
    for (i, line) in lines.iter().enumerate() {
        offset += line.len();
        let last = i + 1 == lines.len();
        let body = line.trim_end_matches('\n');
        if body.trim().is_empty() {
            if !last || line.ends_with('\n') {
                valid = offset;
            }
            continue;
        }
        match serde_json::from_str::<RunRecord>(body) {
            Ok(r) if line.ends_with('\n') => {
                records.push(r);
                valid = offset;
            }
            Ok(_) | Err(_) if last => break,
            Ok(_) => unreachable!("only the last line can lack a newline"),
            Err(e) => {
                return Err(Error::CorruptLog {
                    path: path.display().to_string(),
                    line: i + 1,
                    reason: e.to_string(),
                })
            }
        }
    }
    Ok((records, valid))
}

/// Reads a log without modifying it, ignoring an interrupted final line.
pub fn read_log(path: &Path) -> Result<Vec<RunRecord>> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    Ok(parse_log(path, &text)?.0)
}

/// Single appender over one run's log.
pub struct RecordLog {
    path: PathBuf,
    run_id: String,
    file: File,
    keys: HashSet<(String, u32)>,
    len: usize,
}

impl fmt::Debug for RecordLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RecordLog")
            .field("path", &self.path)
            .field("run_id", &self.run_id)
            .field("records", &self.len)
            .finish()
    }
}

impl RecordLog {
    /// Opens or creates `<dir>/<run_id>.jsonl`, cutting off a partially
    /// written final line.
    pub fn open(dir: &Path, run_id: &str) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let path = log_path(dir, run_id);
        let file = OpenOptions::new().read(true).append(true).create(true).open(&path)?;
        let mut text = String::new();
        (&file).read_to_string(&mut text)?;
        let (records, valid) = parse_log(&path, &text)?;
        if valid < text.len() {
            file.set_len(valid as u64)?;
            file.sync_all()?;
        }
        let mut keys = HashSet::new();
        for r in &records {
            if r.run_id != run_id {
                return Err(Error::RunIdMismatch {
                    manifest: run_id.to_string(),
                    log: r.run_id.clone(),
                });
            }
            if !keys.insert((r.instance_id.clone(), r.sample_idx)) {
                return Err(Error::DuplicateKey {
                    run_id: r.run_id.clone(),
                    instance_id: r.instance_id.clone(),
                    sample_idx: r.sample_idx,
                });
            }
        }
        Ok(Self {
            path,
            run_id: run_id.to_string(),
            file,
            len: records.len(),
            keys,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn run_id(&self) -> &str {
        &self.run_id
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, instance_id: &str, sample_idx: u32) -> bool {
        self.keys.contains(&(instance_id.to_string(), sample_idx))
    }

    /// Appends one record and syncs it to disk.
    pub fn append(&mut self, record: &RunRecord) -> Result<()> {
        if record.run_id != self.run_id {
            return Err(Error::RunIdMismatch {
                manifest: self.run_id.clone(),
                log: record.run_id.clone(),
            });
        }
        let key = (record.instance_id.clone(), record.sample_idx);
        if self.keys.contains(&key) {
            return Err(Error::DuplicateKey {
                run_id: record.run_id.clone(),
                instance_id: record.instance_id.clone(),
                sample_idx: record.sample_idx,
            });
        }
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.sync_data()?;
        self.keys.insert(key);
        self.len += 1;
        Ok(())
    }

    pub fn records(&self) -> Result<Vec<RunRecord>> {
        read_log(&self.path)
    }

    /// `(instance_id, sample_idx)` pairs the manifest demands that are not
    /// yet in the log.
    pub fn resume_set(&self, manifest: &ExperimentManifest) -> Result<BTreeSet<(String, u32)>> {
        if manifest.run_id != self.run_id {
            return Err(Error::RunIdMismatch {
                manifest: manifest.run_id.clone(),
                log: self.run_id.clone(),
            });
        }
        let mut pending = BTreeSet::new();
        for planned in manifest.instances()? {
            for sample in 0..manifest.samples() {
                if !self.contains(&planned.instance_id, sample) {
                    pending.insert((planned.instance_id.clone(), sample));
                }
            }
        }
        Ok(pending)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedRequest {
    pub run_id: String,
    pub instance_id: String,
    pub sample_idx: u32,
    pub attempts: u32,
    pub error: String,
    pub at_ms: u64,
}

pub fn append_failure(dir: &Path, failure: &FailedRequest) -> Result<()> {
    let mut file = OpenOptions::new().append(true).create(true).open(error_log_path(dir, &failure.run_id))?;
    let mut line = serde_json::to_string(failure)?;
    line.push('\n');
    file.write_all(line.as_bytes())?;
    Ok(())
}

pub fn read_failures(dir: &Path, run_id: &str) -> Result<Vec<FailedRequest>> {
    let path = error_log_path(dir, run_id);
    if !path.exists() {
        return Ok(Vec::new());
    }
    BufReader::new(File::open(path)?)
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}
