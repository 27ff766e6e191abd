//! Report bundle: one CSV per metric plus SVG charts, all derived from a list
//! of attempt scores. Output is a pure function of the scores and options.

pub mod svg;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::{
    accuracy_table, depth_table_with, failure_analysis, pass_at_budget_table, pass_at_k_table, positional_analysis,
    AttemptScore, GroupKey, DEFAULT_BINS, DEFAULT_K_LIST,
};
use crate::model::PuzzleKind;
use crate::par::Execution;

use svg::{Chart, Panel, Series};

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub bins: usize,
    pub k_list: Vec<usize>,
    pub execution: Execution,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            k_list: DEFAULT_K_LIST.to_vec(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &'static [&'static str]) -> Self {
        Self { name, header, rows: Vec::new() }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv encoding: {e}"));
        w.write_record(self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv encoding: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReportBundle {
    pub tables: Vec<Table>,
    /// `(file name, svg text)`.
    pub charts: Vec<(String, String)>,
}

impl ReportBundle {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes `<name>.csv` for every table and every chart into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for table in &self.tables {
            let path = dir.join(format!("{}.csv", table.name));
            std::fs::write(&path, table.to_csv()?)?;
            written.push(path);
        }
        for (name, text) in &self.charts {
            let path = dir.join(name);
            std::fs::write(&path, text)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn key_cells(key: &GroupKey) -> Vec<String> {
    vec![
        key.kind.to_string(),
        key.size_n.to_string(),
        key.model_id.clone(),
        key.variant.as_str().to_string(),
    ]
}

fn series_name(model: &str, variant: &str) -> String {
    if variant == "standard" {
        model.to_string()
    } else {
        format!("{model} ({variant})")
    }
}

/// Panels keyed by puzzle, series keyed by name, in sorted order.
fn panels(data: BTreeMap<PuzzleKind, BTreeMap<String, Vec<(f64, f64)>>>) -> Vec<Panel> {
    data.into_iter()
        .map(|(kind, series)| Panel {
            title: kind.to_string(),
            series: series.into_iter().map(|(name, points)| Series { name, points }).collect(),
        })
        .collect()
}

fn chart(title: &str, x: &str, y: &str, panels: Vec<Panel>) -> Chart {
    Chart {
        title: title.into(),
        x_label: x.into(),
        y_label: y.into(),
        panels,
        ..Chart::default()
    }
}

pub fn build_report(scores: &[AttemptScore], options: &ReportOptions) -> Result<ReportBundle> {
    if options.bins < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bins, got {}", options.bins)));
    }
    let mut bundle = ReportBundle::default();
    let mut charts = Vec::new();

    let accuracy = accuracy_table(scores);
    let mut t = Table::new(
        "accuracy",
        &[
            "puzzle",
            "n",
            "model",
            "variant",
            "samples",
            "correct",
            "accuracy",
            "required_moves",
            "mean_thinking_tokens",
            "std_thinking_tokens",
            "mean_completion_tokens",
        ],
    );
    let mut acc_points: BTreeMap<PuzzleKind, BTreeMap<String, Vec<(f64, f64)>>> = BTreeMap::new();
    let mut tok_points = acc_points.clone();
    let mut depth_points = acc_points.clone();
    let mut avd = Table::new("accuracy_vs_depth", &["puzzle", "model", "variant", "n", "required_moves", "accuracy"]);
    for row in &accuracy {
        let mut cells = key_cells(&row.key);
        cells.extend([
            row.samples.to_string(),
            row.correct.to_string(),
            f6(row.accuracy),
            opt(row.required_moves),
            f6(row.mean_thinking_tokens),
            f6(row.std_thinking_tokens),
            f6(row.mean_completion_tokens),
        ]);
        t.rows.push(cells);
        let name = series_name(&row.key.model_id, row.key.variant.as_str());
        let n = f64::from(row.key.size_n);
        acc_points.entry(row.key.kind).or_default().entry(name.clone()).or_default().push((n, row.accuracy));
        tok_points
            .entry(row.key.kind)
            .or_default()
            .entry(name.clone())
            .or_default()
            .push((n, row.mean_thinking_tokens));
        if let Some(d) = row.required_moves {
            avd.rows.push(vec![
                row.key.kind.to_string(),
                row.key.model_id.clone(),
                row.key.variant.as_str().to_string(),
                row.key.size_n.to_string(),
                d.to_string(),
                f6(row.accuracy),
            ]);
            depth_points.entry(row.key.kind).or_default().entry(name).or_default().push((d as f64, row.accuracy));
        }
    }
    avd.rows.sort();
    bundle.tables.push(t);
    charts.push(("accuracy_vs_n.svg", Chart {
        y_range: Some((0.0, 1.0)),
        ..chart("Accuracy vs problem size", "N", "accuracy", panels(acc_points))
    }));
    charts.push((
        "thinking_tokens_vs_n.svg",
        chart("Thinking tokens vs problem size", "N", "mean thinking tokens", panels(tok_points)),
    ));

    let mut t = Table::new("unsolvable", &["puzzle", "n", "model", "variant", "samples", "malformed", "rejected"]);
    for row in crate::eval::unsolvable_table(scores) {
        let mut cells = key_cells(&row.key);
        cells.extend([row.samples.to_string(), row.malformed.to_string(), row.rejected.to_string()]);
        t.rows.push(cells);
    }
    bundle.tables.push(t);

    let mut t = Table::new("pass_at_k", &["puzzle", "n", "model", "variant", "k", "pass_at_k", "token_budget"]);
    let mut pk_points: BTreeMap<PuzzleKind, BTreeMap<String, Vec<(f64, f64)>>> = BTreeMap::new();
    for row in pass_at_k_table(scores, &options.k_list)? {
        let mut cells = key_cells(&row.key);
        cells.extend([row.k.to_string(), f6(row.pass_at_k), f6(row.token_budget)]);
        t.rows.push(cells);
        let name = format!("{} N={}", series_name(&row.key.model_id, row.key.variant.as_str()), row.key.size_n);
        pk_points.entry(row.key.kind).or_default().entry(name).or_default().push((row.k as f64, row.pass_at_k));
    }
    bundle.tables.push(t);
    charts.push(("pass_at_k.svg", Chart {
        y_range: Some((0.0, 1.0)),
        ..chart("pass@k", "k (samples)", "pass@k", panels(pk_points))
    }));

    let mut t = Table::new("pass_at_budget", &["puzzle", "n", "variant", "model", "budget_tokens", "k", "pass_at_k"]);
    for row in pass_at_budget_table(scores, &options.k_list)? {
        t.rows.push(vec![
            row.kind.to_string(),
            row.size_n.to_string(),
            row.variant.as_str().to_string(),
            row.model_id,
            f6(row.budget_tokens),
            row.k.to_string(),
            f6(row.pass_at_k),
        ]);
    }
    bundle.tables.push(t);

    let mut by_group: BTreeMap<GroupKey, Vec<&AttemptScore>> = BTreeMap::new();
    for s in scores.iter().filter(|s| s.solvable) {
        by_group.entry(s.group()).or_default().push(s);
    }
    let mut pairs = Table::new(
        "positional",
        &["puzzle", "n", "model", "variant", "run_id", "instance_id", "sample_idx", "ordinal", "position", "correct"],
    );
    let mut bins = Table::new(
        "positional_bins",
        &["puzzle", "n", "model", "variant", "bin", "lo", "hi", "correct", "incorrect", "accuracy"],
    );
    let mut pos_acc: BTreeMap<PuzzleKind, BTreeMap<String, Vec<(f64, f64)>>> = BTreeMap::new();
    let mut density: BTreeMap<PuzzleKind, BTreeMap<String, Vec<(f64, f64)>>> = BTreeMap::new();
    let mut pooled_by_kind: BTreeMap<PuzzleKind, Vec<&AttemptScore>> = BTreeMap::new();
    for (key, group) in &by_group {
        let mut sorted = group.clone();
        sorted.sort_by(|a, b| (&a.run_id, &a.instance_id, a.sample_idx).cmp(&(&b.run_id, &b.instance_id, b.sample_idx)));
        for s in &sorted {
            for p in &s.intermediate {
                let mut cells = key_cells(key);
                cells.extend([
                    s.run_id.clone(),
                    s.instance_id.clone(),
                    s.sample_idx.to_string(),
                    p.ordinal.to_string(),
                    f6(p.position),
                    p.correct.to_string(),
                ]);
                pairs.rows.push(cells);
            }
        }
        let analysis = positional_analysis(sorted.iter().copied(), options.bins)?;
        if analysis.pairs.is_empty() {
            continue;
        }
        pooled_by_kind.entry(key.kind).or_default().extend(sorted.iter().copied());
        let name = format!("{} N={}", series_name(&key.model_id, key.variant.as_str()), key.size_n);
        for (i, b) in analysis.bins.iter().enumerate() {
            let mut cells = key_cells(key);
            cells.extend([
                i.to_string(),
                f6(b.lo),
                f6(b.hi),
                b.correct.to_string(),
                b.incorrect.to_string(),
                opt(b.accuracy.map(f6)),
            ]);
            bins.rows.push(cells);
            if let Some(a) = b.accuracy {
                pos_acc.entry(key.kind).or_default().entry(name.clone()).or_default().push(((b.lo + b.hi) / 2.0, a));
            }
        }
    }
    for (kind, group) in pooled_by_kind {
        let analysis = positional_analysis(group, options.bins)?;
        let total = analysis.pairs.len() as f64;
        let width = 1.0 / options.bins as f64;
        let entry = density.entry(kind).or_default();
        for b in &analysis.bins {
            let mid = (b.lo + b.hi) / 2.0;
            entry.entry("correct".into()).or_default().push((mid, b.correct as f64 / total / width));
            entry.entry("incorrect".into()).or_default().push((mid, b.incorrect as f64 / total / width));
        }
    }
    bundle.tables.push(pairs);
    bundle.tables.push(bins);
    charts.push((
        "positional_density.svg",
        chart("Position of intermediate solutions in thinking", "normalized position", "density", panels(density)),
    ));
    charts.push(("positional_accuracy.svg", Chart {
        y_range: Some((0.0, 1.0)),
        ..chart("Intermediate-solution accuracy vs position", "normalized position", "accuracy", panels(pos_acc))
    }));

    let failures = failure_analysis(scores);
    let mut t = Table::new(
        "first_failure",
        &["puzzle", "model", "variant", "n", "failed", "unindexed", "mean_first_failure"],
    );
    let mut hist = Table::new("first_failure_hist", &["puzzle", "model", "variant", "n", "move_index", "count"]);
    let mut ff_points: BTreeMap<PuzzleKind, BTreeMap<String, Vec<(f64, f64)>>> = BTreeMap::new();
    for row in &failures.by_n {
        let head = [
            row.key.kind.to_string(),
            row.key.model_id.clone(),
            row.key.variant.as_str().to_string(),
            row.key.size_n.to_string(),
        ];
        let mut cells = head.to_vec();
        cells.extend([row.failed.to_string(), row.unindexed.to_string(), opt(row.mean_index.map(f6))]);
        t.rows.push(cells);
        for (index, count) in &row.histogram {
            let mut cells = head.to_vec();
            cells.extend([index.to_string(), count.to_string()]);
            hist.rows.push(cells);
        }
        if let Some(m) = row.mean_index {
            ff_points
                .entry(row.key.kind)
                .or_default()
                .entry(series_name(&row.key.model_id, row.key.variant.as_str()))
                .or_default()
                .push((f64::from(row.key.size_n), m));
        }
    }
    t.rows.sort_by(|a, b| (&a[0], &a[1], &a[2], a[3].parse::<u32>().ok()).cmp(&(&b[0], &b[1], &b[2], b[3].parse::<u32>().ok())));
    hist.rows.sort_by_key(|r| (r[0].clone(), r[1].clone(), r[2].clone(), r[3].parse::<u32>().ok(), r[4].parse::<usize>().ok()));
    bundle.tables.push(t);
    bundle.tables.push(hist);
    charts.push((
        "first_failure_vs_n.svg",
        chart("First failure move vs problem size", "N", "mean first-failure move", panels(ff_points)),
    ));

    let mut pooled = Table::new("failure_density", &["puzzle", "model", "variant", "move_index", "density"]);
    let mut means = Table::new("failure_pooled", &["puzzle", "model", "variant", "failures", "mean_first_failure"]);
    let mut fd_points: BTreeMap<PuzzleKind, BTreeMap<String, Vec<(f64, f64)>>> = BTreeMap::new();
    for p in &failures.pooled {
        means.rows.push(vec![
            p.kind.to_string(),
            p.model_id.clone(),
            p.variant.as_str().to_string(),
            p.indexed.to_string(),
            opt(p.mean_index.map(f6)),
        ]);
        let name = series_name(&p.model_id, p.variant.as_str());
        for (index, d) in &p.density {
            pooled.rows.push(vec![
                p.kind.to_string(),
                p.model_id.clone(),
                p.variant.as_str().to_string(),
                index.to_string(),
                f6(*d),
            ]);
            fd_points.entry(p.kind).or_default().entry(name.clone()).or_default().push((*index as f64, *d));
        }
    }
    bundle.tables.push(pooled);
    bundle.tables.push(means);
    charts.push((
        "failure_density.svg",
        chart("Density of first failure moves", "move index", "density", panels(fd_points)),
    ));

    let mut ranges: BTreeMap<PuzzleKind, (u32, u32)> = BTreeMap::new();
    for s in scores {
        let r = ranges.entry(s.kind).or_insert((s.size_n, s.size_n));
        *r = (r.0.min(s.size_n), r.1.max(s.size_n));
    }
    let mut t = Table::new("depth", &["puzzle", "n", "required_moves", "exact"]);
    let mut depth_series = Vec::new();
    for (kind, (lo, hi)) in ranges {
        let rows = depth_table_with(kind, lo..=hi, options.execution);
        depth_series.push(Series {
            name: kind.to_string(),
            points: rows
                .iter()
                .filter_map(|r| Some((f64::from(r.size_n), r.required_moves? as f64)))
                .collect(),
        });
        for r in rows {
            t.rows.push(vec![kind.to_string(), r.size_n.to_string(), opt(r.required_moves), r.exact.to_string()]);
        }
    }
    bundle.tables.push(t);
    bundle.tables.push(avd);
    charts.push(("depth.svg", Chart {
        log_y: true,
        ..chart("Compositional depth", "N", "required moves", vec![Panel {
            title: "Required moves".into(),
            series: depth_series,
        }])
    }));
    charts.push(("accuracy_vs_depth.svg", Chart {
        log_x: true,
        y_range: Some((0.0, 1.0)),
        ..chart("Accuracy vs compositional depth", "required moves", "accuracy", panels(depth_points))
    }));

    bundle.charts = charts.into_iter().map(|(n, c)| (n.to_string(), svg::render(&c))).collect();
    Ok(bundle)
}

/// Names of the CSV files every bundle contains.
pub fn table_names() -> BTreeSet<&'static str> {
    build_report(&[], &ReportOptions::default())
        .map(|b| b.tables.iter().map(|t| t.name).collect())
        .unwrap_or_default()
}
