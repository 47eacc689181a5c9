//! Per-table outcomes and per-stage summaries of a pipeline run.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{ChangeCode, Mode, ReasonCode, StageId};
use crate::stats::{format_stats_table, DatasetStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub stage: StageId,
    pub code: ReasonCode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Kept,
    Modified { changes: Vec<ChangeCode> },
    Removed { stage: StageId, reason: ReasonCode },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableOutcome {
    pub table_id: String,
    #[serde(flatten)]
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<Flag>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageSummary {
    pub stage: StageId,
    pub title: String,
    pub input: usize,
    pub output: usize,
    pub removed: BTreeMap<ReasonCode, usize>,
    pub modified: BTreeMap<ChangeCode, usize>,
    pub flagged: BTreeMap<ReasonCode, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<DatasetStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub dataset: String,
    pub mode: Mode,
    pub target: StageId,
    pub input_tables: usize,
    pub kept: usize,
    pub modified: usize,
    pub removed: usize,
    pub flagged: usize,
    pub removed_by_reason: BTreeMap<ReasonCode, usize>,
    pub modified_by_change: BTreeMap<ChangeCode, usize>,
    pub flags_by_code: BTreeMap<ReasonCode, usize>,
    pub stages: Vec<StageSummary>,
    pub before: Option<DatasetStats>,
    pub after: Option<DatasetStats>,
    /// Sorted by table id.
    pub tables: Vec<TableOutcome>,
}

impl PipelineReport {
    pub(crate) fn tally(&mut self) {
        self.kept = 0;
        self.modified = 0;
        self.removed = 0;
        self.flagged = 0;
        self.removed_by_reason.clear();
        self.modified_by_change.clear();
        self.flags_by_code.clear();
        for t in &self.tables {
            match &t.outcome {
                Outcome::Kept => self.kept += 1,
                Outcome::Modified { changes } => {
                    self.kept += 1;
                    self.modified += 1;
                    for c in changes {
                        *self.modified_by_change.entry(*c).or_default() += 1;
                    }
                }
                Outcome::Removed { reason, .. } => {
                    self.removed += 1;
                    *self.removed_by_reason.entry(*reason).or_default() += 1;
                }
            }
            if !t.flags.is_empty() {
                self.flagged += 1;
            }
            for f in &t.flags {
                *self.flags_by_code.entry(f.code).or_default() += 1;
            }
        }
    }
}

fn counts<K: std::fmt::Display>(out: &mut String, map: &BTreeMap<K, usize>) {
    for (k, n) in map {
        let _ = writeln!(out, "  {k}: {n}");
    }
}

/// Human-readable summary.
pub fn format_report(r: &PipelineReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dataset: {}", r.dataset);
    let _ = writeln!(out, "mode: {}", r.mode.as_str());
    let _ = writeln!(out, "target: {} ({})", r.target, r.target.title(r.mode));
    let _ = writeln!(out, "input: {}", r.input_tables);
    let _ = writeln!(out, "kept: {} (modified: {})", r.kept, r.modified);
    let _ = writeln!(out, "removed: {}", r.removed);
    counts(&mut out, &r.removed_by_reason);
    let _ = writeln!(out, "modified by change:");
    counts(&mut out, &r.modified_by_change);
    let _ = writeln!(out, "flagged: {}", r.flagged);
    counts(&mut out, &r.flags_by_code);

    out.push('\n');
    let title_w = r.stages.iter().map(|s| s.title.len()).max().unwrap_or(5).max(5);
    let _ = writeln!(
        out,
        "{:<5}  {:<title_w$}  {:>7}  {:>7}  {:>7}  {:>8}  {:>7}",
        "stage", "title", "input", "output", "removed", "modified", "flagged"
    );
    for s in &r.stages {
        let _ = writeln!(
            out,
            "{:<5}  {:<title_w$}  {:>7}  {:>7}  {:>7}  {:>8}  {:>7}",
            s.stage.tag(),
            s.title,
            s.input,
            s.output,
            s.removed.values().sum::<usize>(),
            s.modified.values().sum::<usize>(),
            s.flagged.values().sum::<usize>(),
        );
    }
    for s in &r.stages {
        for (k, n) in &s.removed {
            let _ = writeln!(out, "  {} removed {k}: {n}", s.stage);
        }
        for (k, n) in &s.flagged {
            let _ = writeln!(out, "  {} flagged {k}: {n}", s.stage);
        }
    }

    let mut rows = Vec::new();
    if let Some(b) = &r.before {
        rows.push((r.dataset.clone(), b.clone()));
    }
    for s in &r.stages {
        if let Some(st) = &s.stats {
            rows.push((format!("{}.{}", r.dataset, s.stage), st.clone()));
        }
    }
    if !rows.is_empty() {
        out.push('\n');
        out.push_str(&format_stats_table(&rows));
    }
    out
}
