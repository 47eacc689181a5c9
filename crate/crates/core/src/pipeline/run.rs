//! Stage driver: snapshots per ablation and the run report.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Flag, Outcome, PipelineReport, StageSummary, TableOutcome};
use super::{
    canonicalize, complete_rows_columns, detect_currency_column, infer_headers, infer_two_column_header,
    merge_adjacent_header_rows, quality_control, refine_boxes, remove_empty_rows_columns, strip_dot_leaders,
    ChangeCode, PipelineOptions, ReasonCode, StageId,
};
use crate::ingest::{apply_corrections, IngestError, ManualCorrection};
use crate::model::{Extent, TableAnnotation};
use crate::stats::dataset_stats;

/// Which procedure to follow. `Standard` is the full a1..a6 sequence;
/// `Icdar` stops at a3, replaces a2 by manual corrections and never removes
/// a table: failures are flagged for manual review instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Standard,
    Icdar,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Standard => "standard",
            Mode::Icdar => "icdar",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("stage {stage} is not defined in {} mode", mode.as_str())]
    InvalidTarget { mode: Mode, stage: StageId },
    #[error("manual corrections: {0}")]
    Corrections(#[from] IngestError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub stage: StageId,
    pub tables: Vec<TableAnnotation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub snapshots: Vec<Snapshot>,
    pub report: PipelineReport,
}

/// A table in flight together with everything that happened to it.
#[derive(Debug, Clone)]
struct Item {
    table: TableAnnotation,
    changes: Vec<ChangeCode>,
    flags: Vec<Flag>,
}

impl Item {
    fn change(&mut self, code: ChangeCode) {
        if !self.changes.contains(&code) {
            self.changes.push(code);
        }
    }

    fn flag(&mut self, stage: StageId, code: ReasonCode) {
        let f = Flag { stage, code };
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }
}

#[derive(Debug, Clone)]
struct Removed {
    table_id: String,
    stage: StageId,
    reason: ReasonCode,
    flags: Vec<Flag>,
}

type Step = Result<Item, Removed>;

struct StageOutput {
    items: Vec<Item>,
    removed: Vec<Removed>,
    summary: StageSummary,
}

fn remove(item: &Item, stage: StageId, reason: ReasonCode) -> Removed {
    Removed {
        table_id: item.table.table_id.clone(),
        stage,
        reason,
        flags: item.flags.clone(),
    }
}

fn boxes_changed(a: &TableAnnotation, b: &TableAnnotation) -> bool {
    a.cells.len() != b.cells.len() || a.cells.iter().zip(&b.cells).any(|(x, y)| x.bbox != y.bbox)
}

fn layout(t: &TableAnnotation) -> Vec<Extent> {
    let mut v: Vec<Extent> = t.cells.iter().map(|c| c.extent()).collect();
    v.sort_by_key(|e| (e.row_start, e.col_start, e.row_end, e.col_end));
    v
}

fn run_stage<F>(stage: StageId, mode: Mode, input: &[Item], f: F) -> StageOutput
where
    F: Fn(Item) -> Step + Sync,
{
    let results: Vec<(Vec<ChangeCode>, usize, Step)> = input
        .par_iter()
        .map(|item| (item.changes.clone(), item.flags.len(), f(item.clone())))
        .collect();
    let mut summary = StageSummary {
        stage,
        title: stage.title(mode).to_string(),
        input: input.len(),
        output: 0,
        removed: BTreeMap::new(),
        modified: BTreeMap::new(),
        flagged: BTreeMap::new(),
        stats: None,
    };
    let mut items = Vec::new();
    let mut removed = Vec::new();
    for (before, n_flags, step) in results {
        match step {
            Ok(item) => {
                for c in item.changes.iter().filter(|c| !before.contains(c)) {
                    *summary.modified.entry(*c).or_default() += 1;
                }
                for f in &item.flags[n_flags..] {
                    *summary.flagged.entry(f.code).or_default() += 1;
                }
                items.push(item);
            }
            Err(r) => {
                *summary.removed.entry(r.reason).or_default() += 1;
                removed.push(r);
            }
        }
    }
    summary.output = items.len();
    let tables: Vec<TableAnnotation> = items.iter().map(|i| i.table.clone()).collect();
    summary.stats = dataset_stats(&tables).ok();
    StageOutput {
        items,
        removed,
        summary,
    }
}

fn tag(mut t: TableAnnotation, stage: StageId) -> TableAnnotation {
    t.stage = stage.tag().to_string();
    t
}

fn a1(mut item: Item, stage: StageId) -> Step {
    match complete_rows_columns(&item.table) {
        Ok(t) => {
            item.table = tag(t, stage);
            Ok(item)
        }
        Err(reason) => Err(remove(&item, stage, reason)),
    }
}

/// Completion that keeps the table as it was, flagged, when it fails.
fn icdar_complete(mut item: Item, stage: StageId) -> Step {
    match complete_rows_columns(&item.table) {
        Ok(t) => item.table = t,
        Err(code) => item.flag(stage, code),
    }
    item.table = tag(item.table, stage);
    Ok(item)
}

fn a2(mut item: Item, opts: &PipelineOptions) -> Step {
    let t = refine_boxes(&item.table, opts).map_err(|r| remove(&item, StageId::A2, r))?;
    if boxes_changed(&item.table, &t) {
        item.change(ChangeCode::CellBoxesRefined);
    }
    item.table = tag(t, StageId::A2);
    Ok(item)
}

/// The consistency steps, followed by a refinement pass over the edited
/// structure. Returns the failures in step order; a failed step leaves the
/// table as it was.
fn consistency(item: &mut Item, opts: &PipelineOptions) -> Vec<ReasonCode> {
    let mut failures = Vec::new();
    match strip_dot_leaders(&item.table, opts) {
        Ok(t) => {
            if t != item.table {
                item.change(ChangeCode::DotLeadersStripped);
            }
            item.table = t;
        }
        Err(r) => failures.push(r),
    }
    match remove_empty_rows_columns(&item.table) {
        Ok(t) => {
            if t.n_rows < item.table.n_rows {
                item.change(ChangeCode::EmptyRowsRemoved);
            }
            if t.n_cols < item.table.n_cols {
                item.change(ChangeCode::EmptyColumnsRemoved);
            }
            item.table = t;
        }
        Err(r) => failures.push(r),
    }
    let merged = merge_adjacent_header_rows(&item.table);
    if merged.n_rows < item.table.n_rows {
        item.change(ChangeCode::HeaderRowsMerged);
    }
    item.table = merged;
    if let Err(r) = detect_currency_column(&item.table, opts) {
        failures.push(r);
    }
    match refine_boxes(&item.table, opts) {
        Ok(t) => item.table = t,
        Err(r) => failures.push(r),
    }
    failures
}

fn a3(mut item: Item, opts: &PipelineOptions) -> Step {
    let failures = consistency(&mut item, opts);
    if let Some(&reason) = failures.first() {
        return Err(remove(&item, StageId::A3, reason));
    }
    item.table = tag(item.table, StageId::A3);
    Ok(item)
}

/// Header inference and canonicalization; with `two_column` the two-column
/// header rule runs first.
fn headers_and_canonical(item: &mut Item, stage: StageId, two_column: bool, opts: &PipelineOptions) -> Result<(), ReasonCode> {
    let mut t = item.table.clone();
    if two_column {
        t = infer_two_column_header(&t, opts);
    }
    let (t, flag) = infer_headers(&t)?;
    if let Some(code) = flag {
        item.flag(stage, code);
    }
    let c = canonicalize(&t, two_column)?;
    if layout(&c) != layout(&t) {
        item.change(ChangeCode::Canonicalized);
    }
    item.table = c;
    Ok(())
}

fn a4(mut item: Item, stage: StageId, two_column: bool, opts: &PipelineOptions) -> Step {
    match headers_and_canonical(&mut item, stage, two_column, opts) {
        Ok(()) => {
            item.table = tag(item.table, stage);
            Ok(item)
        }
        Err(reason) => Err(remove(&item, stage, reason)),
    }
}

fn a6(mut item: Item, opts: &PipelineOptions) -> Step {
    quality_control(&item.table, opts).map_err(|r| remove(&item, StageId::A6, r))?;
    item.table = tag(item.table, StageId::A6);
    Ok(item)
}

/// The ICDAR a3 stage: every automated step from a2 to a4, with failures
/// turned into flags. A failed step leaves the table as it was before it.
fn icdar_a3(mut item: Item, opts: &PipelineOptions) -> Step {
    let stage = StageId::A3;
    match refine_boxes(&item.table, opts) {
        Ok(t) => {
            if boxes_changed(&item.table, &t) {
                item.change(ChangeCode::CellBoxesRefined);
            }
            item.table = t;
        }
        Err(r) => item.flag(stage, r),
    }
    for r in consistency(&mut item, opts) {
        item.flag(stage, r);
    }
    let before = item.table.clone();
    if let Err(r) = headers_and_canonical(&mut item, stage, true, opts) {
        item.table = before;
        item.flag(stage, r);
    }
    item.table = tag(item.table, stage);
    Ok(item)
}

fn summarize(items: &[Item], removed: &[Removed]) -> Vec<TableOutcome> {
    let mut out: Vec<TableOutcome> = items
        .iter()
        .map(|i| {
            let mut changes = i.changes.clone();
            changes.sort();
            TableOutcome {
                table_id: i.table.table_id.clone(),
                outcome: if changes.is_empty() {
                    Outcome::Kept
                } else {
                    Outcome::Modified { changes }
                },
                flags: i.flags.clone(),
            }
        })
        .chain(removed.iter().map(|r| TableOutcome {
            table_id: r.table_id.clone(),
            outcome: Outcome::Removed {
                stage: r.stage,
                reason: r.reason,
            },
            flags: r.flags.clone(),
        }))
        .collect();
    out.sort_by(|a, b| a.table_id.cmp(&b.table_id));
    out
}

fn fresh(tables: &[TableAnnotation]) -> Vec<Item> {
    tables
        .iter()
        .map(|t| Item {
            table: t.clone(),
            changes: Vec::new(),
            flags: Vec::new(),
        })
        .collect()
}

/// Run every stage up to `target`, producing one snapshot per ablation.
///
/// Standard mode: a1, a2, a3 chain; a4 applies header inference and
/// canonicalization to a3; a5 does the same with the two-column rule in
/// front; a6 applies quality control to a5. ICDAR mode: a1 is completion; a2
/// applies the manual corrections to the source tables and completes them
/// again; a3 runs the automated steps. Nothing is removed in ICDAR mode.
///
/// Tables are processed in parallel on the current rayon pool; results do
/// not depend on the pool size.
pub fn run_pipeline(
    dataset: &str,
    tables: &[TableAnnotation],
    target: StageId,
    mode: Mode,
    opts: &PipelineOptions,
    corrections: &[ManualCorrection],
) -> Result<PipelineRun, PipelineError> {
    if mode == Mode::Icdar && target > StageId::A3 {
        return Err(PipelineError::InvalidTarget { mode, stage: target });
    }
    let mut stages: Vec<StageOutput> = Vec::new();
    // Indices into `stages` whose removals lie on the path to the target.
    let mut path: Vec<usize> = Vec::new();

    let s1 = match mode {
        Mode::Standard => run_stage(StageId::A1, mode, &fresh(tables), |i| a1(i, StageId::A1)),
        Mode::Icdar => run_stage(StageId::A1, mode, &fresh(tables), |i| icdar_complete(i, StageId::A1)),
    };
    stages.push(s1);
    path.push(0);

    match mode {
        Mode::Standard => {
            if target >= StageId::A2 {
                let s = run_stage(StageId::A2, mode, &stages[0].items, |i| a2(i, opts));
                stages.push(s);
                path.push(1);
            }
            if target >= StageId::A3 {
                let s = run_stage(StageId::A3, mode, &stages[1].items, |i| a3(i, opts));
                stages.push(s);
                path.push(2);
            }
            if target >= StageId::A4 {
                let s = run_stage(StageId::A4, mode, &stages[2].items, |i| a4(i, StageId::A4, false, opts));
                stages.push(s);
                if target == StageId::A4 {
                    path.push(3);
                }
            }
            if target >= StageId::A5 {
                let s = run_stage(StageId::A5, mode, &stages[2].items, |i| a4(i, StageId::A5, true, opts));
                stages.push(s);
                path.push(4);
            }
            if target >= StageId::A6 {
                let s = run_stage(StageId::A6, mode, &stages[4].items, |i| a6(i, opts));
                stages.push(s);
                path.push(5);
            }
        }
        Mode::Icdar => {
            if target >= StageId::A2 {
                let mut corrected = Vec::with_capacity(tables.len());
                let mut touched = Vec::new();
                for fix in corrections {
                    if tables.iter().filter(|t| t.table_id == fix.table_id).count() != 1 {
                        return Err(IngestError::TargetNotFound(fix.table_id.clone()).into());
                    }
                }
                for t in tables {
                    let fixes: Vec<ManualCorrection> =
                        corrections.iter().filter(|f| f.table_id == t.table_id).cloned().collect();
                    if fixes.is_empty() {
                        corrected.push(t.clone());
                    } else {
                        let parts = apply_corrections(vec![t.clone()], &fixes)?;
                        touched.extend(parts.iter().map(|p| p.table_id.clone()));
                        corrected.extend(parts);
                    }
                }
                let mut items = fresh(&corrected);
                for item in &mut items {
                    if touched.contains(&item.table.table_id) {
                        item.change(ChangeCode::ManualCorrection);
                    }
                }
                let mut s = run_stage(StageId::A2, mode, &items, |i| icdar_complete(i, StageId::A2));
                s.summary.input = tables.len();
                s.summary.modified.clear();
                let n = s.items.iter().filter(|i| i.changes.contains(&ChangeCode::ManualCorrection)).count();
                if n > 0 {
                    s.summary.modified.insert(ChangeCode::ManualCorrection, n);
                }
                stages.push(s);
                path = vec![1];
            }
            if target >= StageId::A3 {
                let s = run_stage(StageId::A3, mode, &stages[1].items, |i| icdar_a3(i, opts));
                stages.push(s);
                path.push(2);
            }
        }
    }

    let last = *path.last().unwrap();
    let removed: Vec<Removed> = path.iter().flat_map(|&i| stages[i].removed.iter().cloned()).collect();
    let mut report = PipelineReport {
        dataset: dataset.to_string(),
        mode,
        target,
        input_tables: tables.len(),
        kept: 0,
        modified: 0,
        removed: 0,
        flagged: 0,
        removed_by_reason: BTreeMap::new(),
        modified_by_change: BTreeMap::new(),
        flags_by_code: BTreeMap::new(),
        stages: stages.iter().map(|s| s.summary.clone()).collect(),
        before: dataset_stats(tables).ok(),
        after: stages[last].summary.stats.clone(),
        tables: summarize(&stages[last].items, &removed),
    };
    report.tally();
    let snapshots = stages
        .into_iter()
        .map(|s| Snapshot {
            stage: s.summary.stage,
            tables: s.items.into_iter().map(|i| i.table).collect(),
        })
        .collect();
    Ok(PipelineRun { snapshots, report })
}
