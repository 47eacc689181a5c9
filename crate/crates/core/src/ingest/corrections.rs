//! Manual-correction overlays. Source files stay untouched; fixes are kept
//! in a separate versioned JSON file and applied after parsing.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::geometry::{union_all, BBox};
use crate::model::{slot_words, Cell, Extent, Row, TableAnnotation};

pub const OVERLAY_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionOp {
    /// Replace the cell whose extent equals `match`.
    ReplaceCell {
        #[serde(rename = "match")]
        target: Extent,
        new: Cell,
    },
    /// Split the table before each listed row; must be the last op.
    SplitTable { rows: Vec<usize> },
    SetText { extent: Extent, text: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManualCorrection {
    pub table_id: String,
    pub ops: Vec<CorrectionOp>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub version: String,
    pub corrections: Vec<ManualCorrection>,
}

pub fn load_overlay(path: &Path) -> Result<Vec<ManualCorrection>, IngestError> {
    let raw = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    let overlay: Overlay = serde_json::from_str(&raw)?;
    if overlay.version != OVERLAY_VERSION {
        return Err(IngestError::SchemaVersionMismatch {
            found: overlay.version,
            expected: OVERLAY_VERSION.into(),
        });
    }
    Ok(overlay.corrections)
}

fn find_cell(t: &TableAnnotation, extent: Extent) -> Result<usize, IngestError> {
    t.cells
        .iter()
        .position(|c| c.extent() == extent)
        .ok_or_else(|| IngestError::TargetNotFound(format!("{}: cell at {extent}", t.table_id)))
}

fn split_rows(t: &TableAnnotation, cuts: &[usize]) -> Result<Vec<TableAnnotation>, IngestError> {
    let bad = |reason: String| IngestError::ResultInvalid {
        table_id: t.table_id.clone(),
        reason,
    };
    let mut bounds = vec![0];
    bounds.extend_from_slice(cuts);
    bounds.push(t.n_rows);
    if bounds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad(format!("split rows {cuts:?} not strictly inside 0..{}", t.n_rows)));
    }
    if let Some(c) = t
        .cells
        .iter()
        .find(|c| cuts.iter().any(|&k| c.row_start < k && c.row_end >= k))
    {
        return Err(bad(format!("cell at {} crosses a split", c.extent())));
    }

    let parts: Vec<(usize, usize)> = bounds.windows(2).map(|w| (w[0], w[1])).collect();
    let part_of_row = |r: usize| parts.iter().position(|&(lo, hi)| (lo..hi).contains(&r)).unwrap();

    // Words follow the cell they fall in; otherwise the part whose region
    // they overlap most.
    let slots = slot_words(&t.cells, &t.words);
    let regions: Vec<Option<BBox>> = parts
        .iter()
        .map(|&(lo, hi)| {
            if t.has_row_boxes() {
                union_all(t.rows[lo..hi].iter().filter_map(|r| r.bbox.as_ref()))
            } else {
                union_all(
                    t.cells
                        .iter()
                        .filter(|c| (lo..hi).contains(&c.row_start))
                        .filter_map(|c| c.bbox.as_ref()),
                )
            }
        })
        .collect();

    let mut out = Vec::with_capacity(parts.len());
    for (k, &(lo, hi)) in parts.iter().enumerate() {
        let mut p = TableAnnotation::new(format!("{}_{}", t.table_id, k + 1), t.split, hi - lo, t.n_cols);
        p.cells = t
            .cells
            .iter()
            .filter(|c| (lo..hi).contains(&c.row_start))
            .map(|c| {
                let mut c = c.clone();
                c.row_start -= lo;
                c.row_end -= lo;
                c
            })
            .collect();
        if !t.rows.is_empty() {
            p.rows = t.rows[lo..hi].to_vec();
        }
        p.columns = t.columns.clone();
        p.markup_header_rows = t
            .markup_header_rows
            .iter()
            .filter(|r| (lo..hi).contains(*r))
            .map(|r| r - lo)
            .collect();
        p.words = t
            .words
            .iter()
            .zip(&slots)
            .filter(|(w, slot)| {
                let part = match slot {
                    Some(ci) => part_of_row(t.cells[*ci].row_start),
                    None => crate::model::slot_boxes(&regions, &w.bbox).unwrap_or(0),
                };
                part == k
            })
            .map(|(w, _)| w.clone())
            .collect();
        p.stage = t.stage.clone();
        p.provenance = t.provenance.clone();
        out.push(p);
    }
    Ok(out)
}

fn apply_one(t: TableAnnotation, ops: &[CorrectionOp]) -> Result<Vec<TableAnnotation>, IngestError> {
    let mut t = t;
    for (i, op) in ops.iter().enumerate() {
        match op {
            CorrectionOp::ReplaceCell { target, new } => {
                let idx = find_cell(&t, *target)?;
                t.cells[idx] = new.clone();
            }
            CorrectionOp::SetText { extent, text } => {
                let idx = find_cell(&t, *extent)?;
                t.cells[idx].text = text.clone();
            }
            CorrectionOp::SplitTable { rows } => {
                if i + 1 != ops.len() {
                    return Err(IngestError::ResultInvalid {
                        table_id: t.table_id.clone(),
                        reason: "split_table must be the last op".into(),
                    });
                }
                return split_rows(&t, rows);
            }
        }
    }
    // Grid changes may leave the row count short of new extents.
    let needed_rows = t.cells.iter().map(|c| c.row_end + 1).max().unwrap_or(0);
    let needed_cols = t.cells.iter().map(|c| c.col_end + 1).max().unwrap_or(0);
    if needed_rows > t.n_rows {
        t.n_rows = needed_rows;
        if !t.rows.is_empty() {
            t.rows.resize(needed_rows, Row::default());
        }
    }
    if needed_cols > t.n_cols {
        t.n_cols = needed_cols;
        if !t.columns.is_empty() {
            t.columns.resize_with(needed_cols, Default::default);
        }
    }
    Ok(vec![t])
}

/// Apply corrections in overlay order. Each correction must name exactly one
/// existing table; splits replace the table in place with suffixed parts.
pub fn apply_corrections(
    tables: Vec<TableAnnotation>,
    overlay: &[ManualCorrection],
) -> Result<Vec<TableAnnotation>, IngestError> {
    let mut tables = tables;
    for fix in overlay {
        let mut hits = tables.iter().enumerate().filter(|(_, t)| t.table_id == fix.table_id);
        let idx = match (hits.next(), hits.next()) {
            (Some((i, _)), None) => i,
            _ => return Err(IngestError::TargetNotFound(fix.table_id.clone())),
        };
        let original = tables.remove(idx);
        let fixed = apply_one(original, &fix.ops)?;
        for t in &fixed {
            t.validate().map_err(|e| IngestError::ResultInvalid {
                table_id: t.table_id.clone(),
                reason: e.to_string(),
            })?;
        }
        for (k, t) in fixed.into_iter().enumerate() {
            tables.insert(idx + k, t);
        }
    }
    Ok(tables)
}
