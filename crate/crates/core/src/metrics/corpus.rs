//! Per-table and corpus-level scores for a set of predictions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{dar_con, exact_match, grits, CellSimilarityKind, MetricsError};
use crate::model::{build_grid, TableAnnotation, TableGrid};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableMetrics {
    pub table_id: String,
    pub has_prediction: bool,
    pub grits_con: f64,
    pub grits_loc: f64,
    pub grits_top: f64,
    pub dar_con: f64,
    pub exact_match: bool,
}

impl TableMetrics {
    fn missing(table_id: &str) -> Self {
        TableMetrics {
            table_id: table_id.to_string(),
            has_prediction: false,
            grits_con: 0.0,
            grits_loc: 0.0,
            grits_top: 0.0,
            dar_con: 0.0,
            exact_match: false,
        }
    }
}

/// Unweighted means over the ground truth tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusMetrics {
    pub n_tables: usize,
    pub n_predicted: usize,
    pub grits_con: f64,
    pub grits_loc: f64,
    pub grits_top: f64,
    pub dar_con: f64,
    pub acc_con: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub summary: CorpusMetrics,
    /// Sorted by table id.
    pub tables: Vec<TableMetrics>,
}

fn grid_of(t: &TableAnnotation) -> Result<TableGrid, MetricsError> {
    build_grid(t).map_err(|source| MetricsError::Grid {
        table_id: t.table_id.clone(),
        source,
    })
}

fn score(gt: &TableAnnotation, pred: &TableAnnotation) -> Result<TableMetrics, MetricsError> {
    let (g, p) = (grid_of(gt)?, grid_of(pred)?);
    Ok(TableMetrics {
        table_id: gt.table_id.clone(),
        has_prediction: true,
        grits_con: grits(CellSimilarityKind::Content, &g, &p)?,
        grits_loc: grits(CellSimilarityKind::Location, &g, &p)?,
        grits_top: grits(CellSimilarityKind::Topology, &g, &p)?,
        dar_con: dar_con(&g, &p),
        exact_match: exact_match(&g, &p),
    })
}

fn summarize(tables: &[TableMetrics]) -> CorpusMetrics {
    let n = tables.len();
    let mean = |f: &dyn Fn(&TableMetrics) -> f64| {
        if n == 0 {
            0.0
        } else {
            tables.iter().map(f).sum::<f64>() / n as f64
        }
    };
    CorpusMetrics {
        n_tables: n,
        n_predicted: tables.iter().filter(|t| t.has_prediction).count(),
        grits_con: mean(&|t| t.grits_con),
        grits_loc: mean(&|t| t.grits_loc),
        grits_top: mean(&|t| t.grits_top),
        dar_con: mean(&|t| t.dar_con),
        acc_con: mean(&|t| if t.exact_match { 1.0 } else { 0.0 }),
    }
}

/// Score predictions against ground truth, joined on table id. A ground
/// truth table without a prediction scores 0 everywhere; a prediction
/// without ground truth is an error.
pub fn evaluate_corpus(gt: &[TableAnnotation], pred: &[TableAnnotation]) -> Result<MetricReport, MetricsError> {
    let mut gt_by_id = BTreeMap::new();
    for t in gt {
        if gt_by_id.insert(t.table_id.as_str(), t).is_some() {
            return Err(MetricsError::DuplicateGroundTruth(t.table_id.clone()));
        }
    }
    let mut pred_by_id = BTreeMap::new();
    for t in pred {
        if !gt_by_id.contains_key(t.table_id.as_str()) {
            return Err(MetricsError::UnmatchedPrediction(t.table_id.clone()));
        }
        if pred_by_id.insert(t.table_id.as_str(), t).is_some() {
            return Err(MetricsError::DuplicatePrediction(t.table_id.clone()));
        }
    }
    let pairs: Vec<(&TableAnnotation, Option<&TableAnnotation>)> =
        gt_by_id.iter().map(|(id, g)| (*g, pred_by_id.get(id).copied())).collect();
    let tables = pairs
        .par_iter()
        .map(|(g, p)| match p {
            Some(p) => score(g, p),
            None => Ok(TableMetrics::missing(&g.table_id)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MetricReport {
        summary: summarize(&tables),
        tables,
    })
}

pub const METRIC_HEADERS: [&str; 5] = ["GriTS_Con", "GriTS_Loc", "GriTS_Top", "DAR_C", "Acc_C"];

/// Aligned text summary in the usual column order.
pub fn format_metric_report(r: &MetricReport) -> String {
    let s = &r.summary;
    let values = [s.grits_con, s.grits_loc, s.grits_top, s.dar_con, s.acc_con].map(|v| format!("{v:.4}"));
    let mut out = String::new();
    let _ = write!(out, "{:>8}  {:>9}", "Tables", "Predicted");
    for h in METRIC_HEADERS {
        let _ = write!(out, "  {h:>9}");
    }
    out.push('\n');
    let _ = write!(out, "{:>8}  {:>9}", s.n_tables, s.n_predicted);
    for v in &values {
        let _ = write!(out, "  {v:>9}");
    }
    out.push('\n');
    out
}
