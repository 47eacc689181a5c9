//! Diversity and complexity statistics of a dataset snapshot.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{topology_signature, GridError, TableAnnotation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_tables: usize,
    pub n_unique_topologies: usize,
    pub avg_tables_per_topology: f64,
    pub avg_rows: f64,
    pub avg_cols: f64,
    pub avg_spanning_cells: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("table {table_id}: {source}")]
    Grid { table_id: String, source: GridError },
}

pub fn dataset_stats(tables: &[TableAnnotation]) -> Result<DatasetStats, StatsError> {
    if tables.is_empty() {
        return Err(StatsError::EmptyDataset);
    }
    let mut topologies = BTreeSet::new();
    let (mut rows, mut cols, mut spans) = (0usize, 0usize, 0usize);
    for t in tables {
        let sig = topology_signature(t).map_err(|source| StatsError::Grid {
            table_id: t.table_id.clone(),
            source,
        })?;
        topologies.insert(sig);
        rows += t.n_rows;
        cols += t.n_cols;
        spans += t.cells.iter().filter(|c| c.is_spanning()).count();
    }
    let n = tables.len() as f64;
    Ok(DatasetStats {
        n_tables: tables.len(),
        n_unique_topologies: topologies.len(),
        avg_tables_per_topology: n / topologies.len() as f64,
        avg_rows: rows as f64 / n,
        avg_cols: cols as f64 / n,
        avg_spanning_cells: spans as f64 / n,
    })
}

/// `112474` -> `112,474`.
pub fn group_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

pub const STATS_HEADERS: [&str; 7] = [
    "Dataset",
    "# Tables",
    "# Unique Topologies",
    "Avg. Tables / Topology",
    "Avg. Rows / Table",
    "Avg. Cols. / Table",
    "Avg. Spanning Cells / Table",
];

/// Aligned text table, one line per named snapshot.
pub fn format_stats_table(rows: &[(String, DatasetStats)]) -> String {
    let body: Vec<[String; 7]> = rows
        .iter()
        .map(|(name, s)| {
            [
                name.clone(),
                group_thousands(s.n_tables),
                group_thousands(s.n_unique_topologies),
                format!("{:.2}", s.avg_tables_per_topology),
                format!("{:.2}", s.avg_rows),
                format!("{:.2}", s.avg_cols),
                format!("{:.2}", s.avg_spanning_cells),
            ]
        })
        .collect();
    let mut widths = STATS_HEADERS.map(str::len);
    for line in &body {
        for (w, cell) in widths.iter_mut().zip(line) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut emit = |cells: &[&str]| {
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "  {cell:>w$}");
            }
        }
        out.push('\n');
    };
    emit(&STATS_HEADERS);
    for line in &body {
        emit(&line.each_ref().map(String::as_str));
    }
    out
}
