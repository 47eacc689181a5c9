//! In-memory table annotation model.
//!
//! A [`TableAnnotation`] stores cells by their inclusive grid extents. Grid
//! positions not covered by any cell are blank; they are synthesized by
//! [`build_grid`] and never need to be stored.

mod grid;
mod slot;

pub use grid::{build_grid, topology_signature, GridEntry, GridError, RelExtent, TableGrid};
pub use slot::{slot_boxes, slot_words};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::BBox;
use crate::text::is_blank;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Word {
    pub text: String,
    #[serde(rename = "bbox")]
    pub bbox: BBox,
}

impl Word {
    pub fn new(text: impl Into<String>, bbox: BBox) -> Self {
        Word {
            text: text.into(),
            bbox,
        }
    }
}

/// Inclusive grid extent of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Extent {
    pub row_start: usize,
    pub row_end: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl Extent {
    pub const fn new(row_start: usize, row_end: usize, col_start: usize, col_end: usize) -> Self {
        Extent {
            row_start,
            row_end,
            col_start,
            col_end,
        }
    }

    pub const fn single(row: usize, col: usize) -> Self {
        Extent::new(row, row, col, col)
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.row_start..=self.row_end).contains(&row) && (self.col_start..=self.col_end).contains(&col)
    }

    pub fn is_spanning(&self) -> bool {
        self.row_end > self.row_start || self.col_end > self.col_start
    }

    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.row_start..=self.row_end)
            .flat_map(move |r| (self.col_start..=self.col_end).map(move |c| (r, c)))
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rows {}-{}, cols {}-{}",
            self.row_start, self.row_end, self.col_start, self.col_end
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub row_start: usize,
    pub row_end: usize,
    pub col_start: usize,
    pub col_end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BBox>,
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub is_column_header: bool,
    #[serde(default)]
    pub is_projected_row_header: bool,
}

impl Cell {
    pub fn new(extent: Extent, text: impl Into<String>, bbox: Option<BBox>) -> Self {
        Cell {
            row_start: extent.row_start,
            row_end: extent.row_end,
            col_start: extent.col_start,
            col_end: extent.col_end,
            bbox,
            text: text.into(),
            is_column_header: false,
            is_projected_row_header: false,
        }
    }

    pub fn extent(&self) -> Extent {
        Extent::new(self.row_start, self.row_end, self.col_start, self.col_end)
    }

    pub fn set_extent(&mut self, e: Extent) {
        self.row_start = e.row_start;
        self.row_end = e.row_end;
        self.col_start = e.col_start;
        self.col_end = e.col_end;
    }

    pub fn is_blank(&self) -> bool {
        is_blank(&self.text)
    }

    pub fn is_spanning(&self) -> bool {
        self.extent().is_spanning()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Row {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BBox>,
    #[serde(default)]
    pub is_column_header: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Column {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BBox>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "val" | "validation" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub dataset: String,
    pub document_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableAnnotation {
    pub table_id: String,
    pub split: Split,
    pub n_rows: usize,
    pub n_cols: usize,
    pub cells: Vec<Cell>,
    #[serde(default)]
    pub rows: Vec<Row>,
    #[serde(default)]
    pub columns: Vec<Column>,
    #[serde(default)]
    pub words: Vec<Word>,
    /// Rows marked as header in the source markup (e.g. `<thead>`). Kept
    /// apart from `Row::is_column_header`, which holds inferred labels.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub markup_header_rows: Vec<usize>,
    #[serde(default)]
    pub stage: String,
    #[serde(default)]
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct InvalidTable {
    pub path: String,
    pub message: String,
}

impl InvalidTable {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        InvalidTable {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl TableAnnotation {
    pub fn new(table_id: impl Into<String>, split: Split, n_rows: usize, n_cols: usize) -> Self {
        TableAnnotation {
            table_id: table_id.into(),
            split,
            n_rows,
            n_cols,
            cells: Vec::new(),
            rows: Vec::new(),
            columns: Vec::new(),
            words: Vec::new(),
            markup_header_rows: Vec::new(),
            stage: String::new(),
            provenance: Provenance::default(),
        }
    }

    pub fn has_row_boxes(&self) -> bool {
        self.rows.len() == self.n_rows && self.rows.iter().all(|r| r.bbox.is_some())
    }

    pub fn has_column_boxes(&self) -> bool {
        self.columns.len() == self.n_cols && self.columns.iter().all(|c| c.bbox.is_some())
    }

    pub fn header_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_column_header)
            .map(|(i, _)| i)
            .collect()
    }

    /// Check every structural invariant. The first violation is reported with
    /// a field path such as `cells[3].col_end`.
    pub fn validate(&self) -> Result<(), InvalidTable> {
        if self.table_id.is_empty() {
            return Err(InvalidTable::new("table_id", "must not be empty"));
        }
        if self.n_rows == 0 || self.n_cols == 0 {
            return Err(InvalidTable::new(
                if self.n_rows == 0 { "n_rows" } else { "n_cols" },
                "must be positive",
            ));
        }
        for (i, cell) in self.cells.iter().enumerate() {
            if cell.row_start > cell.row_end {
                return Err(InvalidTable::new(format!("cells[{i}].row_end"), "precedes row_start"));
            }
            if cell.col_start > cell.col_end {
                return Err(InvalidTable::new(format!("cells[{i}].col_end"), "precedes col_start"));
            }
            if cell.row_end >= self.n_rows {
                return Err(InvalidTable::new(
                    format!("cells[{i}].row_end"),
                    format!("{} outside {} rows", cell.row_end, self.n_rows),
                ));
            }
            if cell.col_end >= self.n_cols {
                return Err(InvalidTable::new(
                    format!("cells[{i}].col_end"),
                    format!("{} outside {} columns", cell.col_end, self.n_cols),
                ));
            }
            if let Some(b) = &cell.bbox {
                if !b.is_valid() {
                    return Err(InvalidTable::new(format!("cells[{i}].bbox"), "invalid box"));
                }
            }
            if cell.is_projected_row_header && (cell.col_start != 0 || cell.col_end + 1 != self.n_cols) {
                return Err(InvalidTable::new(
                    format!("cells[{i}].is_projected_row_header"),
                    "projected row header must span all columns",
                ));
            }
        }
        let mut owner: Vec<Option<usize>> = vec![None; self.n_rows * self.n_cols];
        for (i, cell) in self.cells.iter().enumerate() {
            for (r, c) in cell.extent().positions() {
                let slot = &mut owner[r * self.n_cols + c];
                if let Some(prev) = *slot {
                    return Err(InvalidTable::new(
                        format!("cells[{prev}]/cells[{i}]"),
                        format!("cells {prev} and {i} overlap at ({r}, {c})"),
                    ));
                }
                *slot = Some(i);
            }
        }
        if !self.rows.is_empty() && self.rows.len() != self.n_rows {
            return Err(InvalidTable::new(
                "rows",
                format!("{} entries for {} rows", self.rows.len(), self.n_rows),
            ));
        }
        if !self.columns.is_empty() && self.columns.len() != self.n_cols {
            return Err(InvalidTable::new(
                "columns",
                format!("{} entries for {} columns", self.columns.len(), self.n_cols),
            ));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.bbox.is_some_and(|b| !b.is_valid()) {
                return Err(InvalidTable::new(format!("rows[{i}].bbox"), "invalid box"));
            }
        }
        for (i, c) in self.columns.iter().enumerate() {
            if c.bbox.is_some_and(|b| !b.is_valid()) {
                return Err(InvalidTable::new(format!("columns[{i}].bbox"), "invalid box"));
            }
        }
        for (i, w) in self.words.iter().enumerate() {
            if is_blank(&w.text) {
                return Err(InvalidTable::new(format!("words[{i}].text"), "empty word"));
            }
            if !w.bbox.is_valid() {
                return Err(InvalidTable::new(format!("words[{i}].bbox"), "invalid box"));
            }
        }
        if let Some(&r) = self.markup_header_rows.iter().find(|&&r| r >= self.n_rows) {
            return Err(InvalidTable::new(
                "markup_header_rows",
                format!("row {r} outside {} rows", self.n_rows),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple(n_rows: usize, n_cols: usize) -> TableAnnotation {
        let mut t = TableAnnotation::new("t", Split::Train, n_rows, n_cols);
        for r in 0..n_rows {
            for c in 0..n_cols {
                t.cells.push(Cell::new(Extent::single(r, c), format!("{r}{c}"), None));
            }
        }
        t
    }

    #[test]
    fn valid_table_passes() {
        assert!(simple(2, 3).validate().is_ok());
    }

    #[test]
    fn overlap_names_both_cells() {
        let mut t = simple(2, 2);
        t.cells.push(Cell::new(Extent::single(1, 1), "x", None));
        let err = t.validate().unwrap_err();
        assert_eq!(err.path, "cells[3]/cells[4]");
    }

    #[test]
    fn out_of_range_cell() {
        let mut t = simple(1, 1);
        t.cells[0].col_end = 1;
        assert_eq!(t.validate().unwrap_err().path, "cells[0].col_end");
    }

    #[test]
    fn projected_row_header_must_be_full_width() {
        let mut t = simple(2, 2);
        t.cells[0].is_projected_row_header = true;
        assert!(t.validate().is_err());
    }

    #[test]
    fn row_list_length_checked() {
        let mut t = simple(2, 2);
        t.rows.push(Row::default());
        assert_eq!(t.validate().unwrap_err().path, "rows");
    }
}
