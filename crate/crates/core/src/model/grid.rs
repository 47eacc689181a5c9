use std::fmt::Write as _;

use serde::Serialize;

use super::{Extent, TableAnnotation};
use crate::geometry::BBox;

/// Offsets of the covering cell's extent relative to a grid position:
/// `(row_start - i, row_end - i, col_start - j, col_end - j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct RelExtent {
    pub row_start: i64,
    pub row_end: i64,
    pub col_start: i64,
    pub col_end: i64,
}

impl RelExtent {
    pub fn of(extent: Extent, row: usize, col: usize) -> Self {
        let (r, c) = (row as i64, col as i64);
        RelExtent {
            row_start: extent.row_start as i64 - r,
            row_end: extent.row_end as i64 - r,
            col_start: extent.col_start as i64 - c,
            col_end: extent.col_end as i64 - c,
        }
    }

    /// Area of the half-open rectangle `[row_start, row_end+1) x [col_start, col_end+1)`.
    pub fn area(&self) -> i64 {
        (self.row_end + 1 - self.row_start) * (self.col_end + 1 - self.col_start)
    }

    pub fn intersection_area(&self, other: &RelExtent) -> i64 {
        let rows = (self.row_end.min(other.row_end) + 1) - self.row_start.max(other.row_start);
        let cols = (self.col_end.min(other.col_end) + 1) - self.col_start.max(other.col_start);
        rows.max(0) * cols.max(0)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct GridEntry {
    pub cell: Option<usize>,
    pub text: String,
    pub bbox: Option<BBox>,
    pub rel_extent: RelExtent,
}

impl GridEntry {
    pub fn is_blank(&self) -> bool {
        crate::text::is_blank(&self.text)
    }
}

/// Dense row-major matrix view of a table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableGrid {
    pub n_rows: usize,
    pub n_cols: usize,
    entries: Vec<GridEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("cells {first} and {second} overlap at ({row}, {col})")]
    OverlappingCells {
        first: usize,
        second: usize,
        row: usize,
        col: usize,
    },
    #[error("cell {cell} lies outside the {n_rows}x{n_cols} grid")]
    OutOfRange {
        cell: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("cell {cell} has an inverted extent")]
    InvertedExtent { cell: usize },
}

impl TableGrid {
    pub fn get(&self, row: usize, col: usize) -> &GridEntry {
        &self.entries[row * self.n_cols + col]
    }

    pub fn row(&self, row: usize) -> &[GridEntry] {
        &self.entries[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[GridEntry] {
        &self.entries
    }

    pub fn cell_at(&self, row: usize, col: usize) -> Option<usize> {
        self.get(row, col).cell
    }

    pub fn row_is_blank(&self, row: usize) -> bool {
        self.row(row).iter().all(GridEntry::is_blank)
    }

    pub fn col_is_blank(&self, col: usize) -> bool {
        (0..self.n_rows).all(|r| self.get(r, col).is_blank())
    }

    /// Recover each cell's extent from the maximal rectangle of positions
    /// sharing its reference. Sorted by cell index.
    pub fn cell_extents(&self) -> Vec<(usize, Extent)> {
        let mut found: std::collections::BTreeMap<usize, Extent> = Default::default();
        for r in 0..self.n_rows {
            for c in 0..self.n_cols {
                if let Some(id) = self.get(r, c).cell {
                    found
                        .entry(id)
                        .and_modify(|e| {
                            e.row_start = e.row_start.min(r);
                            e.row_end = e.row_end.max(r);
                            e.col_start = e.col_start.min(c);
                            e.col_end = e.col_end.max(c);
                        })
                        .or_insert(Extent::single(r, c));
                }
            }
        }
        found.into_iter().collect()
    }

    /// Build a grid straight from rows of text (every position a 1x1 cell).
    /// Handy for metric tests and predictions without structure.
    pub fn from_texts<S: AsRef<str>>(rows: &[Vec<S>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged rows");
            for text in row {
                entries.push(GridEntry {
                    cell: Some(entries.len()),
                    text: text.as_ref().to_string(),
                    bbox: None,
                    rel_extent: RelExtent::default(),
                });
            }
            debug_assert_eq!(entries.len(), (r + 1) * n_cols);
        }
        TableGrid {
            n_rows,
            n_cols,
            entries,
        }
    }
}

/// Expand a table's cells into a dense grid, synthesizing blank entries for
/// uncovered positions.
pub fn build_grid(t: &TableAnnotation) -> Result<TableGrid, GridError> {
    let (n_rows, n_cols) = (t.n_rows, t.n_cols);
    let mut entries = vec![GridEntry::default(); n_rows * n_cols];
    for (id, cell) in t.cells.iter().enumerate() {
        if cell.row_start > cell.row_end || cell.col_start > cell.col_end {
            return Err(GridError::InvertedExtent { cell: id });
        }
        if cell.row_end >= n_rows || cell.col_end >= n_cols {
            return Err(GridError::OutOfRange {
                cell: id,
                n_rows,
                n_cols,
            });
        }
        let extent = cell.extent();
        for (r, c) in extent.positions() {
            let entry = &mut entries[r * n_cols + c];
            if let Some(first) = entry.cell {
                return Err(GridError::OverlappingCells {
                    first,
                    second: id,
                    row: r,
                    col: c,
                });
            }
            *entry = GridEntry {
                cell: Some(id),
                text: cell.text.clone(),
                bbox: cell.bbox,
                rel_extent: RelExtent::of(extent, r, c),
            };
        }
    }
    Ok(TableGrid {
        n_rows,
        n_cols,
        entries,
    })
}

/// Layout-only fingerprint: grid size plus every position's relative extent
/// in row-major order. Text, boxes and header labels do not participate.
pub fn topology_signature(t: &TableAnnotation) -> Result<String, GridError> {
    let grid = build_grid(t)?;
    let mut sig = format!("{}x{}", grid.n_rows, grid.n_cols);
    for e in grid.entries() {
        let x = e.rel_extent;
        let _ = write!(sig, "|{},{},{},{}", x.row_start, x.row_end, x.col_start, x.col_end);
    }
    Ok(sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cell, Split};

    fn table(n_rows: usize, n_cols: usize, cells: &[(Extent, &str)]) -> TableAnnotation {
        let mut t = TableAnnotation::new("t", Split::Test, n_rows, n_cols);
        t.cells = cells
            .iter()
            .map(|(e, s)| Cell::new(*e, *s, None))
            .collect();
        t
    }

    #[test]
    fn single_cell_grid() {
        let g = build_grid(&table(1, 1, &[(Extent::single(0, 0), "A")])).unwrap();
        assert_eq!(g.get(0, 0).text, "A");
        assert_eq!(g.get(0, 0).rel_extent, RelExtent::default());
    }

    #[test]
    fn spanning_cell_rel_extent() {
        let t = table(
            2,
            2,
            &[
                (Extent::new(0, 0, 0, 1), "H"),
                (Extent::single(1, 0), "a"),
                (Extent::single(1, 1), "b"),
            ],
        );
        let g = build_grid(&t).unwrap();
        let x = g.get(0, 1).rel_extent;
        assert_eq!((x.row_start, x.row_end, x.col_start, x.col_end), (0, 0, -1, 0));
        assert_eq!(g.get(0, 1).cell, Some(0));
    }

    #[test]
    fn overlapping_cells_rejected() {
        let t = table(
            2,
            2,
            &[(Extent::new(0, 1, 1, 1), "x"), (Extent::single(1, 1), "y")],
        );
        assert!(matches!(
            build_grid(&t),
            Err(GridError::OverlappingCells { first: 0, second: 1, row: 1, col: 1 })
        ));
    }

    #[test]
    fn out_of_range_rejected() {
        let t = table(1, 1, &[(Extent::single(0, 1), "x")]);
        assert!(matches!(build_grid(&t), Err(GridError::OutOfRange { cell: 0, .. })));
    }

    #[test]
    fn uncovered_positions_are_blank() {
        let g = build_grid(&table(1, 3, &[(Extent::single(0, 1), "m")])).unwrap();
        assert!(g.get(0, 0).is_blank() && g.get(0, 0).cell.is_none());
        assert!(g.col_is_blank(2));
        assert!(!g.row_is_blank(0));
    }

    #[test]
    fn signatures_ignore_text() {
        let a = table(1, 2, &[(Extent::single(0, 0), "a"), (Extent::single(0, 1), "b")]);
        let b = table(1, 2, &[(Extent::single(0, 0), "x"), (Extent::single(0, 1), "y")]);
        let c = table(1, 2, &[(Extent::new(0, 0, 0, 1), "a")]);
        assert_eq!(topology_signature(&a), topology_signature(&b));
        assert_ne!(topology_signature(&a), topology_signature(&c));
    }

    #[test]
    fn rel_extent_iou_parts() {
        let simple = RelExtent::default();
        let wide = RelExtent {
            col_end: 1,
            ..Default::default()
        };
        assert_eq!(simple.area(), 1);
        assert_eq!(wide.area(), 2);
        assert_eq!(simple.intersection_area(&wide), 1);
    }
}
