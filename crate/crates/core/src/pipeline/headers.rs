//! Column header and projected row header inference.

use crate::model::{build_grid, TableAnnotation, TableGrid};
use crate::text::is_numeric_like;

use super::{PipelineOptions, ReasonCode};

/// A row whose only non-blank content is one cell confined to the row and
/// starting at the first column; every other position is blank. After
/// canonicalization that cell spans the full width.
pub fn is_projected_row_header_row(t: &TableAnnotation, grid: &TableGrid, r: usize) -> bool {
    if t.n_cols < 2 {
        return false;
    }
    let mut content = None;
    for c in 0..t.n_cols {
        let Some(ci) = grid.cell_at(r, c) else { continue };
        let cell = &t.cells[ci];
        if cell.row_start != r || cell.row_end != r {
            return false;
        }
        if cell.is_blank() {
            continue;
        }
        match content {
            None => content = Some(ci),
            Some(prev) if prev == ci => {}
            Some(_) => return false,
        }
    }
    content.is_some_and(|ci| t.cells[ci].col_start == 0)
}

/// Every position holds a non-blank single-column cell that does not carry
/// on into the next row. With three or more columns the stub position
/// (column 0) may be blank.
fn is_complete_row(t: &TableAnnotation, grid: &TableGrid, r: usize) -> bool {
    (0..t.n_cols).all(|c| match grid.cell_at(r, c) {
        Some(ci) => {
            let cell = &t.cells[ci];
            if cell.is_blank() {
                c == 0 && t.n_cols >= 3 && cell.row_end == r
            } else {
                cell.col_start == cell.col_end && cell.row_end == r
            }
        }
        None => c == 0 && t.n_cols >= 3,
    })
}

/// Label rows `0..n` as the column header (and no others); cells lying
/// entirely inside those rows get the header label too.
pub fn set_header_rows(t: &mut TableAnnotation, n: usize) {
    if t.rows.len() != t.n_rows {
        t.rows.resize(t.n_rows, Default::default());
    }
    for (r, row) in t.rows.iter_mut().enumerate() {
        row.is_column_header = r < n;
    }
    for cell in &mut t.cells {
        cell.is_column_header = cell.row_end < n;
    }
}

fn mark_projected(t: &mut TableAnnotation, grid: &TableGrid) {
    let rows: Vec<usize> = (0..t.n_rows).filter(|&r| is_projected_row_header_row(t, grid, r)).collect();
    for cell in &mut t.cells {
        cell.is_projected_row_header =
            cell.col_start == 0 && cell.col_end + 1 == t.n_cols && !cell.is_blank() && rows.contains(&cell.row_start);
    }
}

/// Infer the column header from cell structure: the rows up to and
/// including the first complete row, provided it lies in the top half of the
/// table. Two-column tables keep whatever header they already carry.
///
/// Returns the flag raised when no header could be determined.
pub fn infer_headers(t: &TableAnnotation) -> Result<(TableAnnotation, Option<ReasonCode>), ReasonCode> {
    let grid = build_grid(t).map_err(|_| ReasonCode::InvalidGrid)?;
    let mut out = t.clone();
    mark_projected(&mut out, &grid);
    if t.n_cols == 2 {
        return Ok((out, None));
    }
    if t.n_cols < 2 {
        set_header_rows(&mut out, 0);
        return Ok((out, None));
    }
    let first_complete = (0..t.n_rows).find(|&r| is_complete_row(t, &grid, r));
    match first_complete {
        Some(k) if 2 * k < t.n_rows => {
            set_header_rows(&mut out, k + 1);
            Ok((out, None))
        }
        _ => {
            set_header_rows(&mut out, 0);
            Ok((out, Some(ReasonCode::HeaderUndetermined)))
        }
    }
}

/// Decide from the first row's text whether a two-column table has a
/// one-row column header. Other tables are returned unchanged.
pub fn infer_two_column_header(t: &TableAnnotation, opts: &PipelineOptions) -> TableAnnotation {
    let mut out = t.clone();
    if t.n_cols != 2 || t.n_rows < 2 {
        return out;
    }
    let glyphs = opts.currency_glyphs.as_str();
    let first: Vec<&str> = t
        .cells
        .iter()
        .filter(|c| c.row_start == 0 && !c.is_blank())
        .map(|c| c.text.as_str())
        .collect();
    let text_first_row = !first.is_empty() && first.iter().all(|s| !is_numeric_like(s, glyphs));
    let numeric_column = (0..2).any(|col| {
        let body: Vec<&str> = t
            .cells
            .iter()
            .filter(|c| c.row_start > 0 && c.col_start == col && c.col_end == col && !c.is_blank())
            .map(|c| c.text.as_str())
            .collect();
        let numeric = body.iter().filter(|s| is_numeric_like(s, glyphs)).count();
        !body.is_empty() && 2 * numeric > body.len()
    });
    let header_cells_fit = t.cells.iter().all(|c| c.row_start > 0 || c.row_end == 0);
    let n = usize::from(text_first_row && numeric_column && header_cells_fit);
    set_header_rows(&mut out, n);
    out
}
