//! Canonical form of spans in the header and in projected row headers.

use std::collections::BTreeSet;

use crate::geometry::union_all;
use crate::model::{build_grid, Extent, TableAnnotation, TableGrid};

use super::headers::is_projected_row_header_row;
use super::ReasonCode;

/// Grow cell `target` to `extent`, absorbing the blank cells inside it.
fn absorb(t: &mut TableAnnotation, target: usize, extent: Extent) -> Result<(), ReasonCode> {
    let mut absorbed = Vec::new();
    for (i, c) in t.cells.iter().enumerate() {
        if i == target {
            continue;
        }
        let e = c.extent();
        let overlaps = e.row_start <= extent.row_end
            && extent.row_start <= e.row_end
            && e.col_start <= extent.col_end
            && extent.col_start <= e.col_end;
        if !overlaps {
            continue;
        }
        let inside = extent.contains(e.row_start, e.col_start) && extent.contains(e.row_end, e.col_end);
        if !c.is_blank() || !inside {
            return Err(ReasonCode::CanonicalizationConflict);
        }
        absorbed.push(i);
    }
    let boxes: Vec<_> = absorbed.iter().filter_map(|&i| t.cells[i].bbox).collect();
    let cell = &mut t.cells[target];
    cell.bbox = union_all(cell.bbox.iter().chain(&boxes));
    cell.set_extent(extent);
    for i in absorbed.into_iter().rev() {
        t.cells.remove(i);
    }
    Ok(())
}

/// Position is blank and, if covered, only by a blank cell inside `within`.
fn blank_within(t: &TableAnnotation, grid: &TableGrid, r: usize, c: usize, within: Extent) -> bool {
    match grid.cell_at(r, c) {
        None => true,
        Some(ci) => {
            let e = t.cells[ci].extent();
            t.cells[ci].is_blank() && within.contains(e.row_start, e.col_start) && within.contains(e.row_end, e.col_end)
        }
    }
}

/// R1: a blank header region right beneath a multi-column header cell joins it.
fn beneath_spanning_header(t: &TableAnnotation, grid: &TableGrid, header: &BTreeSet<usize>) -> Option<(usize, Extent)> {
    t.cells.iter().enumerate().find_map(|(i, cell)| {
        let r = cell.row_end + 1;
        let in_header = (cell.row_start..=r).all(|row| header.contains(&row));
        if cell.col_start == cell.col_end || cell.is_blank() || !in_header || r >= t.n_rows {
            return None;
        }
        let region = Extent::new(r, r, cell.col_start, cell.col_end);
        let blank = region.positions().all(|(row, col)| blank_within(t, grid, row, col, region));
        blank.then(|| (i, Extent::new(cell.row_start, r, cell.col_start, cell.col_end)))
    })
}

/// R2: a blank header position whose left neighbour shares a covering cell
/// above with it joins the left neighbour.
fn leftward_under_shared_parent(
    t: &TableAnnotation,
    grid: &TableGrid,
    header: &BTreeSet<usize>,
) -> Option<(usize, Extent)> {
    for &r in header.iter().filter(|&&r| r > 0 && r < t.n_rows) {
        if !header.contains(&(r - 1)) {
            continue;
        }
        for c in 1..t.n_cols {
            if !blank_within(t, grid, r, c, Extent::single(r, c)) {
                continue;
            }
            let Some(li) = grid.cell_at(r, c - 1) else { continue };
            let left = &t.cells[li];
            if left.is_blank() || left.row_start != r || left.row_end != r || left.col_end != c - 1 {
                continue;
            }
            let above = (grid.cell_at(r - 1, c - 1), grid.cell_at(r - 1, c));
            if matches!(above, (Some(a), Some(b)) if a == b) {
                return Some((li, Extent::new(r, r, left.col_start, c)));
            }
        }
    }
    None
}

/// R3: the content cell of a projected row header row spans the full width.
fn projected_to_full_width(t: &TableAnnotation, grid: &TableGrid) -> Option<(usize, Extent)> {
    (0..t.n_rows)
        .filter(|&r| is_projected_row_header_row(t, grid, r))
        .find_map(|r| {
            let ci = (0..t.n_cols).find_map(|c| grid.cell_at(r, c).filter(|&ci| !t.cells[ci].is_blank()))?;
            let cell = &t.cells[ci];
            let full = Extent::new(r, r, 0, t.n_cols - 1);
            let needs_flag = !cell.is_projected_row_header;
            (cell.extent() != full || needs_flag).then_some((ci, full))
        })
}

/// Bring the annotation into canonical form. Two-column tables are only kept
/// when a column header was established for them by the two-column rule.
pub fn canonicalize(t: &TableAnnotation, two_column_rule: bool) -> Result<TableAnnotation, ReasonCode> {
    let header: BTreeSet<usize> = t.header_rows().into_iter().collect();
    if t.n_cols == 2 && (!two_column_rule || header.is_empty()) {
        return Err(ReasonCode::TwoColumnAmbiguous);
    }
    let mut out = t.clone();
    // Each edit strictly reduces the cell count or sets a flag, so this ends.
    loop {
        let grid = build_grid(&out).map_err(|_| ReasonCode::InvalidGrid)?;
        let edit = beneath_spanning_header(&out, &grid, &header)
            .map(|e| (e, false))
            .or_else(|| leftward_under_shared_parent(&out, &grid, &header).map(|e| (e, false)))
            .or_else(|| projected_to_full_width(&out, &grid).map(|e| (e, true)));
        let Some(((ci, extent), projected)) = edit else { break };
        absorb(&mut out, ci, extent)?;
        let idx = out.cells.iter().position(|c| c.extent() == extent).unwrap();
        let cell = &mut out.cells[idx];
        cell.is_column_header = (cell.row_start..=cell.row_end).all(|r| header.contains(&r));
        if projected {
            cell.is_projected_row_header = true;
        }
    }
    out.validate().map_err(|_| ReasonCode::CanonicalizationConflict)?;
    Ok(out)
}
