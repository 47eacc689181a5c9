//! Completion of implicit labels: row and column boxes, and header labels
//! carried by the source markup.

use crate::geometry::{tile_boundaries, BBox, Span};
use crate::model::{Cell, Column, Row, TableAnnotation};

use super::ReasonCode;

#[derive(Clone, Copy)]
enum Axis {
    Rows,
    Cols,
}

impl Axis {
    fn range(self, c: &Cell) -> (usize, usize) {
        match self {
            Axis::Rows => (c.row_start, c.row_end),
            Axis::Cols => (c.col_start, c.col_end),
        }
    }

    fn span(self, b: &BBox) -> Span {
        match self {
            Axis::Rows => b.y_span(),
            Axis::Cols => b.x_span(),
        }
    }
}

/// Per-index extents along one axis. Cells confined to one index are the
/// primary evidence; spanning cells are sliced evenly as a fallback. Interior
/// indices with no evidence share the gap between their neighbours.
fn axis_extents(t: &TableAnnotation, axis: Axis, n: usize) -> Result<Vec<Span>, ReasonCode> {
    let boxed: Vec<(&Cell, Span)> = t
        .cells
        .iter()
        .filter(|c| !c.is_blank())
        .filter_map(|c| c.bbox.as_ref().map(|b| (c, axis.span(b))))
        .collect();
    let merge = |acc: Option<Span>, s: Span| Some(acc.map_or(s, |a| a.union(&s)));

    let mut ext: Vec<Option<Span>> = (0..n)
        .map(|i| {
            boxed
                .iter()
                .filter(|(c, _)| axis.range(c) == (i, i))
                .fold(None, |acc, (_, s)| merge(acc, *s))
        })
        .collect();
    for (i, slot) in ext.iter_mut().enumerate() {
        if slot.is_some() {
            continue;
        }
        *slot = boxed
            .iter()
            .filter(|(c, _)| {
                let (lo, hi) = axis.range(c);
                lo < hi && (lo..=hi).contains(&i)
            })
            .fold(None, |acc, (c, s)| {
                let (lo, hi) = axis.range(c);
                merge(acc, s.slice(i - lo, hi - lo + 1))
            });
    }

    let known: Vec<usize> = (0..n).filter(|&i| ext[i].is_some()).collect();
    if known.first() != Some(&0) || known.last() != Some(&(n - 1)) {
        return Err(ReasonCode::UndefinedExtent);
    }
    for pair in known.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b == a + 1 {
            continue;
        }
        let gap = Span::new(ext[a].unwrap().hi, ext[b].unwrap().lo);
        if gap.is_empty() {
            return Err(ReasonCode::UndefinedExtent);
        }
        let parts = b - a - 1;
        for (k, slot) in ext[a + 1..b].iter_mut().enumerate() {
            *slot = Some(gap.slice(k, parts));
        }
    }
    Ok(ext.into_iter().map(Option::unwrap).collect())
}

/// Give every row and column a box. Rows tile the table vertically and span
/// its full width; columns tile it horizontally and span its full height.
/// Header labels from the source markup are copied onto rows and cells.
pub fn complete_rows_columns(t: &TableAnnotation) -> Result<TableAnnotation, ReasonCode> {
    let rows = axis_extents(t, Axis::Rows, t.n_rows)?;
    let cols = axis_extents(t, Axis::Cols, t.n_cols)?;
    let rb = tile_boundaries(&rows).ok_or(ReasonCode::InvertedOrder)?;
    let cb = tile_boundaries(&cols).ok_or(ReasonCode::InvertedOrder)?;
    let (x0, x1) = (cb[0], cb[t.n_cols]);
    let (y0, y1) = (rb[0], rb[t.n_rows]);

    let mut out = t.clone();
    let header: Vec<bool> = (0..t.n_rows)
        .map(|r| {
            if t.markup_header_rows.is_empty() {
                t.rows.get(r).is_some_and(|row| row.is_column_header)
            } else {
                t.markup_header_rows.contains(&r)
            }
        })
        .collect();
    out.rows = (0..t.n_rows)
        .map(|r| Row {
            bbox: Some(BBox::new(x0, rb[r], x1, rb[r + 1])),
            is_column_header: header[r],
        })
        .collect();
    out.columns = (0..t.n_cols)
        .map(|c| Column {
            bbox: Some(BBox::new(cb[c], y0, cb[c + 1], y1)),
        })
        .collect();
    for cell in &mut out.cells {
        cell.is_column_header = (cell.row_start..=cell.row_end).all(|r| header[r]);
    }
    Ok(out)
}
