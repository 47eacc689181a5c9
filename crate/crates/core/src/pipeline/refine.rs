//! Iterative refinement of row and column boxes around their words.

use std::collections::BTreeMap;

use crate::geometry::{tile_boundaries, union_all, BBox, Span};
use crate::model::{build_grid, Column, Row, TableAnnotation, Word};

use super::{effective_words, PipelineOptions, ReasonCode};

fn overlap(a: Span, b: Span) -> f64 {
    (a.hi.min(b.hi) - a.lo.max(b.lo)).max(0.0)
}

/// Owner of a grid position: the covering cell, or the bare position.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Owner {
    Cell(usize),
    Blank(usize, usize),
}

pub(crate) struct Geometry<'a> {
    pub rows: &'a [Span],
    pub cols: &'a [Span],
}

impl Geometry<'_> {
    /// Best grid position for a word plus whether the word is ambiguous:
    /// at least `threshold` of its area falls in each of two owners.
    fn place(&self, word: &BBox, owners: &[Owner], threshold: f64) -> (Option<(usize, usize)>, bool) {
        let (xs, ys) = (word.x_span(), word.y_span());
        let n_cols = self.cols.len();
        let mut best: Option<((usize, usize), f64)> = None;
        let mut per_owner: BTreeMap<Owner, f64> = BTreeMap::new();
        for (r, row) in self.rows.iter().enumerate() {
            let oy = overlap(ys, *row);
            if oy <= 0.0 {
                continue;
            }
            for (c, col) in self.cols.iter().enumerate() {
                let area = oy * overlap(xs, *col);
                if area <= 0.0 {
                    continue;
                }
                *per_owner.entry(owners[r * n_cols + c]).or_default() += area;
                if best.is_none_or(|(_, a)| area > a) {
                    best = Some(((r, c), area));
                }
            }
        }
        let word_area = word.area();
        let ambiguous =
            word_area > 0.0 && per_owner.values().filter(|&&a| a >= threshold * word_area).count() >= 2;
        (best.map(|(pos, _)| pos), ambiguous)
    }
}

fn owners(t: &TableAnnotation) -> Result<Vec<Owner>, ReasonCode> {
    let grid = build_grid(t).map_err(|_| ReasonCode::InvalidGrid)?;
    Ok((0..t.n_rows)
        .flat_map(|r| (0..t.n_cols).map(move |c| (r, c)))
        .map(|(r, c)| grid.cell_at(r, c).map_or(Owner::Blank(r, c), Owner::Cell))
        .collect())
}

fn tiles(extents: &[Span]) -> Result<Vec<Span>, ReasonCode> {
    let b = tile_boundaries(extents).ok_or(ReasonCode::InvertedOrder)?;
    Ok(b.windows(2).map(|w| Span::new(w[0], w[1])).collect())
}

/// Assign words to grid positions; fails on the first ambiguous word.
fn assign(
    words: &[Word],
    geo: &Geometry,
    owners: &[Owner],
    threshold: f64,
) -> Result<Vec<Option<(usize, usize)>>, ReasonCode> {
    words
        .iter()
        .map(|w| match geo.place(&w.bbox, owners, threshold) {
            (_, true) => Err(ReasonCode::AmbiguousWord),
            (pos, false) => Ok(pos),
        })
        .collect()
}

/// Shrink rows and columns to the words they hold and re-tile until the
/// boundaries stop moving. Cell boxes become the union of their words.
pub fn refine_boxes(t: &TableAnnotation, opts: &PipelineOptions) -> Result<TableAnnotation, ReasonCode> {
    if !t.has_row_boxes() || !t.has_column_boxes() {
        return Err(ReasonCode::UndefinedExtent);
    }
    let words = effective_words(t);
    let owners = owners(t)?;
    let spans_cols = |pos: usize| matches!(owners[pos], Owner::Cell(i) if t.cells[i].col_start != t.cells[i].col_end);
    let spans_rows = |pos: usize| matches!(owners[pos], Owner::Cell(i) if t.cells[i].row_start != t.cells[i].row_end);

    let mut rows: Vec<Span> = t.rows.iter().map(|r| r.bbox.unwrap().y_span()).collect();
    let mut cols: Vec<Span> = t.columns.iter().map(|c| c.bbox.unwrap().x_span()).collect();
    let n_cols = t.n_cols;
    let mut converged = None;
    for _ in 0..opts.iteration_cap.max(1) {
        let geo = Geometry { rows: &rows, cols: &cols };
        let placed = assign(&words, &geo, &owners, opts.word_overlap_threshold)?;

        let mut col_words: Vec<Option<Span>> = vec![None; t.n_cols];
        let mut row_words: Vec<Option<Span>> = vec![None; t.n_rows];
        for (w, pos) in words.iter().zip(&placed) {
            let Some((r, c)) = *pos else { continue };
            let p = r * n_cols + c;
            if !spans_cols(p) {
                let s = w.bbox.x_span();
                col_words[c] = Some(col_words[c].map_or(s, |a| a.union(&s)));
            }
            if !spans_rows(p) {
                let s = w.bbox.y_span();
                row_words[r] = Some(row_words[r].map_or(s, |a| a.union(&s)));
            }
        }
        let col_ext: Vec<Span> = col_words.iter().zip(&cols).map(|(w, old)| w.unwrap_or(*old)).collect();
        let row_ext: Vec<Span> = row_words.iter().zip(&rows).map(|(w, old)| w.unwrap_or(*old)).collect();
        let next_cols = tiles(&col_ext)?;
        let next_rows = tiles(&row_ext)?;
        if next_cols == cols && next_rows == rows {
            converged = Some(placed);
            break;
        }
        cols = next_cols;
        rows = next_rows;
    }
    let placed = converged.ok_or(ReasonCode::NoConvergence)?;

    let mut out = t.clone();
    let (x0, x1) = (cols[0].lo, cols[t.n_cols - 1].hi);
    let (y0, y1) = (rows[0].lo, rows[t.n_rows - 1].hi);
    out.rows = rows
        .iter()
        .zip(&t.rows)
        .map(|(s, r)| Row {
            bbox: Some(BBox::new(x0, s.lo, x1, s.hi)),
            is_column_header: r.is_column_header,
        })
        .collect();
    out.columns = cols
        .iter()
        .map(|s| Column {
            bbox: Some(BBox::new(s.lo, y0, s.hi, y1)),
        })
        .collect();
    for (i, cell) in out.cells.iter_mut().enumerate() {
        if cell.is_blank() {
            continue;
        }
        let mine = words.iter().zip(&placed).filter_map(|(w, pos)| {
            let (r, c) = (*pos)?;
            (owners[r * n_cols + c] == Owner::Cell(i)).then_some(&w.bbox)
        });
        if let Some(b) = union_all(mine) {
            cell.bbox = Some(b);
        }
    }
    Ok(out)
}
