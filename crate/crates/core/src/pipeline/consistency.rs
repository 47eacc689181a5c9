//! Consistency adjustments: dot leaders, empty rows and columns, split
//! header rows and currency-only columns.

use std::collections::BTreeSet;

use crate::geometry::{union_all, Span};
use crate::model::{build_grid, slot_words, Cell, Row, TableAnnotation, Word};
use crate::text::{is_currency_only, leader_dots, strip_leader_text};

use super::{PipelineOptions, ReasonCode};

/// Word indices in reading order: lines top to bottom, words left to right.
fn reading_order(words: &[Word], mut idx: Vec<usize>) -> Vec<usize> {
    idx.sort_by(|&a, &b| {
        let (a, b) = (&words[a].bbox, &words[b].bbox);
        a.center_y().total_cmp(&b.center_y()).then(a.x_min.total_cmp(&b.x_min))
    });
    let mut lines: Vec<(Span, Vec<usize>)> = Vec::new();
    for i in idx {
        let b = &words[i].bbox;
        match lines.last_mut() {
            Some((span, line)) if b.center_y() <= span.hi => {
                *span = span.union(&b.y_span());
                line.push(i);
            }
            _ => lines.push((b.y_span(), vec![i])),
        }
    }
    lines
        .into_iter()
        .flat_map(|(_, mut line)| {
            line.sort_by(|&a, &b| words[a].bbox.x_min.total_cmp(&words[b].bbox.x_min).then(a.cmp(&b)));
            line
        })
        .collect()
}

/// Indices of leader tokens at the start and end of an ordered word list.
fn edge_leaders(words: &[Word], ordered: &[usize], min_dots: usize) -> Vec<usize> {
    let run = |it: &mut dyn Iterator<Item = &usize>| -> Vec<usize> {
        let mut dots = 0;
        let mut taken = Vec::new();
        for &i in it {
            match leader_dots(&words[i].text) {
                Some(n) => {
                    dots += n;
                    taken.push(i);
                }
                None => break,
            }
        }
        if dots >= min_dots {
            taken
        } else {
            Vec::new()
        }
    };
    let mut out = run(&mut ordered.iter());
    if out.len() < ordered.len() {
        out.extend(run(&mut ordered.iter().rev()));
    }
    out
}

/// Exclude dot leaders at the edges of each cell from its text, its words
/// and its box. Boxes only ever shrink.
pub fn strip_dot_leaders(t: &TableAnnotation, opts: &PipelineOptions) -> Result<TableAnnotation, ReasonCode> {
    let min_dots = opts.dot_leader_min_dots.max(1);
    let slots = slot_words(&t.cells, &t.words);
    let mut drop = vec![false; t.words.len()];
    let mut out = t.clone();
    for (ci, cell) in out.cells.iter_mut().enumerate() {
        if cell.is_blank() {
            continue;
        }
        let mine: Vec<usize> = (0..t.words.len()).filter(|&w| slots[w] == Some(ci)).collect();
        let ordered = reading_order(&t.words, mine);
        let leaders = edge_leaders(&t.words, &ordered, min_dots);
        let text = strip_leader_text(&cell.text, min_dots);
        if leaders.is_empty() && text == cell.text {
            continue;
        }
        if crate::text::is_blank(&text) {
            return Err(ReasonCode::LeaderAmbiguity);
        }
        cell.text = text;
        if !leaders.is_empty() {
            for &i in &leaders {
                drop[i] = true;
            }
            let kept = ordered.iter().filter(|i| !leaders.contains(i)).map(|&i| &t.words[i].bbox);
            if let (Some(words), Some(old)) = (union_all(kept), cell.bbox) {
                if let Some(b) = words.intersection(&old) {
                    cell.bbox = Some(b);
                }
            }
        }
    }
    out.words = t
        .words
        .iter()
        .zip(&drop)
        .filter(|(_, d)| !**d)
        .map(|(w, _)| w.clone())
        .collect();
    Ok(out)
}

fn compact(n: usize, keep: &[bool]) -> Vec<Option<usize>> {
    let mut next = 0;
    (0..n)
        .map(|i| {
            keep[i].then(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

/// Map an inclusive range through a compaction; `None` if nothing survives.
fn remap(map: &[Option<usize>], lo: usize, hi: usize) -> Option<(usize, usize)> {
    let mut kept = map[lo..=hi].iter().flatten();
    let first = *kept.next()?;
    let last = kept.last().copied().unwrap_or(first);
    Some((first, last))
}

/// Delete rows and columns whose every grid position is blank.
pub fn remove_empty_rows_columns(t: &TableAnnotation) -> Result<TableAnnotation, ReasonCode> {
    let grid = build_grid(t).map_err(|_| ReasonCode::InvalidGrid)?;
    let keep_rows: Vec<bool> = (0..t.n_rows).map(|r| !grid.row_is_blank(r)).collect();
    let keep_cols: Vec<bool> = (0..t.n_cols).map(|c| !grid.col_is_blank(c)).collect();
    if !keep_rows.contains(&true) || !keep_cols.contains(&true) {
        return Err(ReasonCode::AllEmpty);
    }
    if !keep_rows.contains(&false) && !keep_cols.contains(&false) {
        return Ok(t.clone());
    }
    let row_map = compact(t.n_rows, &keep_rows);
    let col_map = compact(t.n_cols, &keep_cols);

    let mut out = t.clone();
    out.n_rows = keep_rows.iter().filter(|k| **k).count();
    out.n_cols = keep_cols.iter().filter(|k| **k).count();
    out.cells = t
        .cells
        .iter()
        .filter_map(|c| {
            let (rs, re) = remap(&row_map, c.row_start, c.row_end)?;
            let (cs, ce) = remap(&col_map, c.col_start, c.col_end)?;
            let mut c = c.clone();
            (c.row_start, c.row_end, c.col_start, c.col_end) = (rs, re, cs, ce);
            Some(c)
        })
        .collect();
    if t.rows.len() == t.n_rows {
        out.rows = t.rows.iter().zip(&keep_rows).filter(|(_, k)| **k).map(|(r, _)| r.clone()).collect();
    }
    if t.columns.len() == t.n_cols {
        out.columns = t.columns.iter().zip(&keep_cols).filter(|(_, k)| **k).map(|(c, _)| c.clone()).collect();
    }
    out.markup_header_rows = t.markup_header_rows.iter().filter_map(|&r| row_map.get(r).copied().flatten()).collect();
    Ok(out)
}

/// Header rows as seen by the consistency step: source markup when present,
/// otherwise the row labels.
pub(crate) fn consistency_header_rows(t: &TableAnnotation) -> BTreeSet<usize> {
    if t.markup_header_rows.is_empty() {
        t.header_rows().into_iter().collect()
    } else {
        t.markup_header_rows.iter().copied().collect()
    }
}

/// Column ranges partitioning a row: cells touching it plus uncovered columns.
fn partition(t: &TableAnnotation, row: usize) -> Vec<(usize, usize)> {
    let mut parts: Vec<(usize, usize)> = t
        .cells
        .iter()
        .filter(|c| (c.row_start..=c.row_end).contains(&row))
        .map(|c| (c.col_start, c.col_end))
        .collect();
    for col in 0..t.n_cols {
        if !parts.iter().any(|&(lo, hi)| (lo..=hi).contains(&col)) {
            parts.push((col, col));
        }
    }
    parts.sort_unstable();
    parts
}

fn mergeable(t: &TableAnnotation, r: usize) -> bool {
    let confined = t
        .cells
        .iter()
        .filter(|c| c.row_end >= r && c.row_start <= r + 1)
        .all(|c| c.row_start >= r && c.row_end <= r + 1);
    confined && partition(t, r) == partition(t, r + 1)
}

fn join_text(top: &str, bottom: &str) -> String {
    match (top.trim().is_empty(), bottom.trim().is_empty()) {
        (true, _) => bottom.to_string(),
        (_, true) => top.to_string(),
        _ => format!("{top} {bottom}"),
    }
}

fn merge_rows(t: &mut TableAnnotation, r: usize) {
    let mut cells: Vec<Cell> = Vec::with_capacity(t.cells.len());
    let mut bottoms: Vec<Cell> = Vec::new();
    for c in t.cells.drain(..) {
        if c.row_start == r + 1 && c.row_end == r + 1 {
            bottoms.push(c);
        } else {
            cells.push(c);
        }
    }
    for mut b in bottoms {
        let top = cells
            .iter_mut()
            .find(|c| c.row_start == r && c.row_end == r && (c.col_start, c.col_end) == (b.col_start, b.col_end));
        match top {
            Some(top) => {
                top.text = join_text(&top.text, &b.text);
                top.bbox = union_all(top.bbox.iter().chain(b.bbox.iter()));
                top.is_column_header |= b.is_column_header;
                top.is_projected_row_header |= b.is_projected_row_header;
            }
            None => {
                b.row_start = r;
                b.row_end = r;
                cells.push(b);
            }
        }
    }
    for c in &mut cells {
        if c.row_start > r + 1 {
            c.row_start -= 1;
        }
        if c.row_end > r {
            c.row_end -= 1;
        }
    }
    t.cells = cells;
    if t.rows.len() == t.n_rows {
        let lower = t.rows.remove(r + 1);
        let upper: &mut Row = &mut t.rows[r];
        upper.bbox = union_all(upper.bbox.iter().chain(lower.bbox.iter()));
        upper.is_column_header |= lower.is_column_header;
    }
    t.markup_header_rows = t
        .markup_header_rows
        .iter()
        .filter(|&&h| h != r + 1)
        .map(|&h| if h > r + 1 { h - 1 } else { h })
        .collect();
    t.n_rows -= 1;
}

/// Merge adjacent header rows whose cells span the same columns. Paired
/// cells join their text top first and union their boxes.
pub fn merge_adjacent_header_rows(t: &TableAnnotation) -> TableAnnotation {
    let mut out = t.clone();
    loop {
        let header = consistency_header_rows(&out);
        let next = header
            .iter()
            .copied()
            .find(|&r| r + 1 < out.n_rows && header.contains(&(r + 1)) && mergeable(&out, r));
        match next {
            Some(r) => merge_rows(&mut out, r),
            None => return out,
        }
    }
}

/// Remove tables with a body column holding nothing but currency glyphs.
pub fn detect_currency_column(t: &TableAnnotation, opts: &PipelineOptions) -> Result<(), ReasonCode> {
    let header = consistency_header_rows(t);
    let is_header = |c: &Cell| c.is_column_header || (c.row_start..=c.row_end).all(|r| header.contains(&r));
    for col in 0..t.n_cols {
        let mut body = t
            .cells
            .iter()
            .filter(|c| c.col_start == col && c.col_end == col && !c.is_blank() && !is_header(c))
            .peekable();
        if body.peek().is_some() && body.all(|c| is_currency_only(&c.text, &opts.currency_glyphs)) {
            return Err(ReasonCode::CurrencySplitColumn);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BBox;
    use crate::model::{Extent, Split};
    use crate::pipeline::fixtures::{lattice, word_box};

    fn opts() -> PipelineOptions {
        PipelineOptions::default()
    }

    fn leader_cell(tokens: &[&str]) -> TableAnnotation {
        let mut t = lattice("t", &[&["", "1"]]);
        let n = tokens.len();
        let boxes: Vec<BBox> = (0..n).map(|k| word_box(0, 0, k, n)).collect();
        t.cells.push(Cell::new(Extent::single(0, 0), tokens.join(" "), union_all(&boxes)));
        for (tok, b) in tokens.iter().zip(boxes) {
            t.words.push(Word::new(*tok, b));
        }
        t
    }

    #[test]
    fn trailing_leader_word_removed() {
        let t = leader_cell(&["Revenue", "......"]);
        let out = strip_dot_leaders(&t, &opts()).unwrap();
        let cell = &out.cells[1];
        assert_eq!(cell.text, "Revenue");
        assert_eq!(cell.bbox, Some(word_box(0, 0, 0, 2)));
        assert!(out.words.iter().all(|w| w.text != "......"));
    }

    #[test]
    fn separate_period_tokens_form_one_run() {
        let t = leader_cell(&["Net", "income", ".", ".", "."]);
        let out = strip_dot_leaders(&t, &opts()).unwrap();
        assert_eq!(out.cells[1].text, "Net income");
        assert_eq!(out.words.len(), 3);
        let two = leader_cell(&["Net", ".", "."]);
        assert_eq!(strip_dot_leaders(&two, &opts()).unwrap(), two);
    }

    #[test]
    fn numeric_dots_untouched() {
        let t = lattice("t", &[&["a", "3.5"]]);
        assert_eq!(strip_dot_leaders(&t, &opts()).unwrap(), t);
    }

    #[test]
    fn leader_only_cell_is_ambiguous() {
        let t = leader_cell(&["......"]);
        assert_eq!(strip_dot_leaders(&t, &opts()), Err(ReasonCode::LeaderAmbiguity));
    }

    #[test]
    fn leading_leader_removed() {
        let t = leader_cell(&["...", "Total"]);
        let out = strip_dot_leaders(&t, &opts()).unwrap();
        assert_eq!(out.cells[1].text, "Total");
        assert_eq!(out.cells[1].bbox, Some(word_box(0, 0, 1, 2)));
    }

    #[test]
    fn middle_empty_row_removed() {
        let t = lattice("t", &[&["a", "b"], &["", ""], &["c", "d"]]);
        let out = remove_empty_rows_columns(&t).unwrap();
        assert_eq!((out.n_rows, out.n_cols), (2, 2));
        let rows: Vec<usize> = out.cells.iter().map(|c| c.row_start).collect();
        assert_eq!(rows, vec![0, 0, 1, 1]);
        assert_eq!(remove_empty_rows_columns(&out).unwrap(), out);
    }

    #[test]
    fn span_shrinks_over_deleted_row() {
        let mut t = TableAnnotation::new("t", Split::Test, 4, 2);
        t.cells = vec![
            Cell::new(Extent::new(0, 2, 0, 0), "", None),
            Cell::new(Extent::single(0, 1), "a", None),
            Cell::new(Extent::single(2, 1), "b", None),
            Cell::new(Extent::single(3, 0), "x", None),
            Cell::new(Extent::single(3, 1), "c", None),
        ];
        let out = remove_empty_rows_columns(&t).unwrap();
        assert_eq!((out.n_rows, out.n_cols), (3, 2));
        assert_eq!(out.cells[0].extent(), Extent::new(0, 1, 0, 0));
        assert_eq!(out.cells[3].extent(), Extent::single(2, 0));
    }

    #[test]
    fn all_blank_is_all_empty() {
        let t = lattice("t", &[&["", ""]]);
        assert_eq!(remove_empty_rows_columns(&t), Err(ReasonCode::AllEmpty));
    }

    #[test]
    fn full_width_header_rows_merge() {
        let mut t = TableAnnotation::new("t", Split::Train, 3, 2);
        t.cells = vec![
            Cell::new(Extent::new(0, 0, 0, 1), "Year", Some(BBox::new(0.0, 0.0, 20.0, 10.0))),
            Cell::new(Extent::new(1, 1, 0, 1), "2013", Some(BBox::new(0.0, 12.0, 20.0, 22.0))),
            Cell::new(Extent::single(2, 0), "a", None),
            Cell::new(Extent::single(2, 1), "1", None),
        ];
        t.markup_header_rows = vec![0, 1];
        let out = merge_adjacent_header_rows(&t);
        assert_eq!(out.n_rows, 2);
        assert_eq!(out.cells[0].text, "Year 2013");
        assert_eq!(out.cells[0].bbox, Some(BBox::new(0.0, 0.0, 20.0, 22.0)));
        assert_eq!(out.markup_header_rows, vec![0]);
        assert_eq!(out.cells[1].row_start, 1);
        assert_eq!(merge_adjacent_header_rows(&out), out);
    }

    #[test]
    fn differing_header_spans_do_not_merge() {
        let mut t = TableAnnotation::new("t", Split::Train, 3, 2);
        t.cells = vec![
            Cell::new(Extent::new(0, 0, 0, 1), "Year", None),
            Cell::new(Extent::single(1, 0), "2012", None),
            Cell::new(Extent::single(1, 1), "2013", None),
            Cell::new(Extent::single(2, 0), "1", None),
        ];
        t.markup_header_rows = vec![0, 1];
        assert_eq!(merge_adjacent_header_rows(&t), t);
    }

    #[test]
    fn body_rows_never_merge() {
        let t = lattice("t", &[&["h", "h"], &["a", "b"], &["c", "d"]]);
        assert_eq!(merge_adjacent_header_rows(&t), t);
    }

    #[test]
    fn dollar_column_detected() {
        let t = lattice("t", &[&["", "", "2019"], &["Sales", "$", "10"], &["Cost", "$", "4"]]);
        let mut t = t;
        t.markup_header_rows = vec![0];
        assert_eq!(detect_currency_column(&t, &opts()), Err(ReasonCode::CurrencySplitColumn));
        let attached = lattice("t", &[&["Sales", "$1,200"], &["Cost", "$4"]]);
        assert_eq!(detect_currency_column(&attached, &opts()), Ok(()));
        let empty_col = lattice("t", &[&["Sales", "", "1"], &["Cost", "", "4"]]);
        assert_eq!(detect_currency_column(&empty_col, &opts()), Ok(()));
    }
}
