//! Final quality control.

use std::collections::BTreeMap;

use crate::model::TableAnnotation;

use super::{effective_words, PipelineOptions, ReasonCode};

fn words_coincide(t: &TableAnnotation, opts: &PipelineOptions) -> bool {
    let words = effective_words(t);
    words.iter().all(|w| {
        let area = w.bbox.area();
        if area <= 0.0 {
            return true;
        }
        let mut best = 0.0f64;
        let mut heavy = 0;
        let mut per_cell: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, cell) in t.cells.iter().enumerate() {
            if let Some(b) = cell.bbox {
                let a = b.intersection_area(&w.bbox);
                if a > 0.0 {
                    per_cell.insert(i, a);
                }
            }
        }
        for &a in per_cell.values() {
            best = best.max(a);
            if a >= opts.word_overlap_threshold * area {
                heavy += 1;
            }
        }
        best > opts.word_coverage_threshold * area && heavy < 2
    })
}

/// Keep the table only if its words sit in exactly one cell each, it has
/// no projected row header at the top or bottom, and it has a body.
pub fn quality_control(t: &TableAnnotation, opts: &PipelineOptions) -> Result<(), ReasonCode> {
    if !words_coincide(t, opts) {
        return Err(ReasonCode::WordCellCoincidence);
    }
    let projected_in = |r: usize| {
        t.cells
            .iter()
            .any(|c| c.is_projected_row_header && (c.row_start..=c.row_end).contains(&r))
    };
    if projected_in(0) {
        return Err(ReasonCode::CaptionAsRow);
    }
    if projected_in(t.n_rows - 1) {
        return Err(ReasonCode::FooterAsRow);
    }
    let header = t.header_rows();
    if !header.is_empty() && header.len() >= t.n_rows {
        return Err(ReasonCode::HeaderOnly);
    }
    Ok(())
}
