//! Table similarity metrics: GriTS in three flavours, content adjacency
//! relations and exact match, plus corpus evaluation.
//!
//! All comparisons normalize text first (trimmed, whitespace runs collapsed).

mod corpus;
mod dar;
mod exact;
mod grits;

pub use corpus::{evaluate_corpus, format_metric_report, CorpusMetrics, MetricReport, TableMetrics, METRIC_HEADERS};
pub use dar::{adjacency_relations, dar_con, Direction, Relation};
pub use exact::{grits_exact, EXACT_MAX_DIM};
pub use grits::{grits, MAX_ROUNDS};

use serde::{Deserialize, Serialize};

use crate::geometry::BBox;
use crate::model::{GridEntry, GridError, RelExtent, TableGrid};
use crate::text::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellSimilarityKind {
    Content,
    Location,
    Topology,
}

impl CellSimilarityKind {
    pub const ALL: [CellSimilarityKind; 3] = [Self::Content, Self::Location, Self::Topology];
}

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("grid has no rows or no columns")]
    EmptyGrid,
    #[error("{rows}x{cols} grid is too large for exhaustive search (max {EXACT_MAX_DIM}x{EXACT_MAX_DIM})")]
    TooLarge { rows: usize, cols: usize },
    #[error("more than one prediction for table {0}")]
    DuplicatePrediction(String),
    #[error("more than one ground truth table with id {0}")]
    DuplicateGroundTruth(String),
    #[error("prediction {0} has no ground truth table")]
    UnmatchedPrediction(String),
    #[error("table {table_id}: {source}")]
    Grid { table_id: String, source: GridError },
}

/// A grid entry with its text already normalized and split into chars.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    chars: Vec<char>,
    bbox: Option<BBox>,
    rel: RelExtent,
}

impl Prepared {
    fn new(e: &GridEntry) -> Self {
        Prepared {
            chars: normalize(&e.text).chars().collect(),
            bbox: e.bbox,
            rel: e.rel_extent,
        }
    }
}

/// Row-major prepared entries of a grid.
pub(crate) fn prepare(g: &TableGrid) -> Vec<Prepared> {
    g.entries().iter().map(Prepared::new).collect()
}

pub(crate) fn prepared_similarity(kind: CellSimilarityKind, a: &Prepared, b: &Prepared) -> f64 {
    match kind {
        CellSimilarityKind::Content => {
            let total = a.chars.len() + b.chars.len();
            if total == 0 {
                return 1.0;
            }
            2.0 * crate::text::lcs_len(&a.chars, &b.chars) as f64 / total as f64
        }
        CellSimilarityKind::Location => match (a.bbox, b.bbox) {
            (None, None) => 1.0,
            (Some(x), Some(y)) => x.iou(&y),
            _ => 0.0,
        },
        CellSimilarityKind::Topology => {
            let inter = a.rel.intersection_area(&b.rel);
            let union = a.rel.area() + b.rel.area() - inter;
            inter as f64 / union as f64
        }
    }
}

/// Similarity of two grid entries in `[0, 1]`.
///
/// Content is the LCS ratio of the normalized texts; location is box IoU
/// (two boxless entries agree, one boxless entry scores 0); topology is the
/// IoU of the two relative span rectangles.
pub fn entry_similarity(kind: CellSimilarityKind, a: &GridEntry, b: &GridEntry) -> f64 {
    prepared_similarity(kind, &Prepared::new(a), &Prepared::new(b))
}

/// Same size, same normalized text and same relative extent everywhere.
/// Boxes are not compared.
pub fn exact_match(gt: &TableGrid, pred: &TableGrid) -> bool {
    gt.n_rows == pred.n_rows
        && gt.n_cols == pred.n_cols
        && gt
            .entries()
            .iter()
            .zip(pred.entries())
            .all(|(a, b)| a.rel_extent == b.rel_extent && normalize(&a.text) == normalize(&b.text))
}

/// Dense similarity lookup between every gt entry and every pred entry.
/// Falls back to computing on demand when the table would be too big.
pub(crate) struct SimTable<'a> {
    kind: CellSimilarityKind,
    gt: &'a [Prepared],
    pred: &'a [Prepared],
    cache: Option<Vec<f64>>,
}

const SIM_CACHE_LIMIT: usize = 1 << 22;

impl<'a> SimTable<'a> {
    pub(crate) fn new(kind: CellSimilarityKind, gt: &'a [Prepared], pred: &'a [Prepared]) -> Self {
        let n = gt.len() * pred.len();
        let cache = (n <= SIM_CACHE_LIMIT).then(|| {
            let mut v = Vec::with_capacity(n);
            for a in gt {
                for b in pred {
                    v.push(prepared_similarity(kind, a, b));
                }
            }
            v
        });
        SimTable { kind, gt, pred, cache }
    }

    /// Similarity between gt entry `i` and pred entry `j` (row-major indices).
    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        match &self.cache {
            Some(v) => v[i * self.pred.len() + j],
            None => prepared_similarity(self.kind, &self.gt[i], &self.pred[j]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(text: &str, bbox: Option<BBox>, rel: RelExtent) -> GridEntry {
        GridEntry {
            cell: Some(0),
            text: text.into(),
            bbox,
            rel_extent: rel,
        }
    }

    #[test]
    fn identical_entries_score_one() {
        let e = entry("Total", Some(BBox::new(0.0, 0.0, 5.0, 2.0)), RelExtent::default());
        for kind in CellSimilarityKind::ALL {
            assert_eq!(entry_similarity(kind, &e, &e), 1.0);
        }
    }

    #[test]
    fn content_lcs_ratio() {
        let a = entry("12", None, RelExtent::default());
        let b = entry("13", None, RelExtent::default());
        assert_eq!(entry_similarity(CellSimilarityKind::Content, &a, &b), 0.5);
        let blank = entry(" ", None, RelExtent::default());
        assert_eq!(entry_similarity(CellSimilarityKind::Content, &blank, &blank), 1.0);
        assert_eq!(entry_similarity(CellSimilarityKind::Content, &a, &blank), 0.0);
    }

    #[test]
    fn content_ignores_whitespace_layout() {
        let a = entry(" Net  income ", None, RelExtent::default());
        let b = entry("Net income", None, RelExtent::default());
        assert_eq!(entry_similarity(CellSimilarityKind::Content, &a, &b), 1.0);
    }

    #[test]
    fn location_boxless_rules() {
        let boxed = entry("", Some(BBox::new(0.0, 0.0, 2.0, 2.0)), RelExtent::default());
        let half = entry("", Some(BBox::new(1.0, 0.0, 3.0, 2.0)), RelExtent::default());
        let none = entry("", None, RelExtent::default());
        assert_eq!(entry_similarity(CellSimilarityKind::Location, &none, &none), 1.0);
        assert_eq!(entry_similarity(CellSimilarityKind::Location, &boxed, &none), 0.0);
        assert!((entry_similarity(CellSimilarityKind::Location, &boxed, &half) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn topology_span_rectangles() {
        let simple = entry("", None, RelExtent::default());
        let wide = entry(
            "",
            None,
            RelExtent {
                row_start: 0,
                row_end: 0,
                col_start: 0,
                col_end: 1,
            },
        );
        assert_eq!(entry_similarity(CellSimilarityKind::Topology, &simple, &wide), 0.5);
        assert_eq!(entry_similarity(CellSimilarityKind::Topology, &wide, &simple), 0.5);
    }

    #[test]
    fn exact_match_trims_and_checks_layout() {
        let a = TableGrid::from_texts(&[vec!["a", ""], vec!["c", "d"]]);
        let b = TableGrid::from_texts(&[vec!["a", " "], vec!["c", "d"]]);
        assert!(exact_match(&a, &b));
        let c = TableGrid::from_texts(&[vec!["a", "x"], vec!["c", "d"]]);
        assert!(!exact_match(&a, &c));
        let d = TableGrid::from_texts(&[vec!["a", ""]]);
        assert!(!exact_match(&a, &d));
    }
}
