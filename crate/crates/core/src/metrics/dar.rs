//! Directed adjacency relations keyed by cell content.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::TableGrid;
use crate::text::normalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Right,
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Relation {
    pub from: String,
    pub to: String,
    pub direction: Direction,
}

/// Every non-blank cell paired with its nearest non-blank neighbours to the
/// right and below. Blank positions are skipped over; a spanning cell scans
/// from each row (column) it covers, and each distinct neighbour counts once.
pub fn adjacency_relations(g: &TableGrid) -> Vec<Relation> {
    let mut out = Vec::new();
    let nonblank = |r: usize, c: usize| {
        let e = g.get(r, c);
        if e.is_blank() {
            None
        } else {
            e.cell
        }
    };
    for (id, e) in g.cell_extents() {
        let text = &g.get(e.row_start, e.col_start).text;
        if crate::text::is_blank(text) {
            continue;
        }
        let from = normalize(text);
        // Neighbour cell id -> one position of it, so each neighbour counts once.
        let mut right = BTreeMap::new();
        for r in e.row_start..=e.row_end {
            if let Some((c, n)) = (e.col_end + 1..g.n_cols).find_map(|c| nonblank(r, c).map(|n| (c, n))) {
                right.entry(n).or_insert((r, c));
            }
        }
        let mut down = BTreeMap::new();
        for c in e.col_start..=e.col_end {
            if let Some((r, n)) = (e.row_end + 1..g.n_rows).find_map(|r| nonblank(r, c).map(|n| (r, n))) {
                down.entry(n).or_insert((r, c));
            }
        }
        for (found, direction) in [(right, Direction::Right), (down, Direction::Down)] {
            for (n, (r, c)) in found {
                if n != id {
                    out.push(Relation {
                        from: from.clone(),
                        to: normalize(&g.get(r, c).text),
                        direction,
                    });
                }
            }
        }
    }
    out
}

fn multiset(rels: Vec<Relation>) -> BTreeMap<Relation, usize> {
    let mut m = BTreeMap::new();
    for r in rels {
        *m.entry(r).or_insert(0) += 1;
    }
    m
}

/// F1 between the content-keyed relation multisets of the two grids. Two
/// grids without relations agree fully; one empty side scores 0.
pub fn dar_con(gt: &TableGrid, pred: &TableGrid) -> f64 {
    let (a, b) = (adjacency_relations(gt), adjacency_relations(pred));
    let total = a.len() + b.len();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (ma, mb) = (multiset(a), multiset(b));
    let matched: usize = ma.iter().map(|(k, n)| (*n).min(mb.get(k).copied().unwrap_or(0))).sum();
    2.0 * matched as f64 / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_grid, Cell, Extent, Split, TableAnnotation};

    fn g(rows: &[&[&str]]) -> TableGrid {
        TableGrid::from_texts(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn rel(from: &str, to: &str, direction: Direction) -> Relation {
        Relation {
            from: from.into(),
            to: to.into(),
            direction,
        }
    }

    #[test]
    fn four_relations_in_two_by_two() {
        let mut rels = adjacency_relations(&g(&[&["A", "B"], &["C", "D"]]));
        rels.sort();
        assert_eq!(
            rels,
            [
                rel("A", "B", Direction::Right),
                rel("A", "C", Direction::Down),
                rel("B", "D", Direction::Down),
                rel("C", "D", Direction::Right),
            ]
        );
    }

    #[test]
    fn identical_and_one_changed() {
        let gt = g(&[&["A", "B"], &["C", "D"]]);
        assert_eq!(dar_con(&gt, &gt), 1.0);
        let pred = g(&[&["A", "B"], &["C", "D'"]]);
        assert_eq!(dar_con(&gt, &pred), 0.5);
    }

    #[test]
    fn blank_is_skipped() {
        assert_eq!(adjacency_relations(&g(&[&["A", "", "B"]])), [rel("A", "B", Direction::Right)]);
    }

    #[test]
    fn spanning_cell_counts_each_neighbour_once() {
        let mut t = TableAnnotation::new("t", Split::Test, 2, 2);
        t.cells = vec![
            Cell::new(Extent::new(0, 1, 0, 0), "S", None),
            Cell::new(Extent::new(0, 1, 1, 1), "T", None),
        ];
        let grid = build_grid(&t).unwrap();
        assert_eq!(adjacency_relations(&grid), [rel("S", "T", Direction::Right)]);
    }

    #[test]
    fn empty_relation_sets() {
        let lone = g(&[&["A"]]);
        assert_eq!(dar_con(&lone, &lone), 1.0);
        assert_eq!(dar_con(&lone, &g(&[&["A", "B"]])), 0.0);
    }
}
