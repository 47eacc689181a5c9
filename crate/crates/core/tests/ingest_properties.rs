mod common;

use proptest::prelude::*;
use tablealign::ingest::{expand_html_structure, read_canonical, write_canonical};
use tablealign::pipeline::{complete_rows_columns, set_header_rows};
use tablealign::stats::dataset_stats;
use tablealign::{BBox, Cell, Extent, TableAnnotation};

/// Fill holes with 1x1 cells so the table can be written as HTML.
fn fill_holes(mut t: TableAnnotation) -> TableAnnotation {
    for r in 0..t.n_rows {
        for c in 0..t.n_cols {
            if !t.cells.iter().any(|cell| cell.extent().contains(r, c)) {
                t.cells.push(Cell::new(Extent::single(r, c), "", None));
            }
        }
    }
    t.cells.sort_by_key(|c| (c.row_start, c.col_start));
    t
}

fn html_tokens(t: &TableAnnotation) -> Vec<String> {
    let mut tokens = vec!["<tbody>".to_string()];
    for r in 0..t.n_rows {
        tokens.push("<tr>".into());
        for c in t.cells.iter().filter(|c| c.row_start == r) {
            let (rs, cs) = (c.row_end - c.row_start + 1, c.col_end - c.col_start + 1);
            if rs == 1 && cs == 1 {
                tokens.push("<td>".into());
            } else {
                tokens.push("<td".into());
                if rs > 1 {
                    tokens.push(format!(" rowspan=\"{rs}\""));
                }
                if cs > 1 {
                    tokens.push(format!(" colspan=\"{cs}\""));
                }
                tokens.push(">".into());
            }
            tokens.push("</td>".into());
        }
        tokens.push("</tr>".into());
    }
    tokens.push("</tbody>".into());
    tokens
}

/// Random tables with completed rows/columns, labels and off-grid boxes.
fn rich_table() -> impl Strategy<Value = TableAnnotation> {
    (common::arb_table(6, 6, "[ -~]{0,8}"), -1000.0f64..1000.0, 0.1f64..4.0, 0usize..3).prop_map(|(t, shift, k, h)| {
        let mut t = complete_rows_columns(&t).unwrap_or(t);
        common::add_words(&mut t);
        let n = h.min(t.n_rows);
        set_header_rows(&mut t, n);
        let f = |b: BBox| b.scale(k).translate(shift, shift / 3.0);
        for c in &mut t.cells {
            c.bbox = c.bbox.map(f);
        }
        for w in &mut t.words {
            w.bbox = f(w.bbox);
        }
        t
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn html_placement_matches_layout(t in common::arb_table(6, 6, "x")) {
        let t = fill_holes(t);
        let s = expand_html_structure(&html_tokens(&t)).unwrap();
        prop_assert_eq!((s.n_rows, s.n_cols), (t.n_rows, t.n_cols));
        let got: Vec<Extent> = s.cells.iter().map(|c| c.extent).collect();
        let want: Vec<Extent> = t.cells.iter().map(|c| c.extent()).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn canonical_round_trip(tables in prop::collection::vec(rich_table(), 1..4)) {
        let mut buf = Vec::new();
        write_canonical(&mut buf, &tables).unwrap();
        let back = read_canonical(buf.as_slice()).unwrap();
        prop_assert_eq!(back, tables);
    }

    #[test]
    fn flip_is_an_involution(x0 in -1e4f64..1e4, y0 in -1e4f64..1e4, w in 0.0f64..500.0, h in 0.0f64..500.0, page in 0.0f64..2e4) {
        let b = BBox::new(x0, y0, x0 + w, y0 + h);
        let back = b.flip_y(page).flip_y(page);
        prop_assert!((back.y_min - b.y_min).abs() <= 1e-9 * page.max(1.0));
        prop_assert!((back.y_max - b.y_max).abs() <= 1e-9 * page.max(1.0));
        prop_assert_eq!((back.x_min, back.x_max), (b.x_min, b.x_max));
    }

    #[test]
    fn stats_ignore_table_order(mut tables in prop::collection::vec(common::arb_table(4, 4, "x"), 1..12)) {
        let before = dataset_stats(&tables).unwrap();
        tables.reverse();
        prop_assert_eq!(dataset_stats(&tables).unwrap(), before);
    }

    #[test]
    fn known_topology_raises_ratio(tables in prop::collection::vec(common::arb_table(4, 4, "x"), 1..12), pick in any::<prop::sample::Index>()) {
        let before = dataset_stats(&tables).unwrap();
        let mut more = tables.clone();
        let mut copy = tables[pick.index(tables.len())].clone();
        copy.table_id.push_str("-copy");
        more.push(copy);
        let after = dataset_stats(&more).unwrap();
        prop_assert_eq!(after.n_unique_topologies, before.n_unique_topologies);
        prop_assert!(after.avg_tables_per_topology > before.avg_tables_per_topology);
    }
}
