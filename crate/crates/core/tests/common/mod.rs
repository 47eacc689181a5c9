//! Random and hand-made tables shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use tablealign::{BBox, Cell, Extent, Split, TableAnnotation, Word};

pub const COL_WIDTH: f64 = 40.0;
pub const ROW_HEIGHT: f64 = 12.0;

/// Lay cells out over an `n_rows x n_cols` grid. `choices` drives spans and
/// holes, `texts` supplies content; both are indexed by grid position.
pub fn build_table(id: &str, n_rows: usize, n_cols: usize, choices: &[u8], texts: &[String]) -> TableAnnotation {
    let mut t = TableAnnotation::new(id, Split::Test, n_rows, n_cols);
    let mut covered = vec![false; n_rows * n_cols];
    for r in 0..n_rows {
        for c in 0..n_cols {
            let k = r * n_cols + c;
            if covered[k] {
                continue;
            }
            let pick = |i: usize| choices[(3 * k + i) % choices.len()];
            if pick(0) % 7 == 0 {
                continue;
            }
            let mut width = 1 + usize::from(pick(1) % 4 == 0) + usize::from(pick(1) % 16 == 0);
            while width > 1 && (c + width > n_cols || (c..c + width).any(|x| covered[r * n_cols + x])) {
                width -= 1;
            }
            let mut height = 1 + usize::from(pick(2) % 5 == 0);
            while height > 1
                && (r + height > n_rows || (r..r + height).any(|y| (c..c + width).any(|x| covered[y * n_cols + x])))
            {
                height -= 1;
            }
            let e = Extent::new(r, r + height - 1, c, c + width - 1);
            for (y, x) in e.positions() {
                covered[y * n_cols + x] = true;
            }
            let jitter = f64::from(pick(0) % 5);
            let bbox = BBox::new(
                c as f64 * COL_WIDTH + 2.0 + jitter,
                r as f64 * ROW_HEIGHT + 1.0,
                (c + width) as f64 * COL_WIDTH - 2.0,
                (r + height) as f64 * ROW_HEIGHT - 1.0 - jitter / 5.0,
            );
            t.cells.push(Cell::new(e, texts[k % texts.len()].clone(), Some(bbox)));
        }
    }
    t
}

/// Random valid tables up to `max_rows x max_cols` with texts drawn from
/// `text_pattern`.
pub fn arb_table(max_rows: usize, max_cols: usize, text_pattern: &'static str) -> impl Strategy<Value = TableAnnotation> {
    let n = max_rows * max_cols;
    (
        1..=max_rows,
        1..=max_cols,
        prop::collection::vec(any::<u8>(), 3 * n),
        prop::collection::vec(text_pattern, n),
        0u32..1_000_000,
    )
        .prop_map(|(r, c, choices, texts, id)| build_table(&format!("rand-{id:06}"), r, c, &choices, &texts))
}

/// `count` deterministic samples of a strategy.
pub fn sample<S: Strategy>(strategy: S, count: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy").current())
        .collect()
}

/// Give every non-blank cell one word per whitespace token, laid out left to
/// right inside its box.
pub fn add_words(t: &mut TableAnnotation) {
    let mut words = Vec::new();
    for cell in &t.cells {
        let (Some(b), false) = (cell.bbox, cell.is_blank()) else { continue };
        let tokens: Vec<&str> = cell.text.split_whitespace().collect();
        let step = (b.x_max - b.x_min) / tokens.len() as f64;
        for (i, tok) in tokens.iter().enumerate() {
            let x0 = b.x_min + i as f64 * step;
            words.push(Word::new(*tok, BBox::new(x0, b.y_min, x0 + step * 0.8, b.y_max)));
        }
    }
    t.words = words;
}

pub fn fixture_dir(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

/// Load a fixture dataset through its manifest.
pub fn load_fixture(name: &str) -> tablealign::ingest::LoadedDataset {
    let m = tablealign::ingest::DatasetManifest::load(&fixture_dir(name).join("manifest.json")).expect("manifest");
    let loaded = tablealign::ingest::load_dataset(&m).expect("dataset");
    assert!(loaded.failures.is_empty(), "fixture parse failures: {:?}", loaded.failures);
    loaded
}
