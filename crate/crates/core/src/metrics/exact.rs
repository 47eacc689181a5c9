//! Exhaustive GriTS oracle for small grids.

use super::{prepare, prepared_similarity, CellSimilarityKind, MetricsError};
use crate::model::TableGrid;

/// Largest row or column count the oracle accepts.
pub const EXACT_MAX_DIM: usize = 4;

/// Every increasing index sequence over `0..n`, grouped by length.
fn subsequences(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut by_len = vec![Vec::new(); n + 1];
    for mask in 0u32..(1 << n) {
        let seq: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        by_len[seq.len()].push(seq);
    }
    by_len
}

/// The exact optimum of the GriTS objective, found by trying every pair of
/// equally long row subsequences with every pair of equally long column
/// subsequences.
pub fn grits_exact(kind: CellSimilarityKind, gt: &TableGrid, pred: &TableGrid) -> Result<f64, MetricsError> {
    if gt.is_empty() || pred.is_empty() {
        return Err(MetricsError::EmptyGrid);
    }
    for g in [gt, pred] {
        if g.n_rows > EXACT_MAX_DIM || g.n_cols > EXACT_MAX_DIM {
            return Err(MetricsError::TooLarge {
                rows: g.n_rows,
                cols: g.n_cols,
            });
        }
    }
    let (pg, pp) = (prepare(gt), prepare(pred));
    let sim = |i: usize, x: usize, j: usize, y: usize| {
        prepared_similarity(kind, &pg[i * gt.n_cols + x], &pp[j * pred.n_cols + y])
    };
    let (rows_g, rows_p) = (subsequences(gt.n_rows), subsequences(pred.n_rows));
    let (cols_g, cols_p) = (subsequences(gt.n_cols), subsequences(pred.n_cols));
    let mut best = 0.0f64;
    for (rg_all, rp_all) in rows_g.iter().zip(&rows_p) {
        for rg in rg_all {
            for rp in rp_all {
                for (cg_all, cp_all) in cols_g.iter().zip(&cols_p) {
                    for cg in cg_all {
                        for cp in cp_all {
                            let mut s = 0.0;
                            for (&i, &j) in rg.iter().zip(rp) {
                                for (&x, &y) in cg.iter().zip(cp) {
                                    s += sim(i, x, j, y);
                                }
                            }
                            best = best.max(s);
                        }
                    }
                }
            }
        }
    }
    Ok((2.0 * best / (gt.len() + pred.len()) as f64).min(1.0))
}
