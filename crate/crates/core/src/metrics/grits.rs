//! Factored heuristic for the most similar pair of row/column substructures.

use super::{prepare, CellSimilarityKind, MetricsError, SimTable};
use crate::model::TableGrid;

/// Alternation rounds before the heuristic gives up on a fixed point.
pub const MAX_ROUNDS: usize = 20;

/// Best monotone one-to-one matching of `n` items against `m` under
/// `weight`. Returns the total weight and the matched pairs in order.
fn align(n: usize, m: usize, weight: impl Fn(usize, usize) -> f64) -> (f64, Vec<(usize, usize)>) {
    let w: Vec<f64> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| weight(i, j)).collect();
    let stride = m + 1;
    let mut d = vec![0.0f64; (n + 1) * stride];
    for i in 0..n {
        for j in 0..m {
            let diag = d[i * stride + j] + w[i * m + j];
            let up = d[i * stride + j + 1];
            let left = d[(i + 1) * stride + j];
            d[(i + 1) * stride + j + 1] = diag.max(up).max(left);
        }
    }
    let mut pairs = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 && j > 0 {
        let here = d[i * stride + j];
        if here == d[(i - 1) * stride + j - 1] + w[(i - 1) * m + j - 1] {
            pairs.push((i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if here == d[(i - 1) * stride + j] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs.reverse();
    (d[n * stride + m], pairs)
}

/// One orientation of the problem: `a` plays the first grid, `b` the second.
struct Problem<'a> {
    sims: &'a SimTable<'a>,
    swapped: bool,
    a: (usize, usize),
    b: (usize, usize),
}

impl Problem<'_> {
    #[inline]
    fn sim(&self, i: usize, x: usize, j: usize, y: usize) -> f64 {
        let (ia, ib) = (i * self.a.1 + x, j * self.b.1 + y);
        if self.swapped {
            self.sims.get(ib, ia)
        } else {
            self.sims.get(ia, ib)
        }
    }

    fn align_rows(&self, cols: &[(usize, usize)]) -> (f64, Vec<(usize, usize)>) {
        align(self.a.0, self.b.0, |i, j| cols.iter().map(|&(x, y)| self.sim(i, x, j, y)).sum())
    }

    fn align_cols(&self, rows: &[(usize, usize)]) -> (f64, Vec<(usize, usize)>) {
        align(self.a.1, self.b.1, |x, y| rows.iter().map(|&(i, j)| self.sim(i, x, j, y)).sum())
    }

    /// Alternate from an identity correspondence until the matched
    /// similarity stops improving. The identity pairs the leading indices,
    /// or with `from_end` the trailing ones.
    fn solve(&self, rows_first: bool, from_end: bool) -> f64 {
        let identity = |n: usize, m: usize| {
            let k = n.min(m);
            let (di, dj) = if from_end { (n - k, m - k) } else { (0, 0) };
            (0..k).map(|i| (i + di, i + dj)).collect::<Vec<_>>()
        };
        let mut rows = identity(self.a.0, self.b.0);
        let mut cols = identity(self.a.1, self.b.1);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..MAX_ROUNDS {
            let total = if rows_first {
                rows = self.align_rows(&cols).1;
                let (s, c) = self.align_cols(&rows);
                cols = c;
                s
            } else {
                cols = self.align_cols(&rows).1;
                let (s, r) = self.align_rows(&cols);
                rows = r;
                s
            };
            if total <= best {
                break;
            }
            best = total;
        }
        best
    }
}

/// GriTS of the given kind: `2 S / (|gt| + |pred|)` where `S` is the summed
/// entry similarity of the best row/column substructure match found. The
/// search alternates row and column alignment by dynamic programming,
/// starting from the leading and the trailing identity correspondence, in
/// both alternation orders and both role orders; the result is a lower bound
/// on the exact optimum and symmetric in its arguments.
pub fn grits(kind: CellSimilarityKind, gt: &TableGrid, pred: &TableGrid) -> Result<f64, MetricsError> {
    if gt.is_empty() || pred.is_empty() {
        return Err(MetricsError::EmptyGrid);
    }
    let (pg, pp) = (prepare(gt), prepare(pred));
    let sims = SimTable::new(kind, &pg, &pp);
    let dims_g = (gt.n_rows, gt.n_cols);
    let dims_p = (pred.n_rows, pred.n_cols);
    let forward = Problem {
        sims: &sims,
        swapped: false,
        a: dims_g,
        b: dims_p,
    };
    let backward = Problem {
        sims: &sims,
        swapped: true,
        a: dims_p,
        b: dims_g,
    };
    let mut s = 0.0f64;
    for problem in [&forward, &backward] {
        for rows_first in [true, false] {
            for from_end in [false, true] {
                s = s.max(problem.solve(rows_first, from_end));
            }
        }
    }
    Ok((2.0 * s / (gt.len() + pred.len()) as f64).min(1.0))
}
