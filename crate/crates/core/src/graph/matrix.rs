use rayon::prelude::*;

use super::InteractionGraph;

/// Above this many users `apply` spreads the gather over the rayon pool.
const PARALLEL_THRESHOLD: usize = 1 << 16;

/// Row-stochastic transition matrix of an interaction graph.
///
/// Entry `(i, j)` is `w_ij / sum_k w_ik`. A user without out-edges keeps its
/// credits through a unit self-loop, so every row sums to one and no mass is
/// ever lost.
///
/// The matrix is stored twice: by row for inspection and by column, sorted by
/// source, for the gather in [`NormalizedMatrix::apply`].
#[derive(Clone, Debug)]
pub struct NormalizedMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    row_cols: Vec<u32>,
    row_vals: Vec<f64>,
    col_offsets: Vec<usize>,
    col_rows: Vec<u32>,
    col_vals: Vec<f64>,
    dangling: Vec<bool>,
}

impl NormalizedMatrix {
    pub fn from_graph(g: &InteractionGraph) -> Self {
        let n = g.user_count();
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut row_cols = Vec::with_capacity(g.edge_count() + 1);
        let mut row_vals = Vec::with_capacity(g.edge_count() + 1);
        let mut dangling = vec![false; n];
        row_offsets.push(0);
        for i in 0..n {
            let total = g.out_weight(i);
            if g.out_degree(i) == 0 {
                dangling[i] = true;
                row_cols.push(i as u32);
                row_vals.push(1.0);
            } else {
                for e in g.out_edges(i) {
                    row_cols.push(e.target as u32);
                    row_vals.push(e.weight / total);
                }
            }
            row_offsets.push(row_cols.len());
        }

        let mut col_offsets = vec![0usize; n + 1];
        for &c in &row_cols {
            col_offsets[c as usize + 1] += 1;
        }
        for j in 0..n {
            col_offsets[j + 1] += col_offsets[j];
        }
        let mut fill = col_offsets.clone();
        let mut col_rows = vec![0u32; row_cols.len()];
        let mut col_vals = vec![0f64; row_cols.len()];
        // rows are visited in ascending order, so every column ends up sorted
        // by source index
        for i in 0..n {
            for k in row_offsets[i]..row_offsets[i + 1] {
                let j = row_cols[k] as usize;
                col_rows[fill[j]] = i as u32;
                col_vals[fill[j]] = row_vals[k];
                fill[j] += 1;
            }
        }
        Self { n, row_offsets, row_cols, row_vals, col_offsets, col_rows, col_vals, dangling }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_dangling(&self, i: usize) -> bool {
        self.dangling[i]
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.row_cols[range.clone()].iter().zip(&self.row_vals[range]).map(|(&c, &v)| (c as usize, v))
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row_vals[self.row_offsets[i]..self.row_offsets[i + 1]].iter().sum()
    }

    /// Predecessors of `j` and the matching matrix entries, ascending by
    /// predecessor.
    pub fn column(&self, j: usize) -> (&[u32], &[f64]) {
        let range = self.col_offsets[j]..self.col_offsets[j + 1];
        (&self.col_rows[range.clone()], &self.col_vals[range])
    }

    fn gather(&self, x: &[f64], j: usize) -> f64 {
        let (rows, vals) = self.column(j);
        rows.iter().zip(vals).fold(0.0, |acc, (&i, &w)| acc + w * x[i as usize])
    }

    /// `out = x W`. Each entry is summed in ascending predecessor order, so
    /// the serial and parallel paths agree bit for bit.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        if self.n >= PARALLEL_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(|(j, o)| *o = self.gather(x, j));
        } else {
            for (j, o) in out.iter_mut().enumerate() {
                *o = self.gather(x, j);
            }
        }
    }
}
