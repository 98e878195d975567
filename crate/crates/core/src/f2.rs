//! Bit-packed GF(2) matrices, rank-one (bipartite) decompositions and
//! greedy mixed deletion-bipartite decompositions.

use std::fmt;

use serde::{Deserialize, Serialize};

const W: usize = 64;

/// Row-major, bit-packed binary matrix. Bits past `cols` in the last
/// word of each row are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> F2Matrix {
        let stride = cols.div_ceil(W);
        F2Matrix { rows, cols, stride, bits: vec![0; rows * stride] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> F2Matrix {
        let mut m = F2Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> F2Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        F2Matrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        self.bits[i * self.stride + j / W] >> (j % W) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.bits[i * self.stride + j / W];
        if value {
            *w |= 1 << (j % W);
        } else {
            *w &= !(1 << (j % W));
        }
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / W] ^= 1 << (j % W);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(|&w| w == 0)
    }

    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.get(i, j)).collect()
    }

    pub fn col_support(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> F2Matrix {
        F2Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// The submatrix on the given rows and columns (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> F2Matrix {
        F2Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    /// XOR the all-ones block on `rows × cols` into the matrix.
    pub fn xor_block(&mut self, rows: &[usize], cols: &[usize]) {
        for &i in rows {
            for &j in cols {
                self.flip(i, j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.bits.clone();
        let s = self.stride;
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, b) = (col / W, 1u64 << (col % W));
            let Some(p) = (rank..self.rows).find(|&r| m[r * s + w] & b != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..s {
                    m.swap(p * s + k, rank * s + k);
                }
            }
            for r in rank + 1..self.rows {
                if m[r * s + w] & b != 0 {
                    for k in w..s {
                        m[r * s + k] ^= m[rank * s + k];
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Reduced row echelon basis of the row space: `(basis rows, pivot columns)`.
    fn rref_basis(&self) -> (Vec<Vec<u64>>, Vec<usize>) {
        let mut rows: Vec<Vec<u64>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, b) = (col / W, 1u64 << (col % W));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & b != 0) else {
                continue;
            };
            rows.swap(p, rank);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & b != 0 {
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x ^= y;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        (rows, pivots)
    }

    /// Rank-one factorization over GF(2): exactly `rank(self)` pairs
    /// `(A_i, B_i)` of row and column index sets whose all-ones blocks
    /// XOR to the matrix. `B_i` is the support of the `i`-th reduced
    /// echelon basis row; `A_i` lists the rows that use that basis row,
    /// read off at its pivot column.
    pub fn bipartite_decomposition(&self) -> BipartiteDecomposition {
        let (basis, pivots) = self.rref_basis();
        let pairs = basis
            .iter()
            .zip(&pivots)
            .map(|(b, &p)| {
                let a = self.col_support(p);
                let bs = (0..self.cols).filter(|&j| b[j / W] >> (j % W) & 1 == 1).collect();
                (a, bs)
            })
            .collect();
        BipartiteDecomposition { pairs }
    }

    /// `out[i]` is true iff deleting row `i` lowers the rank, i.e. row `i`
    /// is not in the span of the other rows.
    pub fn essential_rows(&self) -> Vec<bool> {
        // forward elimination on [M | I]; rows whose M-part vanishes carry
        // a basis of the left null space in their identity part
        let s = self.stride;
        let t = self.rows.div_ceil(W);
        let mut m: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.resize(s + t, 0);
                r[s + i / W] |= 1 << (i % W);
                r
            })
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, b) = (col / W, 1u64 << (col % W));
            let Some(p) = (rank..m.len()).find(|&r| m[r][w] & b != 0) else {
                continue;
            };
            m.swap(p, rank);
            let pivot = m[rank].clone();
            for row in m.iter_mut().skip(rank + 1) {
                if row[w] & b != 0 {
                    for (x, y) in row.iter_mut().zip(&pivot) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
        let mut essential = vec![true; self.rows];
        for row in &m[rank..] {
            for (i, e) in essential.iter_mut().enumerate() {
                if row[s + i / W] >> (i % W) & 1 == 1 {
                    *e = false;
                }
            }
        }
        essential
    }

    pub fn essential_cols(&self) -> Vec<bool> {
        self.transpose().essential_rows()
    }

    /// Greedy mixed deletion-bipartite decomposition.
    ///
    /// Deletes rank-lowering rows or columns one at a time (rows before
    /// columns, lowest index first; every such deletion lowers the rank by
    /// exactly one, the best available ratio) until none remains, then
    /// covers what is left with a rank-one factorization at cost 2 per pair.
    /// The result is compared against deleting every non-zero row or every
    /// non-zero column and the cheapest is returned, so the score never
    /// exceeds `min(rows, cols)` nor `2·rank`.
    ///
    /// This is a heuristic: the optimal (mixed cut-rank) score is not
    /// computed.
    pub fn mixed_decomposition_greedy(&self) -> MixedDecomposition {
        let mut rows: Vec<usize> = (0..self.rows).collect();
        let mut cols: Vec<usize> = (0..self.cols).collect();
        let mut deleted_rows = Vec::new();
        let mut deleted_cols = Vec::new();
        loop {
            let sub = self.select(&rows, &cols);
            if sub.is_zero() {
                break;
            }
            if let Some(i) = sub.essential_rows().iter().position(|&e| e) {
                deleted_rows.push(rows.remove(i));
                continue;
            }
            if let Some(j) = sub.essential_cols().iter().position(|&e| e) {
                deleted_cols.push(cols.remove(j));
                continue;
            }
            break;
        }
        let residual = self.select(&rows, &cols).bipartite_decomposition();
        let pairs: Vec<(Vec<usize>, Vec<usize>)> = residual
            .pairs
            .into_iter()
            .map(|(a, b)| (a.into_iter().map(|i| rows[i]).collect(), b.into_iter().map(|j| cols[j]).collect()))
            .collect();
        let greedy = MixedDecomposition::new(pairs, deleted_rows, deleted_cols);

        let nz_rows: Vec<usize> = (0..self.rows).filter(|&i| !self.row_is_zero(i)).collect();
        let t = self.transpose();
        let nz_cols: Vec<usize> = (0..self.cols).filter(|&j| !t.row_is_zero(j)).collect();
        let mut best = greedy;
        if nz_rows.len() < best.score {
            best = MixedDecomposition::new(vec![], nz_rows, vec![]);
        }
        if nz_cols.len() < best.score {
            best = MixedDecomposition::new(vec![], vec![], nz_cols);
        }
        best
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

/// 0/1 text grid, one row per line.
impl fmt::Display for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteDecomposition {
    pub pairs: Vec<(Vec<usize>, Vec<usize>)>,
}

impl BipartiteDecomposition {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn reconstruct(&self, rows: usize, cols: usize) -> F2Matrix {
        let mut m = F2Matrix::zeros(rows, cols);
        for (a, b) in &self.pairs {
            m.xor_block(a, b);
        }
        m
    }
}

/// A mixed deletion-bipartite decomposition of a cut matrix.
///
/// Reconstruction: deleted rows contribute their full row, deleted
/// columns contribute their column restricted to non-deleted rows, and
/// the bipartite pairs cover the residual submatrix. Restricting the
/// columns keeps the identity exact when a deleted row and a deleted
/// column meet at a one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedDecomposition {
    pub pairs: Vec<(Vec<usize>, Vec<usize>)>,
    pub deleted_rows: Vec<usize>,
    pub deleted_cols: Vec<usize>,
    pub score: usize,
}

impl MixedDecomposition {
    pub fn new(
        pairs: Vec<(Vec<usize>, Vec<usize>)>,
        deleted_rows: Vec<usize>,
        deleted_cols: Vec<usize>,
    ) -> MixedDecomposition {
        let score = 2 * pairs.len() + deleted_rows.len() + deleted_cols.len();
        MixedDecomposition { pairs, deleted_rows, deleted_cols, score }
    }

    /// Number of terms the decomposition expands into: `4^{k1}·2^{k2+k3}`.
    pub fn branching_log2(&self) -> usize {
        self.score
    }

    pub fn reconstruct(&self, source: &F2Matrix) -> F2Matrix {
        let mut m = F2Matrix::zeros(source.rows(), source.cols());
        for (a, b) in &self.pairs {
            m.xor_block(a, b);
        }
        for &u in &self.deleted_rows {
            m.xor_block(&[u], &source.row_support(u));
        }
        for &v in &self.deleted_cols {
            let col: Vec<usize> =
                source.col_support(v).into_iter().filter(|i| !self.deleted_rows.contains(i)).collect();
            m.xor_block(&col, &[v]);
        }
        m
    }
}
