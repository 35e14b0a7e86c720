//! Compressed-column sparse matrices and their LU factorization.

use crate::error::{Error, Result};
use crate::operator::C64;
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::Mat;

/// Complex sparse matrix in compressed-column form with sorted, unique row indices per column.
#[derive(Clone, Debug, PartialEq)]
pub struct Csc {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<C64>,
}

impl Csc {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed and exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut t: Vec<(usize, usize, C64)> = triplets.to_vec();
        t.sort_unstable_by_key(|&(r, c, _)| (c, r));
        let mut col_ptr = vec![0usize; ncols + 1];
        let mut row_idx = Vec::with_capacity(t.len());
        let mut vals: Vec<C64> = Vec::with_capacity(t.len());
        let mut cols: Vec<usize> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if let (Some(&lr), Some(&lc)) = (row_idx.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            row_idx.push(r);
            cols.push(c);
            vals.push(v);
        }
        let mut keep_rows = Vec::with_capacity(row_idx.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in row_idx.into_iter().zip(cols).zip(vals) {
            if v != C64::new(0.0, 0.0) {
                keep_rows.push(r);
                keep_vals.push(v);
                col_ptr[c + 1] += 1;
            }
        }
        for j in 0..ncols {
            col_ptr[j + 1] += col_ptr[j];
        }
        Csc {
            nrows,
            ncols,
            col_ptr,
            row_idx: keep_rows,
            vals: keep_vals,
        }
    }

    /// Sparse copy of a dense matrix.
    pub fn from_dense(m: &Mat<C64>) -> Self {
        let mut t = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    t.push((i, j, v));
                }
            }
        }
        Csc::from_triplets(m.nrows(), m.ncols(), &t)
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect();
        Csc::from_triplets(n, n, &t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn vals(&self) -> &[C64] {
        &self.vals
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (s, e) = (self.col_ptr[j], self.col_ptr[j + 1]);
        match self.row_idx[s..e].binary_search(&i) {
            Ok(p) => self.vals[s + p],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.ncols).flat_map(move |j| {
            (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |p| (self.row_idx[p], j, self.vals[p]))
        })
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (j, &xj) in x.iter().enumerate() {
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.row_idx[p]] += self.vals[p] * xj;
            }
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.ncols)
            .map(|j| {
                self.vals[self.col_ptr[j]..self.col_ptr[j + 1]]
                    .iter()
                    .map(|v| v.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let t: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v.conj())).collect();
        Csc::from_triplets(self.ncols, self.nrows, &t)
    }

    /// Principal submatrix on `idx` (rows and columns), in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.nrows];
        for (k, &g) in idx.iter().enumerate() {
            local[g] = k;
        }
        let mut t = Vec::new();
        for (kc, &gc) in idx.iter().enumerate() {
            for p in self.col_ptr[gc]..self.col_ptr[gc + 1] {
                let lr = local[self.row_idx[p]];
                if lr != usize::MAX {
                    t.push((lr, kc, self.vals[p]));
                }
            }
        }
        Csc::from_triplets(idx.len(), idx.len(), &t)
    }

    /// `A − σ I`.
    pub fn shifted(&self, sigma: C64) -> Self {
        let mut t: Vec<_> = self.triplets().collect();
        t.extend((0..self.nrows.min(self.ncols)).map(|i| (i, i, -sigma)));
        Csc::from_triplets(self.nrows, self.ncols, &t)
    }

    /// Copy with row `r` replaced by the dense row vector `row`.
    pub fn with_row_replaced(&self, r: usize, row: &[C64]) -> Self {
        let mut t: Vec<_> = self.triplets().filter(|&(i, _, _)| i != r).collect();
        t.extend(
            row.iter()
                .enumerate()
                .filter(|(_, v)| **v != C64::new(0.0, 0.0))
                .map(|(j, &v)| (r, j, v)),
        );
        Csc::from_triplets(self.nrows, self.ncols, &t)
    }

    /// Sparse LU factorization.
    pub fn lu(&self) -> Result<SparseLu> {
        if self.nrows != self.ncols {
            return Err(Error::Shape(format!(
                "LU needs a square matrix, got {}x{}",
                self.nrows, self.ncols
            )));
        }
        let symbolic = SymbolicSparseColMatRef::new_checked(
            self.nrows,
            self.ncols,
            &self.col_ptr,
            None,
            &self.row_idx,
        );
        let m = SparseColMatRef::new(symbolic, &self.vals);
        let lu = m
            .sp_lu()
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(SparseLu { n: self.nrows, lu })
    }

    /// Matrix Market coordinate representation.
    pub fn write_matrix_market<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{} {} {:.17e} {:.17e}", i + 1, j + 1, v.re, v.im)?;
        }
        Ok(())
    }
}

/// Factorized sparse matrix.
pub struct SparseLu {
    n: usize,
    lu: Lu<usize, C64>,
}

impl SparseLu {
    /// Solves `A x = b` in place. Fails when the factors produce non-finite values.
    pub fn solve_in_place(&self, b: &mut [C64]) -> Result<()> {
        assert_eq!(b.len(), self.n);
        let mut rhs = faer::MatMut::from_column_major_slice_mut(b, self.n, 1);
        self.lu.solve_in_place(rhs.as_mut());
        if b.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::Factorization("singular factor".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let a = Csc::from_triplets(
            2,
            2,
            &[(0, 0, c(1.0, 0.0)), (0, 0, c(2.0, 0.0)), (1, 0, c(0.0, 0.0)), (1, 1, c(0.0, 1.0))],
        );
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 0), c(3.0, 0.0));
        assert_eq!(a.get(1, 0), c(0.0, 0.0));
        assert_eq!(a.get(1, 1), c(0.0, 1.0));
    }

    #[test]
    fn lu_solves_small_system() {
        let a = Csc::from_triplets(
            3,
            3,
            &[
                (0, 0, c(4.0, 0.0)),
                (1, 0, c(1.0, 1.0)),
                (1, 1, c(3.0, 0.0)),
                (2, 1, c(0.0, 2.0)),
                (2, 2, c(5.0, 0.0)),
                (0, 2, c(1.0, 0.0)),
            ],
        );
        let x = vec![c(1.0, 0.0), c(-2.0, 1.0), c(0.5, -0.5)];
        let mut b = a.matvec(&x);
        a.lu().unwrap().solve_in_place(&mut b).unwrap();
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn submatrix_and_shift() {
        let a = Csc::from_dense(&Mat::from_fn(3, 3, |i, j| c((3 * i + j) as f64, 0.0)));
        let s = a.submatrix(&[2, 0]);
        assert_eq!(s.get(0, 0), c(8.0, 0.0));
        assert_eq!(s.get(0, 1), c(6.0, 0.0));
        assert_eq!(s.get(1, 0), c(2.0, 0.0));
        let sh = a.shifted(c(1.0, 0.0));
        assert_eq!(sh.get(0, 0), c(-1.0, 0.0));
        assert_eq!(sh.get(1, 1), c(3.0, 0.0));
        assert_eq!(a.norm1(), 15.0);
    }
}
