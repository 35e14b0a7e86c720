//! Operators on a truncated Hilbert space and their Hilbert-Schmidt geometry.
//!
//! Vectorization is row-stacking: entry `(m, n)` of a `D x D` operator sits at
//! index `m * D + n`, so that `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.

use crate::csc::Csc;
use crate::error::{Error, Result};
use faer::Mat;

/// Double-precision complex scalar.
pub type C64 = faer::c64;

/// Fraction of nonzeros below which an operator is stored sparse.
pub const SPARSE_DENSITY: f64 = 0.25;

#[derive(Clone, Debug)]
enum Storage {
    Dense(Mat<C64>),
    Sparse(Csc),
}

/// Square complex matrix acting on a `dim`-dimensional Hilbert space.
#[derive(Clone, Debug)]
pub struct Operator {
    dim: usize,
    storage: Storage,
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

impl Operator {
    /// Wraps a dense matrix, choosing sparse storage when fewer than 25% of entries are nonzero.
    pub fn from_mat(m: Mat<C64>) -> Result<Self> {
        let op = Operator::dense(m)?;
        let nnz = op.nnz();
        if (nnz as f64) < SPARSE_DENSITY * (op.dim * op.dim) as f64 {
            Ok(op.into_sparse())
        } else {
            Ok(op)
        }
    }

    /// Wraps a dense matrix and keeps dense storage.
    pub fn dense(m: Mat<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape(format!(
                "operator must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite);
                }
            }
        }
        Ok(Operator {
            dim: m.nrows(),
            storage: Storage::Dense(m),
        })
    }

    /// Builds a sparse operator from triplets.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, C64)]) -> Result<Self> {
        if triplets
            .iter()
            .any(|(_, _, v)| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite);
        }
        Ok(Operator {
            dim,
            storage: Storage::Sparse(Csc::from_triplets(dim, dim, triplets)),
        })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Operator::from_mat(Mat::from_fn(dim, dim, f))
    }

    /// Operator from row-major nested slices; intended for small literals.
    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("rows must form a square matrix".into()));
        }
        Operator::dense(Mat::from_fn(d, d, |i, j| rows[i][j]))
    }

    /// Operator from real row-major nested slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Shape("rows must form a square matrix".into()));
        }
        Operator::dense(Mat::from_fn(d, d, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            storage: Storage::Sparse(Csc::from_triplets(dim, dim, &[])),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Operator {
            dim,
            storage: Storage::Sparse(Csc::identity(dim)),
        }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let t: Vec<_> = entries.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Operator {
            dim: entries.len(),
            storage: Storage::Sparse(Csc::from_triplets(entries.len(), entries.len(), &t)),
        }
    }

    pub fn real_diag(entries: &[f64]) -> Self {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Operator::diag(&c)
    }

    /// Projector `|i⟩⟨j|`.
    pub fn basis(dim: usize, i: usize, j: usize) -> Self {
        Operator {
            dim,
            storage: Storage::Sparse(Csc::from_triplets(dim, dim, &[(i, j, C64::new(1.0, 0.0))])),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Sparse(s) => s.nnz(),
            Storage::Dense(m) => {
                let mut n = 0;
                for j in 0..self.dim {
                    for i in 0..self.dim {
                        if m[(i, j)] != zero() {
                            n += 1;
                        }
                    }
                }
                n
            }
        }
    }

    /// Same operator with sparse storage.
    pub fn into_sparse(self) -> Self {
        match self.storage {
            Storage::Sparse(_) => self,
            Storage::Dense(m) => Operator {
                dim: self.dim,
                storage: Storage::Sparse(Csc::from_dense(&m)),
            },
        }
    }

    /// Same operator with dense storage.
    pub fn into_dense(self) -> Self {
        match self.storage {
            Storage::Dense(_) => self,
            Storage::Sparse(s) => Operator {
                dim: self.dim,
                storage: Storage::Dense(s.to_dense()),
            },
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(i, j)],
            Storage::Sparse(s) => s.get(i, j),
        }
    }

    /// Dense copy of the entries.
    pub fn to_mat(&self) -> Mat<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(s) => s.to_dense(),
        }
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        match &self.storage {
            Storage::Sparse(s) => s.triplets().collect(),
            Storage::Dense(m) => {
                let mut t = Vec::new();
                for j in 0..self.dim {
                    for i in 0..self.dim {
                        if m[(i, j)] != zero() {
                            t.push((i, j, m[(i, j)]));
                        }
                    }
                }
                t
            }
        }
    }

    fn map_entries(&self, f: impl Fn(usize, usize, C64) -> (usize, usize, C64)) -> Self {
        match &self.storage {
            Storage::Sparse(s) => {
                let t: Vec<_> = s.triplets().map(|(i, j, v)| f(i, j, v)).collect();
                Operator {
                    dim: self.dim,
                    storage: Storage::Sparse(Csc::from_triplets(self.dim, self.dim, &t)),
                }
            }
            Storage::Dense(m) => {
                let mut out = Mat::<C64>::zeros(self.dim, self.dim);
                for j in 0..self.dim {
                    for i in 0..self.dim {
                        let (a, b, v) = f(i, j, m[(i, j)]);
                        out[(a, b)] = v;
                    }
                }
                Operator {
                    dim: self.dim,
                    storage: Storage::Dense(out),
                }
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        self.map_entries(|i, j, v| (j, i, v.conj()))
    }

    pub fn transpose(&self) -> Self {
        self.map_entries(|i, j, v| (j, i, v))
    }

    pub fn conj(&self) -> Self {
        self.map_entries(|i, j, v| (i, j, v.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_entries(|i, j, v| (i, j, v * s))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    fn check_dims(&self, other: &Operator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// Linear combination `a·self + b·other`.
    pub fn axpby(&self, a: C64, other: &Operator, b: C64) -> Result<Self> {
        self.check_dims(other)?;
        match (&self.storage, &other.storage) {
            (Storage::Sparse(x), Storage::Sparse(y)) => {
                let mut t: Vec<_> = x.triplets().map(|(i, j, v)| (i, j, a * v)).collect();
                t.extend(y.triplets().map(|(i, j, v)| (i, j, b * v)));
                Ok(Operator {
                    dim: self.dim,
                    storage: Storage::Sparse(Csc::from_triplets(self.dim, self.dim, &t)),
                })
            }
            _ => {
                let x = self.to_mat();
                let y = other.to_mat();
                let m = Mat::from_fn(self.dim, self.dim, |i, j| a * x[(i, j)] + b * y[(i, j)]);
                Ok(Operator {
                    dim: self.dim,
                    storage: Storage::Dense(m),
                })
            }
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.axpby(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.axpby(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &Operator) -> Result<Self> {
        self.check_dims(other)?;
        match (&self.storage, &other.storage) {
            (Storage::Sparse(x), Storage::Sparse(y)) => {
                let mut t = Vec::new();
                for (k, j, b) in y.triplets() {
                    for p in x.col_ptr()[k]..x.col_ptr()[k + 1] {
                        t.push((x.row_idx()[p], j, x.vals()[p] * b));
                    }
                }
                Ok(Operator {
                    dim: self.dim,
                    storage: Storage::Sparse(Csc::from_triplets(self.dim, self.dim, &t)),
                })
            }
            _ => {
                let m = self.to_mat() * other.to_mat();
                Ok(Operator {
                    dim: self.dim,
                    storage: Storage::Dense(m),
                })
            }
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm of `self − self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = self.to_mat();
        let mut s = 0.0;
        for j in 0..self.dim {
            for i in 0..self.dim {
                s += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// True when `‖A − A†‖ ≤ tol·max(1, ‖A‖)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * hs_norm(self).max(1.0)
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let m = self.to_mat();
        let h = Mat::from_fn(self.dim, self.dim, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
        Operator {
            dim: self.dim,
            storage: Storage::Dense(h),
        }
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        match &self.storage {
            Storage::Sparse(s) => s.norm1(),
            Storage::Dense(m) => (0..self.dim)
                .map(|j| (0..self.dim).map(|i| m[(i, j)].norm()).sum::<f64>())
                .fold(0.0, f64::max),
        }
    }

    /// Matrix-vector product on a ket.
    pub fn apply_ket(&self, x: &[C64]) -> Vec<C64> {
        match &self.storage {
            Storage::Sparse(s) => s.matvec(x),
            Storage::Dense(m) => (0..self.dim)
                .map(|i| (0..self.dim).map(|j| m[(i, j)] * x[j]).sum())
                .collect(),
        }
    }
}

/// Bosonic annihilation operator on `{|0⟩, …, |dim−1⟩}`: `a|n⟩ = √n |n−1⟩`.
pub fn destroy(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let t: Vec<_> = (1..dim)
        .map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0)))
        .collect();
    Operator::from_triplets(dim, &t)
}

/// Number operator `a†a`.
pub fn number(dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(Operator::real_diag(
        &(0..dim).map(|n| n as f64).collect::<Vec<_>>(),
    ))
}

/// Row-stacked vector of `a`.
pub fn vectorize(a: &Operator) -> Vec<C64> {
    let d = a.dim;
    let mut v = vec![zero(); d * d];
    match &a.storage {
        Storage::Dense(m) => {
            for i in 0..d {
                for j in 0..d {
                    v[i * d + j] = m[(i, j)];
                }
            }
        }
        Storage::Sparse(s) => {
            for (i, j, x) in s.triplets() {
                v[i * d + j] = x;
            }
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &[C64], dim: usize) -> Result<Operator> {
    if v.len() != dim * dim {
        return Err(Error::Shape(format!(
            "vector of length {} cannot form a {dim}x{dim} operator",
            v.len()
        )));
    }
    Operator::from_mat(Mat::from_fn(dim, dim, |i, j| v[i * dim + j]))
}

/// Hilbert-Schmidt inner product `Tr[A† B]`.
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<C64> {
    a.check_dims(b)?;
    let d = a.dim;
    Ok(match (&a.storage, &b.storage) {
        (Storage::Sparse(x), _) => x.triplets().map(|(i, j, v)| v.conj() * b.get(i, j)).sum(),
        (_, Storage::Sparse(y)) => y.triplets().map(|(i, j, v)| a.get(i, j).conj() * v).sum(),
        (Storage::Dense(x), Storage::Dense(y)) => {
            let mut s = zero();
            for j in 0..d {
                for i in 0..d {
                    s += x[(i, j)].conj() * y[(i, j)];
                }
            }
            s
        }
    })
}

/// Hilbert-Schmidt norm `√Tr[A† A]`.
pub fn hs_norm(a: &Operator) -> f64 {
    match &a.storage {
        Storage::Sparse(s) => s.vals().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
        Storage::Dense(m) => {
            let mut s = 0.0;
            for j in 0..a.dim {
                for i in 0..a.dim {
                    s += m[(i, j)].norm_sqr();
                }
            }
            s.sqrt()
        }
    }
}

/// Kronecker product of dense matrices.
pub fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Hermitian eigendecomposition `(eigenvalues ascending, eigenvectors as columns)`.
pub(crate) fn eigh(a: &Operator) -> Result<(Vec<f64>, Mat<C64>)> {
    let h = a.hermitian_part().to_mat();
    let e = h
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Conditioning(format!("Hermitian eigensolver: {e:?}")))?;
    let s = e.S();
    let vals = (0..a.dim).map(|i| s[i].re).collect();
    Ok((vals, e.U().to_owned()))
}

/// `Σ_k w_k |u_k⟩⟨u_k|` from eigenvector columns.
pub(crate) fn from_spectral(weights: &[f64], u: &Mat<C64>) -> Result<Operator> {
    let d = u.nrows();
    let m = Mat::from_fn(d, d, |i, j| {
        weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(k, &w)| u[(i, k)] * u[(j, k)].conj() * w)
            .sum::<C64>()
    });
    Operator::dense(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_mat(rng: &mut ChaCha8Rng, d: usize) -> Mat<C64> {
        Mat::from_fn(d, d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn destroy_qubit() {
        let a = destroy(2).unwrap();
        assert_eq!(a.get(0, 1), c(1.0, 0.0));
        assert_eq!(a.get(1, 0), c(0.0, 0.0));
        assert_eq!(a.get(0, 0), c(0.0, 0.0));
        assert_eq!(a.get(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn destroy_sqrt_rule() {
        let a = destroy(3).unwrap();
        assert!((a.get(1, 2) - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn destroy_rejects_small_dims() {
        assert!(matches!(destroy(1), Err(Error::InvalidDimension(1))));
        assert!(matches!(destroy(0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn number_operator_diagonal() {
        let d = 7;
        let a = destroy(d).unwrap();
        let n = a.adjoint().matmul(&a).unwrap();
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { i as f64 } else { 0.0 };
                assert!((n.get(i, j) - c(want, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn commutator_is_identity_below_truncation() {
        let d = 6;
        let a = destroy(d).unwrap();
        let ad = a.adjoint();
        let comm = a.matmul(&ad).unwrap().sub(&ad.matmul(&a).unwrap()).unwrap();
        for i in 0..d - 1 {
            for j in 0..d - 1 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((comm.get(i, j) - c(want, 0.0)).norm() < 1e-13);
            }
        }
        assert!((comm.get(d - 1, d - 1) - c(1.0 - d as f64, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn vectorize_is_row_stacking() {
        let a = Operator::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let v = vectorize(&a);
        let want: Vec<C64> = [1.0, 2.0, 3.0, 4.0].iter().map(|&x| c(x, 0.0)).collect();
        assert_eq!(v, want);
    }

    #[test]
    fn vectorize_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Operator::dense(random_mat(&mut rng, 5)).unwrap();
        let b = unvectorize(&vectorize(&a), 5).unwrap();
        assert!(hs_norm(&a.sub(&b).unwrap()) == 0.0);
        assert!(matches!(unvectorize(&vectorize(&a), 4), Err(Error::Shape(_))));
    }

    #[test]
    fn vec_of_product_matches_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [3usize, 5, 8] {
            let (a, x, b) = (
                random_mat(&mut rng, d),
                random_mat(&mut rng, d),
                random_mat(&mut rng, d),
            );
            let axb = Operator::dense(&a * &x * &b).unwrap();
            let k = kron(&a, &b.transpose().to_owned());
            let vx = vectorize(&Operator::dense(x).unwrap());
            let lhs = vectorize(&axb);
            let scale = lhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for i in 0..d * d {
                let r: C64 = (0..d * d).map(|j| k[(i, j)] * vx[j]).sum();
                assert!((r - lhs[i]).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn hs_inner_examples() {
        let i2 = Operator::identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), c(2.0, 0.0));
        let p0 = Operator::basis(2, 0, 0);
        let p1 = Operator::basis(2, 1, 1);
        assert_eq!(hs_inner(&p0, &p1).unwrap(), c(0.0, 0.0));
        assert!(hs_inner(&i2, &Operator::identity(3)).is_err());
    }

    #[test]
    fn hs_inner_matches_vector_dot_and_is_conjugate_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = Operator::dense(random_mat(&mut rng, 4)).unwrap();
            let b = Operator::dense(random_mat(&mut rng, 4)).unwrap();
            let dot: C64 = vectorize(&a)
                .iter()
                .zip(vectorize(&b))
                .map(|(x, y)| x.conj() * y)
                .sum();
            let ab = hs_inner(&a, &b).unwrap();
            assert!((ab - dot).norm() < 1e-13);
            let ba = hs_inner(&b, &a).unwrap();
            assert!((ab - ba.conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn hs_norm_examples() {
        assert!((hs_norm(&Operator::identity(2)) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(hs_norm(&Operator::zeros(3)), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random_mat(&mut rng, 6);
        let mut sum = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                sum += m[(i, j)].norm_sqr();
            }
        }
        let a = Operator::dense(m).unwrap();
        assert!((hs_norm(&a).powi(2) - sum).abs() < 1e-12 * sum);
        assert!((hs_norm(&a).powi(2) - hs_inner(&a, &a).unwrap().re).abs() < 1e-12 * sum);
    }

    #[test]
    fn hs_norm_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = Operator::dense(random_mat(&mut rng, 3)).unwrap();
            let b = Operator::dense(random_mat(&mut rng, 3)).unwrap();
            assert!(hs_norm(&a.add(&b).unwrap()) <= hs_norm(&a) + hs_norm(&b) + 1e-14);
        }
    }

    #[test]
    fn dense_and_sparse_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let d = 6;
        let t: Vec<_> = (0..8)
            .map(|_| {
                (
                    rng.random_range(0..d),
                    rng.random_range(0..d),
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            })
            .collect();
        let s = Operator::from_triplets(d, &t).unwrap();
        let x = s.clone().into_dense();
        assert!(s.is_sparse() && !x.is_sparse());
        let y = Operator::dense(random_mat(&mut rng, d)).unwrap();
        let pairs = [
            (s.matmul(&y).unwrap(), x.matmul(&y).unwrap()),
            (y.matmul(&s).unwrap(), y.matmul(&x).unwrap()),
            (s.matmul(&s).unwrap(), x.matmul(&x).unwrap()),
            (s.add(&y).unwrap(), x.add(&y).unwrap()),
            (s.adjoint(), x.adjoint()),
        ];
        for (p, q) in pairs {
            assert!(hs_norm(&p.sub(&q).unwrap()) <= 1e-13 * hs_norm(&q).max(1.0));
        }
        assert!((hs_inner(&s, &y).unwrap() - hs_inner(&x, &y).unwrap()).norm() < 1e-13);
        assert!((hs_norm(&s) - hs_norm(&x)).abs() < 1e-13);
        assert_eq!(vectorize(&s), vectorize(&x));
    }

    #[test]
    fn storage_follows_density() {
        assert!(destroy(10).unwrap().is_sparse());
        let full = Operator::from_fn(3, |_, _| c(1.0, 0.0)).unwrap();
        assert!(!full.is_sparse());
    }

    #[test]
    fn rejects_non_finite_and_non_square() {
        let m = Mat::from_fn(2, 2, |i, _| c(if i == 0 { f64::NAN } else { 0.0 }, 0.0));
        assert!(matches!(Operator::dense(m), Err(Error::NonFinite)));
        assert!(matches!(Operator::dense(Mat::zeros(2, 3)), Err(Error::Shape(_))));
    }
}
