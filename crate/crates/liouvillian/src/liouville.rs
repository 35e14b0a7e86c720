//! The Liouvillian superoperator, explicit or matrix-free.
//!
//! Under row-stacking vectorization the generator of
//! `∂ₜρ = −i[H, ρ] + Σᵢ (γᵢ/2)(2ΓᵢρΓᵢ† − Γᵢ†Γᵢρ − ρΓᵢ†Γᵢ)` is
//!
//! ```text
//! L̄ = −i(H ⊗ I − I ⊗ Hᵀ) + Σᵢ (γᵢ/2)(2Γᵢ ⊗ Γᵢ* − Γᵢ†Γᵢ ⊗ I − I ⊗ (Γᵢ†Γᵢ)ᵀ)
//! ```
//!
//! A [`SuperMatrix`] may also be a block of that matrix restricted to a subspace
//! of operator space (a symmetry sector). Its local coordinates are mapped back to
//! full operators through its [`Embedding`].

use crate::csc::Csc;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::operator::{unvectorize, vectorize, Operator, C64};
use faer::Mat;
use std::sync::Arc;

/// Largest `D²` assembled explicitly by default.
pub const EXPLICIT_LIMIT: usize = 250_000;

/// How local coordinates of a block map to full vectorized operators.
#[derive(Clone, Debug)]
pub enum Embedding {
    /// Local coordinates are the full row-stacked vector.
    Full,
    /// Local coordinate `k` is full coordinate `idx[k]`.
    Indices(Arc<Vec<usize>>),
    /// Local coordinates are expansion coefficients on orthonormal columns.
    Basis(Arc<Mat<C64>>),
}

#[derive(Clone, Debug)]
enum Repr {
    Sparse(Arc<Csc>),
    Dense(Arc<Mat<C64>>),
    MatrixFree(Arc<MatrixFree>),
}

#[derive(Debug)]
struct MatrixFree {
    h: Mat<C64>,
    jumps: Vec<(Mat<C64>, Mat<C64>, Mat<C64>, f64)>,
}

impl MatrixFree {
    fn apply(&self, rho: &Mat<C64>) -> Mat<C64> {
        let mi = C64::new(0.0, -1.0);
        let mut out = (&self.h * rho - rho * &self.h) * faer::Scale(mi);
        for (g, gd, k, rate) in &self.jumps {
            let r = C64::new(*rate, 0.0);
            let term = (g * rho * gd) * faer::Scale(C64::new(2.0, 0.0))
                - k * rho
                - rho * k;
            out += term * faer::Scale(r * 0.5);
        }
        out
    }
}

/// Liouvillian (or a block of it) acting on vectorized operators.
#[derive(Clone, Debug)]
pub struct SuperMatrix {
    hilbert_dim: usize,
    repr: Repr,
    embedding: Embedding,
    norm1: f64,
}

fn triplet_kron_terms(
    d: usize,
    a: &[(usize, usize, C64)],
    scale: C64,
    out: &mut Vec<(usize, usize, C64)>,
) {
    // scale·(A ⊗ I − I ⊗ Aᵀ)
    for &(i, j, v) in a {
        for k in 0..d {
            out.push((i * d + k, j * d + k, scale * v));
            out.push((k * d + j, k * d + i, -scale * v));
        }
    }
}

/// Explicit supermatrix of a model, or a matrix-free operator when `D²` exceeds [`EXPLICIT_LIMIT`].
pub fn build_liouvillian(m: &ModelSpec) -> Result<SuperMatrix> {
    build_liouvillian_with_limit(m, EXPLICIT_LIMIT)
}

/// As [`build_liouvillian`] with a caller-chosen explicit-assembly limit on `D²`.
pub fn build_liouvillian_with_limit(m: &ModelSpec, limit: usize) -> Result<SuperMatrix> {
    let d = m.dim;
    if d * d > limit {
        return matrix_free(m);
    }
    let mut t = Vec::new();
    let h = m.hamiltonian.triplets();
    triplet_kron_terms(d, &h, C64::new(0.0, -1.0), &mut t);
    for j in &m.jumps {
        if j.rate == 0.0 {
            continue;
        }
        let g = j.op.triplets();
        for &(i, jj, a) in &g {
            for &(k, l, b) in &g {
                t.push((i * d + k, jj * d + l, a * b.conj() * j.rate));
            }
        }
        let kk = j.op.adjoint().matmul(&j.op)?.triplets();
        // −(γ/2)(K ⊗ I + I ⊗ Kᵀ)
        for &(i, jj, v) in &kk {
            let s = v * (-0.5 * j.rate);
            for k in 0..d {
                t.push((i * d + k, jj * d + k, s));
                t.push((k * d + jj, k * d + i, s));
            }
        }
    }
    let csc = Csc::from_triplets(d * d, d * d, &t);
    Ok(SuperMatrix::from_csc(d, csc))
}

/// Matrix-free Liouvillian evaluating the master equation directly.
pub fn matrix_free(m: &ModelSpec) -> Result<SuperMatrix> {
    let h = m.hamiltonian.to_mat();
    let mut jumps = Vec::new();
    let mut bound = 2.0 * m.hamiltonian.norm1();
    for j in &m.jumps {
        if j.rate == 0.0 {
            continue;
        }
        let g = j.op.to_mat();
        let gd = j.op.adjoint().to_mat();
        let k = &gd * &g;
        let kn = j.op.adjoint().matmul(&j.op)?.norm1();
        let gn = j.op.norm1();
        bound += j.rate * (gn * j.op.adjoint().norm1() + kn);
        jumps.push((g, gd, k, j.rate));
    }
    Ok(SuperMatrix {
        hilbert_dim: m.dim,
        repr: Repr::MatrixFree(Arc::new(MatrixFree { h, jumps })),
        embedding: Embedding::Full,
        norm1: bound,
    })
}

/// `Lρ`, the right-hand side of the master equation.
pub fn apply_liouvillian(l: &SuperMatrix, rho: &Operator) -> Result<Operator> {
    l.apply(rho)
}

impl SuperMatrix {
    /// Full-space supermatrix from explicit sparse entries.
    pub fn from_csc(hilbert_dim: usize, csc: Csc) -> Self {
        let norm1 = csc.norm1();
        SuperMatrix {
            hilbert_dim,
            repr: Repr::Sparse(Arc::new(csc)),
            embedding: Embedding::Full,
            norm1,
        }
    }

    /// Hilbert-space dimension `D` of the operators it acts on.
    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    /// Number of local coordinates (`D²` for the full space).
    pub fn len(&self) -> usize {
        match &self.embedding {
            Embedding::Full => self.hilbert_dim * self.hilbert_dim,
            Embedding::Indices(idx) => idx.len(),
            Embedding::Basis(p) => p.ncols(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    /// True when entries are stored (sparse or dense) rather than evaluated on the fly.
    pub fn is_explicit(&self) -> bool {
        !matches!(self.repr, Repr::MatrixFree(_))
    }

    /// `‖L‖₁`; an upper bound for matrix-free operators.
    pub fn norm1(&self) -> f64 {
        self.norm1
    }

    /// Explicit sparse entries, if stored sparse.
    pub fn csc(&self) -> Option<&Csc> {
        match &self.repr {
            Repr::Sparse(c) => Some(c),
            _ => None,
        }
    }

    /// Explicit dense entries, if stored dense.
    pub fn dense_entries(&self) -> Option<&Mat<C64>> {
        match &self.repr {
            Repr::Dense(m) => Some(m),
            _ => None,
        }
    }

    /// Local matrix-vector product.
    pub fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.len(), "vector length does not match the supermatrix");
        match &self.repr {
            Repr::Sparse(c) => c.matvec(x),
            Repr::Dense(m) => (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
                .collect(),
            Repr::MatrixFree(mf) => {
                let d = self.hilbert_dim;
                let rho = Mat::from_fn(d, d, |i, j| x[i * d + j]);
                let out = mf.apply(&rho);
                let mut v = vec![C64::new(0.0, 0.0); d * d];
                for i in 0..d {
                    for j in 0..d {
                        v[i * d + j] = out[(i, j)];
                    }
                }
                v
            }
        }
    }

    /// Applies the (block of the) Liouvillian to an operator.
    ///
    /// For a block the operator is first projected onto the block's subspace.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        if rho.dim() != self.hilbert_dim {
            return Err(Error::Shape(format!(
                "operator has dimension {}, Liouvillian acts on {}",
                rho.dim(),
                self.hilbert_dim
            )));
        }
        let x = self.restrict(&vectorize(rho));
        let y = self.apply_vec(&x);
        unvectorize(&self.lift(&y), self.hilbert_dim)
    }

    /// Maps local coordinates to a full row-stacked vector.
    pub fn lift(&self, x: &[C64]) -> Vec<C64> {
        match &self.embedding {
            Embedding::Full => x.to_vec(),
            Embedding::Indices(idx) => {
                let mut v = vec![C64::new(0.0, 0.0); self.hilbert_dim * self.hilbert_dim];
                for (k, &g) in idx.iter().enumerate() {
                    v[g] = x[k];
                }
                v
            }
            Embedding::Basis(p) => (0..p.nrows())
                .map(|i| (0..p.ncols()).map(|k| p[(i, k)] * x[k]).sum())
                .collect(),
        }
    }

    /// Orthogonal projection of a full row-stacked vector onto local coordinates.
    pub fn restrict(&self, v: &[C64]) -> Vec<C64> {
        match &self.embedding {
            Embedding::Full => v.to_vec(),
            Embedding::Indices(idx) => idx.iter().map(|&g| v[g]).collect(),
            Embedding::Basis(p) => (0..p.ncols())
                .map(|k| (0..p.nrows()).map(|i| p[(i, k)].conj() * v[i]).sum())
                .collect(),
        }
    }

    /// Local operator from coordinates.
    pub fn to_operator(&self, x: &[C64]) -> Result<Operator> {
        unvectorize(&self.lift(x), self.hilbert_dim)
    }

    /// Row vector `t` with `t·x = Tr[lift(x)]`.
    pub fn trace_functional(&self) -> Vec<C64> {
        let d = self.hilbert_dim;
        let mut id = vec![C64::new(0.0, 0.0); d * d];
        for m in 0..d {
            id[m * d + m] = C64::new(1.0, 0.0);
        }
        match &self.embedding {
            Embedding::Basis(p) => (0..p.ncols())
                .map(|k| (0..p.nrows()).map(|i| p[(i, k)] * id[i]).sum())
                .collect(),
            _ => self.restrict(&id),
        }
    }

    /// Dense copy of the local matrix.
    pub fn to_dense(&self) -> Mat<C64> {
        match &self.repr {
            Repr::Sparse(c) => c.to_dense(),
            Repr::Dense(m) => (**m).clone(),
            Repr::MatrixFree(_) => {
                let n = self.len();
                let mut out = Mat::<C64>::zeros(n, n);
                let mut e = vec![C64::new(0.0, 0.0); n];
                for j in 0..n {
                    e[j] = C64::new(1.0, 0.0);
                    let col = self.apply_vec(&e);
                    for i in 0..n {
                        out[(i, j)] = col[i];
                    }
                    e[j] = C64::new(0.0, 0.0);
                }
                out
            }
        }
    }

    /// Sparse copy of the local matrix.
    pub fn to_csc(&self) -> Result<Csc> {
        match &self.repr {
            Repr::Sparse(c) => Ok((**c).clone()),
            Repr::Dense(m) => Ok(Csc::from_dense(m)),
            Repr::MatrixFree(_) => Err(Error::TooLarge {
                size: self.len(),
                limit: EXPLICIT_LIMIT,
                hint: "matrix-free Liouvillian has no stored entries",
            }),
        }
    }

    /// Block restricted to full coordinates `idx`.
    pub fn block_on_indices(&self, idx: Vec<usize>) -> Result<SuperMatrix> {
        if !matches!(self.embedding, Embedding::Full) {
            return Err(Error::Shape("blocks can only be taken of a full Liouvillian".into()));
        }
        let csc = self.to_csc()?.submatrix(&idx);
        let norm1 = csc.norm1();
        Ok(SuperMatrix {
            hilbert_dim: self.hilbert_dim,
            repr: Repr::Sparse(Arc::new(csc)),
            embedding: Embedding::Indices(Arc::new(idx)),
            norm1,
        })
    }

    /// Block `P† L P` on orthonormal columns `p`.
    pub fn block_on_basis(&self, p: Mat<C64>) -> Result<SuperMatrix> {
        if !matches!(self.embedding, Embedding::Full) {
            return Err(Error::Shape("blocks can only be taken of a full Liouvillian".into()));
        }
        let n = p.nrows();
        if n != self.len() {
            return Err(Error::Shape(format!("basis has {n} rows, expected {}", self.len())));
        }
        let k = p.ncols();
        let mut lp = Mat::<C64>::zeros(n, k);
        for c in 0..k {
            let col: Vec<C64> = (0..n).map(|i| p[(i, c)]).collect();
            let y = self.apply_vec(&col);
            for i in 0..n {
                lp[(i, c)] = y[i];
            }
        }
        let block = p.adjoint() * &lp;
        let norm1 = (0..k)
            .map(|j| (0..k).map(|i| block[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        Ok(SuperMatrix {
            hilbert_dim: self.hilbert_dim,
            repr: Repr::Dense(Arc::new(block)),
            embedding: Embedding::Basis(Arc::new(p)),
            norm1,
        })
    }

    /// Writes the local matrix in Matrix Market coordinate format.
    pub fn write_matrix_market<W: std::io::Write>(&self, w: W) -> Result<()> {
        let csc = self.to_csc()?;
        csc.write_matrix_market(w)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{kerr_model, two_level_model, two_photon_model, Jump, ModelMeta};
    use crate::operator::{destroy, hs_norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_op(rng: &mut ChaCha8Rng, d: usize) -> Operator {
        Operator::from_fn(d, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .unwrap()
    }

    fn random_model(rng: &mut ChaCha8Rng, d: usize) -> ModelSpec {
        let h = random_op(rng, d).hermitian_part();
        let jumps = (0..2)
            .map(|_| Jump {
                op: random_op(rng, d),
                rate: rng.random_range(0.1..2.0),
            })
            .collect();
        let meta = ModelMeta {
            params: None,
            n: 1.0,
            gamma: 1.0,
        };
        ModelSpec::new(h, jumps, meta).unwrap()
    }

    /// Master-equation right-hand side evaluated directly from operator products.
    fn direct_rhs(m: &ModelSpec, rho: &Operator) -> Operator {
        let h = &m.hamiltonian;
        let comm = h.matmul(rho).unwrap().sub(&rho.matmul(h).unwrap()).unwrap();
        let mut out = comm.scale(C64::new(0.0, -1.0));
        for j in &m.jumps {
            let g = &j.op;
            let gd = g.adjoint();
            let k = gd.matmul(g).unwrap();
            let d = g
                .matmul(rho)
                .unwrap()
                .matmul(&gd)
                .unwrap()
                .scale_real(2.0)
                .sub(&k.matmul(rho).unwrap())
                .unwrap()
                .sub(&rho.matmul(&k).unwrap())
                .unwrap();
            out = out.add(&d.scale_real(0.5 * j.rate)).unwrap();
        }
        out
    }

    #[test]
    fn explicit_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3, 5] {
            let m = random_model(&mut rng, d);
            let l = build_liouvillian(&m).unwrap();
            assert!(l.is_explicit());
            for _ in 0..5 {
                let rho = random_op(&mut rng, d);
                let want = direct_rhs(&m, &rho);
                let got = apply_liouvillian(&l, &rho).unwrap();
                assert!(hs_norm(&got.sub(&want).unwrap()) <= 1e-12 * hs_norm(&want));
            }
        }
    }

    #[test]
    fn matrix_free_matches_explicit() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = random_model(&mut rng, 4);
        let l = build_liouvillian(&m).unwrap();
        let f = build_liouvillian_with_limit(&m, 0).unwrap();
        assert!(!f.is_explicit());
        assert!(f.norm1() >= l.norm1());
        for _ in 0..50 {
            let x: Vec<C64> = (0..16)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let a = l.apply_vec(&x);
            let b = f.apply_vec(&x);
            let na: f64 = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let diff: f64 = a.iter().zip(&b).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
            assert!(diff <= 1e-12 * na);
        }
    }

    #[test]
    fn single_photon_decay() {
        let a = destroy(3).unwrap();
        let meta = ModelMeta {
            params: None,
            n: 1.0,
            gamma: 0.7,
        };
        let m = ModelSpec::new(Operator::zeros(3), vec![Jump { op: a, rate: 0.7 }], meta).unwrap();
        let l = build_liouvillian(&m).unwrap();
        let out = apply_liouvillian(&l, &Operator::basis(3, 1, 1)).unwrap();
        let want = Operator::real_diag(&[0.7, -0.7, 0.0]);
        assert!(hs_norm(&out.sub(&want).unwrap()) < 1e-15);
    }

    #[test]
    fn two_level_kernel_is_paper_steady_state() {
        let m = two_level_model(0.5, 0.5, 1.0).unwrap();
        let l = build_liouvillian(&m).unwrap();
        let rho = Operator::real_diag(&[0.4, 0.6]);
        let out = apply_liouvillian(&l, &rho).unwrap();
        assert!(hs_norm(&out) < 1e-15);
    }

    #[test]
    fn columns_are_traceless() {
        let models = [
            kerr_model(1.0, 0.5, 0.8, 1.0, 6).unwrap(),
            two_photon_model(-2.0, 0.5, 1.5, 1.0, 0.3, 6).unwrap(),
            two_level_model(0.2, 0.4, 1.0).unwrap(),
        ];
        for m in models {
            let l = build_liouvillian(&m).unwrap();
            let t = l.trace_functional();
            let dense = l.to_dense();
            for j in 0..l.len() {
                let s: C64 = (0..l.len()).map(|i| t[i] * dense[(i, j)]).sum();
                assert!(s.norm() < 1e-12 * l.norm1());
            }
        }
    }

    #[test]
    fn trace_preservation_and_linearity_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = random_model(&mut rng, 4);
        let l = build_liouvillian(&m).unwrap();
        for _ in 0..100 {
            let rho = random_op(&mut rng, 4).hermitian_part();
            let out = apply_liouvillian(&l, &rho).unwrap();
            assert!(out.trace().norm() <= 1e-12 * hs_norm(&rho) * l.norm1());
        }
        let (r1, r2) = (random_op(&mut rng, 4), random_op(&mut rng, 4));
        let (a, b) = (C64::new(0.3, -1.2), C64::new(-2.0, 0.5));
        let lhs = apply_liouvillian(&l, &r1.axpby(a, &r2, b).unwrap()).unwrap();
        let rhs = apply_liouvillian(&l, &r1)
            .unwrap()
            .axpby(a, &apply_liouvillian(&l, &r2).unwrap(), b)
            .unwrap();
        assert!(hs_norm(&lhs.sub(&rhs).unwrap()) <= 1e-12 * hs_norm(&lhs));
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let l = build_liouvillian(&two_level_model(0.2, 0.4, 1.0).unwrap()).unwrap();
        assert!(matches!(apply_liouvillian(&l, &Operator::identity(3)), Err(Error::Shape(_))));
    }

    #[test]
    fn matrix_market_export() {
        let l = build_liouvillian(&two_level_model(0.5, 0.5, 1.0).unwrap()).unwrap();
        let mut buf = Vec::new();
        l.write_matrix_market(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "%%MatrixMarket matrix coordinate complex general");
        let header: Vec<usize> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(&header[..2], &[4, 4]);
        assert_eq!(lines.count(), header[2]);
    }
}
