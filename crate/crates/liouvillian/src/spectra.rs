//! Eigen-analysis of the Liouvillian: spectra, steady state, gap, Hermitian
//! splitting of eigenmatrices and Jordan-structure detection.
//!
//! Eigenvalues are sorted by `|Re λ|`, ties (within `1e-12·(1 + |Re λ|)`) broken by
//! `Im λ` and then `|λ|`, so conjugate partners appear with negative imaginary part first.

use crate::arnoldi::{iram, ArnoldiOptions};
use crate::csc::Csc;
use crate::error::{Error, Result};
use crate::liouville::SuperMatrix;
use crate::operator::{eigh, from_spectral, hs_inner, hs_norm, Operator, C64};
use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::Serialize;

/// `zero_tol = ZERO_TOL_REL · ‖L‖₁`.
pub const ZERO_TOL_REL: f64 = 1e-12;
/// An eigenvalue counts as real when `|Im λ| ≤ IM_TOL_REL · γ`.
pub const IM_TOL_REL: f64 = 1e-8;
/// Largest local dimension handled by dense diagonalization.
pub const DENSE_LIMIT: usize = 10_000;
/// Required residual `‖Lx − λx‖ ≤ RESIDUAL_REL · ‖L‖₁` for iterative pairs.
pub const RESIDUAL_REL: f64 = 1e-9;
/// Density-matrix eigenvalues in `[PSD_FLOOR, 0)` are clipped to zero.
pub const PSD_FLOOR: f64 = -1e-10;

/// Eigenvalue with its unit-norm right eigenmatrix.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: C64,
    pub right: Operator,
    /// Dual eigenmatrix with `⟨left_i, right_j⟩ = δ_ij`, when available.
    pub left: Option<Operator>,
    /// Position in the sorted spectrum.
    pub index: usize,
    /// `‖L ρ̂ − λ ρ̂‖`.
    pub residual: f64,
}

/// Sorted eigenpairs of a (block of a) Liouvillian.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub pairs: Vec<EigenPair>,
    /// `|Re λ₁|`, see [`Spectrum::lambda1`].
    pub gap: f64,
    pub zero_tol: f64,
    pub norm1: f64,
    /// True when the block contains the trace direction, hence the steady state.
    pub has_trace_mode: bool,
}

impl Spectrum {
    pub fn values(&self) -> Vec<C64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    /// First decaying mode: the second pair when the block holds the steady state, else the first.
    pub fn lambda1(&self) -> Option<&EigenPair> {
        if self.has_trace_mode {
            self.pairs.get(1)
        } else {
            self.pairs.first()
        }
    }

    /// Pairs with `|λ| ≤ zero_tol`.
    pub fn zero_modes(&self) -> Vec<&EigenPair> {
        self.pairs
            .iter()
            .filter(|p| p.value.norm() <= self.zero_tol)
            .collect()
    }

    /// Index of the pair whose eigenmatrix carries the largest trace.
    pub fn trace_mode_index(&self) -> Option<usize> {
        self.pairs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.right.trace().norm().total_cmp(&b.1.right.trace().norm()))
            .map(|(i, _)| i)
    }
}

/// Eigenmatrix split `ρ̂ = w (ρ⁺ − ρ⁻)` into density matrices.
#[derive(Clone, Debug)]
pub struct PhaseSplit {
    pub plus: Operator,
    pub minus: Operator,
    pub weight: f64,
    /// Hermitian representative of the eigenmatrix that was split.
    pub mode: Operator,
}

/// Multiplicities of an eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct JordanReport {
    pub algebraic: usize,
    pub geometric: usize,
    /// Set when a singular value lies within a factor 10 of the rank threshold.
    pub indeterminate: bool,
    pub singular_values: Vec<f64>,
}

/// Options for [`leading_spectrum_with`].
#[derive(Clone, Debug)]
pub struct LeadingOptions {
    pub seed: u64,
    pub tol: f64,
    pub max_restarts: usize,
    pub ncv: Option<usize>,
    /// Below this local dimension the dense solver is used instead.
    pub dense_threshold: usize,
    pub force_iterative: bool,
}

impl Default for LeadingOptions {
    fn default() -> Self {
        LeadingOptions {
            seed: 42,
            tol: 1e-13,
            max_restarts: 500,
            ncv: None,
            dense_threshold: 400,
            force_iterative: false,
        }
    }
}

/// Default shift for shift-invert: slightly to the right of the origin.
pub const DEFAULT_SHIFT: f64 = 0.01;

fn local_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn residual(l: &SuperMatrix, lam: C64, x: &[C64]) -> f64 {
    let y = l.apply_vec(x);
    y.iter()
        .zip(x)
        .map(|(a, b)| (a - lam * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Sort order of eigenvalues by `(|Re λ|, Im λ, |λ|)` with tolerant grouping of `|Re λ|`.
pub fn sort_order(vals: &[C64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].re.abs().total_cmp(&vals[b].re.abs()).then(a.cmp(&b)));
    let mut out = Vec::with_capacity(order.len());
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() {
            let (p, q) = (vals[order[j - 1]].re.abs(), vals[order[j]].re.abs());
            if q - p <= 1e-12 * (1.0 + q) {
                j += 1;
            } else {
                break;
            }
        }
        let mut group = order[i..j].to_vec();
        group.sort_by(|&a, &b| {
            vals[a]
                .im
                .total_cmp(&vals[b].im)
                .then(vals[a].norm().total_cmp(&vals[b].norm()))
                .then(a.cmp(&b))
        });
        out.extend(group);
        i = j;
    }
    out
}

/// Global phase making `m` Hermitian, when one exists.
///
/// The phase solves `e^{2iφ} = ⟨M, M†⟩ / ‖M‖²`; the sign is chosen so the largest-modulus
/// diagonal entry is positive (falling back to the first largest entry for zero-diagonal
/// matrices). Returns the symmetrized, renormalized representative.
pub fn phase_fix(m: &Operator) -> Option<Operator> {
    let nm = hs_norm(m);
    if nm == 0.0 {
        return None;
    }
    let overlap = hs_inner(m, &m.adjoint()).ok()?;
    if overlap.norm() < 0.5 * nm * nm {
        return None;
    }
    let phase = C64::from_polar(1.0, 0.5 * overlap.arg());
    let mut r = m.scale(phase);
    if r.hermiticity_defect() > 1e-6 * nm {
        return None;
    }
    let d = r.dim();
    let (mut best, mut bi) = (0.0, 0);
    for i in 0..d {
        let v = r.get(i, i).norm();
        if v > best * (1.0 + 1e-12) {
            best = v;
            bi = i;
        }
    }
    let entries = r.to_mat();
    let maxabs = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| entries[(i, j)].norm())
        .fold(0.0, f64::max);
    let sign = if best > 1e-9 * maxabs {
        r.get(bi, bi).re.signum()
    } else {
        let (i, j) = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .find(|&(i, j)| entries[(i, j)].norm() >= maxabs * (1.0 - 1e-9))
            .unwrap_or((0, 0));
        let v = entries[(i, j)];
        if v.re.abs() > 1e-9 * maxabs {
            v.re.signum()
        } else {
            v.im.signum()
        }
    };
    if sign < 0.0 {
        r = r.scale_real(-1.0);
    }
    let h = r.hermitian_part();
    let nh = hs_norm(&h);
    Some(h.scale_real(1.0 / nh))
}

fn dense_eig(m: &Mat<C64>) -> Result<(Vec<C64>, Mat<C64>)> {
    let e = m
        .eigen()
        .map_err(|e| Error::Conditioning(format!("dense eigensolver: {e:?}")))?;
    let s = e.S();
    Ok(((0..m.nrows()).map(|i| s[i]).collect(), e.U().to_owned()))
}

struct RawPair {
    value: C64,
    x: Vec<C64>,
}

fn finish(
    l: &SuperMatrix,
    raw: Vec<RawPair>,
    im_tol: f64,
    with_left: bool,
) -> Result<Spectrum> {
    let n = l.len();
    let vals: Vec<C64> = raw.iter().map(|r| r.value).collect();
    let order = sort_order(&vals);
    let zero_tol = ZERO_TOL_REL * l.norm1();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(raw.len());
    let mut values = Vec::with_capacity(raw.len());
    let mut rights = Vec::with_capacity(raw.len());
    let mut residuals = Vec::with_capacity(raw.len());
    for &i in &order {
        let r = &raw[i];
        let mut x = r.x.clone();
        let nx = local_norm(&x);
        x.iter_mut().for_each(|t| *t /= nx);
        let mut op = l.to_operator(&x)?;
        if r.value.im.abs() <= im_tol {
            if let Some(h) = phase_fix(&op) {
                let hx = l.restrict(&crate::operator::vectorize(&h));
                if residual(l, r.value, &hx) <= 10.0 * residual(l, r.value, &x) + 1e-12 * l.norm1()
                {
                    x = hx;
                    op = h;
                }
            }
        }
        residuals.push(residual(l, r.value, &x));
        values.push(r.value);
        rights.push(op);
        cols.push(x);
    }
    let mut lefts: Vec<Option<Operator>> = vec![None; values.len()];
    if with_left && values.len() == n {
        let u = Mat::from_fn(n, n, |i, j| cols[j][i]);
        let y = u.partial_piv_lu().solve(Mat::<C64>::identity(n, n));
        let prod = &y * &u;
        let mut err = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                err = err.max((prod[(i, j)] - C64::new(want, 0.0)).norm());
            }
        }
        let finite = (0..n).all(|i| (0..n).all(|j| y[(i, j)].re.is_finite() && y[(i, j)].im.is_finite()));
        if finite && err <= 1e-6 {
            for (i, slot) in lefts.iter_mut().enumerate() {
                let row: Vec<C64> = (0..n).map(|k| y[(i, k)].conj()).collect();
                *slot = Some(l.to_operator(&row)?);
            }
        }
    }
    let pairs: Vec<EigenPair> = values
        .into_iter()
        .zip(rights)
        .zip(lefts)
        .zip(residuals)
        .enumerate()
        .map(|(index, (((value, right), left), residual))| EigenPair {
            value,
            right,
            left,
            index,
            residual,
        })
        .collect();
    let has_trace_mode = local_norm(&l.trace_functional()) > 0.0;
    let mut s = Spectrum {
        pairs,
        gap: f64::NAN,
        zero_tol,
        norm1: l.norm1(),
        has_trace_mode,
    };
    s.gap = s.lambda1().map(|p| p.value.re.abs()).unwrap_or(f64::NAN);
    Ok(s)
}

/// Every eigenpair of an explicitly stored (block of a) Liouvillian, by dense diagonalization.
///
/// Left eigenmatrices are attached when the eigenvector matrix is invertible.
pub fn full_spectrum(l: &SuperMatrix) -> Result<Spectrum> {
    full_spectrum_with_im_tol(l, IM_TOL_REL)
}

/// As [`full_spectrum`] with the tolerance for treating eigenvalues as real.
pub fn full_spectrum_with_im_tol(l: &SuperMatrix, im_tol: f64) -> Result<Spectrum> {
    let n = l.len();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: DENSE_LIMIT,
            hint: "use leading_spectrum for large Liouvillians",
        });
    }
    let (vals, u) = dense_eig(&l.to_dense())?;
    let raw = vals
        .iter()
        .enumerate()
        .map(|(j, &value)| RawPair {
            value,
            x: (0..n).map(|i| u[(i, j)]).collect(),
        })
        .collect();
    finish(l, raw, im_tol, true)
}

enum Factor {
    Sparse(crate::csc::SparseLu),
    Dense(faer::linalg::solvers::PartialPivLu<C64>),
}

impl Factor {
    fn solve(&self, b: &mut [C64]) -> Result<()> {
        match self {
            Factor::Sparse(lu) => lu.solve_in_place(b),
            Factor::Dense(lu) => {
                let n = b.len();
                let mut rhs = faer::MatMut::from_column_major_slice_mut(b, n, 1);
                lu.solve_in_place(rhs.as_mut());
                if b.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::Factorization("singular factor".into()))
                }
            }
        }
    }
}

fn factor_matrix(l: &SuperMatrix, shift: C64, row: Option<(usize, &[C64])>) -> Result<Factor> {
    if let Some(d) = l.dense_entries() {
        let mut m = d.clone();
        for i in 0..m.nrows() {
            m[(i, i)] -= shift;
        }
        if let Some((r, t)) = row {
            for (j, &v) in t.iter().enumerate() {
                m[(r, j)] = v;
            }
        }
        let lu = m.partial_piv_lu();
        return Ok(Factor::Dense(lu));
    }
    let csc: Csc = match l.csc() {
        Some(c) => c.clone(),
        None => l.to_csc()?,
    };
    let mut a = if shift == C64::new(0.0, 0.0) {
        csc
    } else {
        csc.shifted(shift)
    };
    if let Some((r, t)) = row {
        a = a.with_row_replaced(r, t);
    }
    Ok(Factor::Sparse(a.lu()?))
}

/// The `k` eigenpairs nearest `shift`, by shift-invert Arnoldi, re-sorted by `|Re λ|`.
pub fn leading_spectrum(l: &SuperMatrix, k: usize, shift: C64) -> Result<Spectrum> {
    leading_spectrum_with(l, k, shift, &LeadingOptions::default(), IM_TOL_REL)
}

/// As [`leading_spectrum`] with explicit solver options and real-eigenvalue tolerance.
///
/// A factorization that fails or yields non-finite values at `shift` is retried at
/// `shift·(1 + 1e-6) + 1e-8·(1 + i)` up to three times.
pub fn leading_spectrum_with(
    l: &SuperMatrix,
    k: usize,
    shift: C64,
    opts: &LeadingOptions,
    im_tol: f64,
) -> Result<Spectrum> {
    let n = l.len();
    if k == 0 {
        return Err(Error::Parameter("k must be positive".into()));
    }
    let k = k.min(n);
    if (n <= opts.dense_threshold && !opts.force_iterative) || k >= n {
        let (vals, u) = dense_eig(&l.to_dense())?;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| {
            (vals[a] - shift)
                .norm()
                .total_cmp(&(vals[b] - shift).norm())
                .then(a.cmp(&b))
        });
        let raw = idx[..k]
            .iter()
            .map(|&j| RawPair {
                value: vals[j],
                x: (0..n).map(|i| u[(i, j)]).collect(),
            })
            .collect();
        return finish(l, raw, im_tol, false);
    }
    let mut sigma = shift;
    let mut last_err = None;
    for _attempt in 0..4 {
        let factor = match factor_matrix(l, sigma, None) {
            Ok(f) => f,
            Err(e) => {
                last_err = Some(e);
                sigma = sigma * (1.0 + 1e-6) + C64::new(1e-8, 1e-8);
                continue;
            }
        };
        let mut apply = |x: &[C64]| -> Result<Vec<C64>> {
            let mut b = x.to_vec();
            factor.solve(&mut b)?;
            Ok(b)
        };
        let aopts = ArnoldiOptions {
            k,
            ncv: opts.ncv,
            tol: opts.tol,
            max_restarts: opts.max_restarts,
            seed: opts.seed,
        };
        match iram(n, &mut apply, &aopts) {
            Ok(r) => {
                let raw: Vec<RawPair> = r
                    .values
                    .iter()
                    .zip(r.vectors)
                    .map(|(&theta, x)| RawPair {
                        value: sigma + C64::new(1.0, 0.0) / theta,
                        x,
                    })
                    .collect();
                let spec = finish(l, raw, im_tol, false)?;
                let limit = RESIDUAL_REL * l.norm1();
                let worst = spec.pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
                if worst > limit {
                    return Err(Error::Conditioning(format!(
                        "eigenpair residual {worst:.3e} exceeds {limit:.3e}"
                    )));
                }
                return Ok(spec);
            }
            Err(Error::Factorization(m)) => {
                last_err = Some(Error::Factorization(m));
                sigma = sigma * (1.0 + 1e-6) + C64::new(1e-8, 1e-8);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Factorization("shift-invert failed".into())))
}

/// Spectrum of the `k` slowest modes, dense for small blocks and shift-invert otherwise.
pub fn low_spectrum(l: &SuperMatrix, k: usize) -> Result<Spectrum> {
    leading_spectrum(l, k, C64::new(DEFAULT_SHIFT, 0.0))
}

/// Cleans a Hermitian-ish unit-trace candidate: symmetrize, normalize, clip small negative eigenvalues.
pub fn to_density_matrix(rho: &Operator) -> Result<Operator> {
    let h = rho.hermitian_part();
    let tr = h.trace().re;
    if !(tr.abs() > 0.0) {
        return Err(Error::InvalidState("zero trace".into()));
    }
    let h = h.scale_real(1.0 / tr);
    let (w, u) = eigh(&h)?;
    let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
    if min >= 0.0 {
        return Ok(h);
    }
    if min < PSD_FLOOR {
        return Err(Error::InvalidState(format!(
            "eigenvalue {min:.3e} below the clipping floor"
        )));
    }
    let clipped: Vec<f64> = w.iter().map(|&x| x.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    let scaled: Vec<f64> = clipped.iter().map(|x| x / s).collect();
    from_spectral(&scaled, &u)
}

/// Steady state assuming a unique zero mode: solves `Lρ = 0` with one equation replaced by `Tr ρ = 1`.
pub fn steady_state_unchecked(l: &SuperMatrix) -> Result<Operator> {
    let t = l.trace_functional();
    let (r, _) = t
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .ok_or_else(|| Error::Shape("empty Liouvillian".into()))?;
    if t[r].norm() == 0.0 {
        return Err(Error::Symmetry(
            "block does not contain the trace direction; no steady state lives here".into(),
        ));
    }
    let factor = factor_matrix(l, C64::new(0.0, 0.0), Some((r, &t)))?;
    let mut b = vec![C64::new(0.0, 0.0); l.len()];
    b[r] = C64::new(1.0, 0.0);
    factor.solve(&mut b)?;
    let rho = to_density_matrix(&l.to_operator(&b)?)?;
    let res = hs_norm(&l.apply(&rho)?);
    if res > 1e-10 * l.norm1() {
        return Err(Error::Conditioning(format!(
            "steady-state residual {res:.3e} exceeds 1e-10·‖L‖₁"
        )));
    }
    Ok(rho)
}

/// Unique steady state `ρ_ss` with `Lρ_ss = 0`, `Tr ρ_ss = 1`.
///
/// Fails with [`Error::DegenerateKernel`] (carrying the zero modes) when more than one
/// eigenvalue lies within `zero_tol`.
pub fn steady_state(l: &SuperMatrix) -> Result<Operator> {
    let spec = low_spectrum(l, 2.min(l.len()))?;
    check_unique_kernel(&spec)?;
    steady_state_unchecked(l)
}

/// Errors with [`Error::DegenerateKernel`] when the spectrum has several zero modes.
pub fn check_unique_kernel(spec: &Spectrum) -> Result<()> {
    let zeros = spec.zero_modes();
    if zeros.len() > 1 {
        return Err(Error::DegenerateKernel {
            basis: zeros.into_iter().map(|p| p.right.clone()).collect(),
        });
    }
    Ok(())
}

/// `(|Re λ₁|, Im λ₁)`.
pub fn liouvillian_gap(l: &SuperMatrix) -> Result<(f64, f64)> {
    let spec = low_spectrum(l, 4.min(l.len()))?;
    gap_of(&spec)
}

/// `(|Re λ₁|, Im λ₁)` of a computed spectrum.
pub fn gap_of(spec: &Spectrum) -> Result<(f64, f64)> {
    let p = spec
        .lambda1()
        .ok_or_else(|| Error::NotFound("spectrum has no decaying mode".into()))?;
    Ok((p.value.re.abs(), p.value.im))
}

/// Splits a real-eigenvalue Hermitian eigenmatrix into density matrices `ρ̂ = w(ρ⁺ − ρ⁻)`.
///
/// An already Hermitian eigenmatrix keeps its sign; otherwise the phase is fixed first.
pub fn hermitian_split(p: &EigenPair) -> Result<PhaseSplit> {
    hermitian_split_with(p, IM_TOL_REL)
}

/// As [`hermitian_split`] with an explicit tolerance on `|Im λ|`.
pub fn hermitian_split_with(p: &EigenPair, im_tol: f64) -> Result<PhaseSplit> {
    if p.value.im.abs() > im_tol {
        return Err(Error::ComplexEigenvalue(p.value));
    }
    let n = hs_norm(&p.right);
    let mode = if p.right.hermiticity_defect() <= 1e-8 * n {
        p.right.hermitian_part()
    } else {
        phase_fix(&p.right).ok_or_else(|| {
            Error::SplitUndefined("eigenmatrix is not Hermitian up to a global phase".into())
        })?
    };
    split_hermitian(&mode)
}

/// Splits a Hermitian operator into its positive and negative parts, each trace-normalized.
pub fn split_hermitian(mode: &Operator) -> Result<PhaseSplit> {
    let (w, u) = eigh(mode)?;
    let pos: Vec<f64> = w.iter().map(|&x| x.max(0.0)).collect();
    let neg: Vec<f64> = w.iter().map(|&x| (-x).max(0.0)).collect();
    let (sp, sn) = (pos.iter().sum::<f64>(), neg.iter().sum::<f64>());
    if sp.min(sn) <= 1e-12 * (sp + sn) {
        return Err(Error::SplitUndefined(
            "eigenmatrix is semidefinite (a trace-carrying mode)".into(),
        ));
    }
    let plus = from_spectral(&pos.iter().map(|x| x / sp).collect::<Vec<_>>(), &u)?;
    let minus = from_spectral(&neg.iter().map(|x| x / sn).collect::<Vec<_>>(), &u)?;
    Ok(PhaseSplit {
        plus,
        minus,
        weight: 0.5 * (sp + sn),
        mode: mode.clone(),
    })
}

impl PhaseSplit {
    /// `(ρ⁺ + ρ⁻)/2`.
    pub fn mixture(&self) -> Operator {
        self.plus.add(&self.minus).expect("same dims").scale_real(0.5)
    }

    /// Exchanges the roles of `ρ⁺` and `ρ⁻` (and flips the sign of the mode).
    pub fn swapped(self) -> Self {
        PhaseSplit {
            plus: self.minus,
            minus: self.plus,
            weight: self.weight,
            mode: self.mode.scale_real(-1.0),
        }
    }
}

/// Hermitian combinations `ρ̂ + ρ̂†` and `i(ρ̂ − ρ̂†)`, each HS-normalized.
///
/// The second is `None` when it vanishes (a self-conjugate real mode).
pub fn hermitize(p: &EigenPair, p_conj: &EigenPair) -> Result<(Operator, Option<Operator>)> {
    let scale = 1.0f64.max(p.value.norm());
    if (p_conj.value - p.value.conj()).norm() > 1e-8 * scale {
        return Err(Error::Pairing(format!(
            "{} is not the conjugate of {}",
            p_conj.value, p.value
        )));
    }
    let dag = p.right.adjoint();
    let ov = hs_inner(&p_conj.right, &dag)?.norm() / (hs_norm(&p_conj.right) * hs_norm(&dag));
    if ov < 1.0 - 1e-6 {
        return Err(Error::Pairing(format!(
            "partner eigenmatrix is not the adjoint up to a phase (overlap {ov:.6})"
        )));
    }
    let a = p.right.add(&dag)?;
    let b = p.right.sub(&dag)?.scale(C64::new(0.0, 1.0));
    let n = hs_norm(&p.right);
    let (na, nb) = (hs_norm(&a), hs_norm(&b));
    let first = if na > 1e-12 * n {
        a.scale_real(1.0 / na)
    } else {
        b.scale_real(1.0 / nb)
    };
    let second = if na > 1e-12 * n && nb > 1e-12 * n {
        Some(b.scale_real(1.0 / nb))
    } else {
        None
    };
    Ok((first, second))
}

/// Algebraic and geometric multiplicity of `lambda`.
///
/// The algebraic count uses eigenvalues within `√tol · max(1, ‖L‖₁)` of `lambda`; the
/// geometric count is the number of singular values of `L − λI` below `tol · σ_max`.
pub fn detect_jordan(l: &SuperMatrix, lambda: C64, tol: f64) -> Result<JordanReport> {
    let n = l.len();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: DENSE_LIMIT,
            hint: "Jordan detection needs a dense factorization",
        });
    }
    let dense = l.to_dense();
    let vals = dense
        .eigenvalues()
        .map_err(|e| Error::Conditioning(format!("dense eigensolver: {e:?}")))?;
    let radius = tol.sqrt() * l.norm1().max(1.0);
    let algebraic = vals.iter().filter(|v| (**v - lambda).norm() <= radius).count();
    if algebraic == 0 {
        return Err(Error::Parameter(format!(
            "{lambda} is not within {radius:.3e} of any eigenvalue"
        )));
    }
    let mut shifted = dense;
    for i in 0..n {
        shifted[(i, i)] -= lambda;
    }
    let sv = shifted
        .singular_values()
        .map_err(|e| Error::Conditioning(format!("SVD: {e:?}")))?;
    let smax = sv.first().cloned().unwrap_or(0.0);
    let threshold = tol * smax;
    let geometric = sv.iter().filter(|&&s| s < threshold).count();
    let indeterminate = sv
        .iter()
        .any(|&s| s >= threshold / 10.0 && s <= threshold * 10.0);
    Ok(JordanReport {
        algebraic,
        geometric,
        indeterminate,
        singular_values: sv,
    })
}
