//! Implicitly restarted Arnoldi iteration with exact shifts.
//!
//! Finds the `k` eigenpairs of largest modulus of a linear operator given only its
//! action. Used on `(L − σI)⁻¹` for shift-invert access to the eigenvalues of `L`
//! nearest `σ`.

use crate::error::{Error, Result};
use crate::operator::C64;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Iteration controls.
#[derive(Clone, Debug)]
pub struct ArnoldiOptions {
    /// Number of wanted eigenpairs.
    pub k: usize,
    /// Krylov basis size; defaults to `max(2k + 10, 30)` capped by the dimension.
    pub ncv: Option<usize>,
    /// Relative accuracy of the Ritz estimates.
    pub tol: f64,
    pub max_restarts: usize,
    /// Seed of the start vector.
    pub seed: u64,
}

impl Default for ArnoldiOptions {
    fn default() -> Self {
        ArnoldiOptions {
            k: 6,
            ncv: None,
            tol: 1e-13,
            max_restarts: 500,
            seed: 42,
        }
    }
}

/// Converged Ritz pairs, largest modulus first.
#[derive(Clone, Debug)]
pub struct ArnoldiResult {
    pub values: Vec<C64>,
    pub vectors: Vec<Vec<C64>>,
    pub restarts: usize,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (u, v) in y.iter_mut().zip(x) {
        *u += a * v;
    }
}

fn givens(a: C64, b: C64) -> (f64, C64) {
    if b.norm() == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if a.norm() == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = a.norm().hypot(b.norm());
    (a.norm() / r, (a / a.norm()) * b.conj() / r)
}

/// One shifted QR step `H ← Q_stepᴴ H Q_step` on an upper Hessenberg matrix, accumulating `Q`.
fn qr_shift(h: &mut Mat<C64>, q: &mut Mat<C64>, mu: C64) {
    let m = h.nrows();
    for i in 0..m {
        h[(i, i)] -= mu;
    }
    let mut rots = Vec::with_capacity(m.saturating_sub(1));
    for j in 0..m.saturating_sub(1) {
        let (c, s) = givens(h[(j, j)], h[(j + 1, j)]);
        for col in j..m {
            let (x, y) = (h[(j, col)], h[(j + 1, col)]);
            h[(j, col)] = x * c + s * y;
            h[(j + 1, col)] = -s.conj() * x + y * c;
        }
        h[(j + 1, j)] = C64::new(0.0, 0.0);
        rots.push((c, s));
    }
    for (j, &(c, s)) in rots.iter().enumerate() {
        for row in 0..(j + 2).min(m) {
            let (x, y) = (h[(row, j)], h[(row, j + 1)]);
            h[(row, j)] = x * c + y * s.conj();
            h[(row, j + 1)] = -x * s + y * c;
        }
        for row in 0..m {
            let (x, y) = (q[(row, j)], q[(row, j + 1)]);
            q[(row, j)] = x * c + y * s.conj();
            q[(row, j + 1)] = -x * s + y * c;
        }
    }
    for i in 0..m {
        h[(i, i)] += mu;
    }
}

struct Factorization<'a> {
    n: usize,
    m: usize,
    v: Vec<Vec<C64>>,
    h: Mat<C64>,
    f: Vec<C64>,
    beta: f64,
    rng: ChaCha8Rng,
    apply: &'a mut dyn FnMut(&[C64]) -> Result<Vec<C64>>,
}

impl Factorization<'_> {
    fn orthogonalize(&self, w: &mut [C64], upto: usize, col: Option<&mut Vec<C64>>) {
        let mut coeffs = vec![C64::new(0.0, 0.0); upto];
        for _ in 0..2 {
            for (i, vi) in self.v.iter().take(upto).enumerate() {
                let c = dot(vi, w);
                coeffs[i] += c;
                axpy(w, -c, vi);
            }
        }
        if let Some(col) = col {
            *col = coeffs;
        }
    }

    fn random_orthogonal(&mut self, upto: usize) -> Vec<C64> {
        loop {
            let mut w: Vec<C64> = (0..self.n)
                .map(|_| C64::new(self.rng.random_range(-1.0..1.0), self.rng.random_range(-1.0..1.0)))
                .collect();
            self.orthogonalize(&mut w, upto, None);
            let nw = norm(&w);
            if nw > 1e-8 {
                w.iter_mut().for_each(|x| *x /= nw);
                return w;
            }
        }
    }

    /// Extends an Arnoldi factorization of length `start` (with `v[start]` present) to length `m`.
    fn extend(&mut self, start: usize) -> Result<()> {
        for j in start..self.m {
            let mut w = (self.apply)(&self.v[j])?;
            let scale = norm(&w);
            let mut col = Vec::new();
            self.orthogonalize(&mut w, j + 1, Some(&mut col));
            for (i, c) in col.into_iter().enumerate() {
                self.h[(i, j)] = c;
            }
            let beta = norm(&w);
            let breakdown = beta <= 1e-14 * scale.max(f64::MIN_POSITIVE);
            if j + 1 < self.m {
                if breakdown {
                    self.h[(j + 1, j)] = C64::new(0.0, 0.0);
                    let r = self.random_orthogonal(j + 1);
                    self.v.push(r);
                } else {
                    self.h[(j + 1, j)] = C64::new(beta, 0.0);
                    w.iter_mut().for_each(|x| *x /= beta);
                    self.v.push(w);
                }
            } else {
                self.beta = if breakdown { 0.0 } else { beta };
                self.f = w;
            }
        }
        Ok(())
    }
}

/// Ritz values and unit Ritz vectors (in Krylov coordinates) of `h`.
fn ritz(h: &Mat<C64>) -> Result<(Vec<C64>, Mat<C64>)> {
    let e = h
        .eigen()
        .map_err(|e| Error::Conditioning(format!("Hessenberg eigensolver: {e:?}")))?;
    let m = h.nrows();
    let s = e.S();
    let vals: Vec<C64> = (0..m).map(|i| s[i]).collect();
    let mut y = e.U().to_owned();
    for c in 0..m {
        let nrm = (0..m).map(|i| y[(i, c)].norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 {
            for i in 0..m {
                y[(i, c)] /= nrm;
            }
        }
    }
    Ok((vals, y))
}

fn by_modulus(vals: &[C64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| {
        vals[b]
            .norm()
            .total_cmp(&vals[a].norm())
            .then(vals[a].re.total_cmp(&vals[b].re))
            .then(vals[a].im.total_cmp(&vals[b].im))
    });
    order
}

/// Largest-modulus eigenpairs of the operator `apply` on `C^n`.
pub fn iram(
    n: usize,
    apply: &mut dyn FnMut(&[C64]) -> Result<Vec<C64>>,
    opts: &ArnoldiOptions,
) -> Result<ArnoldiResult> {
    let k = opts.k;
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!(
            "Arnoldi needs 0 < k < n, got k = {k}, n = {n}"
        )));
    }
    let m = opts.ncv.unwrap_or((2 * k + 10).max(30)).min(n).max(k + 1);
    let keep = (k + (m - k) / 2).min(m - 1).max(k);
    let mut fac = Factorization {
        n,
        m,
        v: Vec::with_capacity(m + 1),
        h: Mat::zeros(m, m),
        f: vec![],
        beta: 0.0,
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        apply,
    };
    let v0 = fac.random_orthogonal(0);
    fac.v.push(v0);
    fac.extend(0)?;

    let mut restarts = 0;
    loop {
        let (vals, y) = ritz(&fac.h)?;
        let order = by_modulus(&vals);
        let estimates: Vec<f64> = order[..k]
            .iter()
            .map(|&i| fac.beta * y[(m - 1, i)].norm() / vals[i].norm().max(f64::MIN_POSITIVE))
            .collect();
        let converged = estimates.iter().filter(|&&e| e <= opts.tol).count();
        if converged == k || m == n {
            let vectors = order[..k]
                .iter()
                .map(|&i| {
                    let mut x = vec![C64::new(0.0, 0.0); n];
                    for (j, vj) in fac.v.iter().enumerate().take(m) {
                        axpy(&mut x, y[(j, i)], vj);
                    }
                    let nx = norm(&x);
                    x.iter_mut().for_each(|t| *t /= nx);
                    x
                })
                .collect();
            return Ok(ArnoldiResult {
                values: order[..k].iter().map(|&i| vals[i]).collect(),
                vectors,
                restarts,
            });
        }
        if restarts >= opts.max_restarts {
            return Err(Error::NoConvergence {
                wanted: k,
                converged,
                restarts,
                worst: estimates.iter().cloned().fold(0.0, f64::max),
            });
        }
        restarts += 1;

        let mut q = Mat::<C64>::identity(m, m);
        for &i in &order[keep..] {
            qr_shift(&mut fac.h, &mut q, vals[i]);
        }
        let mut newv = Vec::with_capacity(m + 1);
        for c in 0..=keep {
            let mut x = vec![C64::new(0.0, 0.0); n];
            for (j, vj) in fac.v.iter().enumerate().take(m) {
                let qc = q[(j, c)];
                if qc != C64::new(0.0, 0.0) {
                    axpy(&mut x, qc, vj);
                }
            }
            newv.push(x);
        }
        let mut f: Vec<C64> = newv[keep].iter().map(|x| x * fac.h[(keep, keep - 1)]).collect();
        if fac.beta > 0.0 {
            axpy(&mut f, q[(m - 1, keep - 1)], &fac.f);
        }
        newv.truncate(keep);
        fac.v = newv;
        for i in 0..m {
            for j in 0..m {
                if i >= keep || j >= keep {
                    fac.h[(i, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        fac.orthogonalize(&mut f, keep, None);
        let nf = norm(&f);
        if nf <= 1e-14 {
            fac.h[(keep, keep - 1)] = C64::new(0.0, 0.0);
            let r = fac.random_orthogonal(keep);
            fac.v.push(r);
        } else {
            fac.h[(keep, keep - 1)] = C64::new(nf, 0.0);
            f.iter_mut().for_each(|x| *x /= nf);
            fac.v.push(f);
        }
        fac.extend(keep)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_op(d: Vec<C64>) -> impl FnMut(&[C64]) -> Result<Vec<C64>> {
        move |x: &[C64]| Ok(x.iter().zip(&d).map(|(a, b)| a * b).collect())
    }

    #[test]
    fn finds_largest_of_diagonal_operator() {
        let n = 200;
        let d: Vec<C64> = (0..n)
            .map(|i| C64::new(1.0 / (1.0 + i as f64), 0.3 * (i as f64).sin()))
            .collect();
        let mut want: Vec<C64> = d.clone();
        want.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let mut op = diag_op(d);
        let opts = ArnoldiOptions {
            k: 5,
            ..Default::default()
        };
        let r = iram(n, &mut op, &opts).unwrap();
        for (got, w) in r.values.iter().zip(&want) {
            assert!((got - w).norm() < 1e-11, "{got} vs {w}");
        }
        for (x, lam) in r.vectors.iter().zip(&r.values) {
            let ax = op(x).unwrap();
            let res: f64 = ax
                .iter()
                .zip(x)
                .map(|(a, b)| (a - lam * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-10);
        }
    }

    #[test]
    fn qr_shift_preserves_similarity() {
        let m = 6;
        let mut h = Mat::from_fn(m, m, |i, j| {
            if i > j + 1 {
                C64::new(0.0, 0.0)
            } else {
                C64::new((i + 2 * j) as f64 * 0.1 + 1.0, (i as f64 - j as f64) * 0.3)
            }
        });
        let h0 = h.clone();
        let mut q = Mat::<C64>::identity(m, m);
        qr_shift(&mut h, &mut q, C64::new(0.4, -0.2));
        let back = &q * &h * q.adjoint();
        for i in 0..m {
            for j in 0..m {
                assert!((back[(i, j)] - h0[(i, j)]).norm() < 1e-12);
                if i > j + 1 {
                    assert!(h[(i, j)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_k() {
        let mut op = diag_op(vec![C64::new(1.0, 0.0); 4]);
        let opts = ArnoldiOptions {
            k: 4,
            ..Default::default()
        };
        assert!(matches!(iram(4, &mut op, &opts), Err(Error::Parameter(_))));
    }
}
