//! Time evolution `ρ(t) = e^{Lt} ρ(0)`: matrix exponential, Krylov propagation and
//! spectral decomposition over biorthonormal eigenmatrices.

use crate::error::{Error, Result};
use crate::liouville::{Embedding, SuperMatrix};
use crate::models::{pauli, two_level_model};
use crate::operator::{hs_inner, hs_norm, vectorize, Operator, C64};
use crate::spectra::Spectrum;
use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::Serialize;
use std::io::Write;

/// Explicit supermatrices up to this size are exponentiated densely.
pub const DENSE_EXPM_LIMIT: usize = 1600;
/// Local error tolerance of the Krylov propagator.
pub const KRYLOV_TOL: f64 = 1e-10;
/// Krylov subspace dimension.
pub const KRYLOV_DIM: usize = 30;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn mat_norm1(a: &Mat<C64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn lincomb(terms: &[(f64, &Mat<C64>)], identity: f64, n: usize) -> Mat<C64> {
    let mut out = Mat::<C64>::zeros(n, n);
    for (c, m) in terms {
        out += *m * faer::Scale(C64::new(*c, 0.0));
    }
    for i in 0..n {
        out[(i, i)] += C64::new(identity, 0.0);
    }
    out
}

/// Dense matrix exponential by degree-13 Padé approximation with scaling and squaring.
pub fn expm_dense(a: &Mat<C64>) -> Result<Mat<C64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Shape("expm needs a square matrix".into()));
    }
    let norm = mat_norm1(a);
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * faer::Scale(C64::new(2f64.powi(-s), 0.0));
    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], 0.0, n);
    let u_poly = &a6 * &inner_u + lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], b[1], n);
    let u = &a * &u_poly;
    let inner_v = lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], 0.0, n);
    let v = &a6 * &inner_v + lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], b[0], n);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.partial_piv_lu().solve(p);
    for _ in 0..s {
        r = &r * &r;
    }
    if r.col_iter().any(|c| c.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))) {
        return Err(Error::NonFinite);
    }
    Ok(r)
}

fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `e^{Lt} x` by restarted Arnoldi with adaptive step size.
pub fn expmv_krylov(l: &SuperMatrix, x: &[C64], t: f64, tol: f64) -> Result<Vec<C64>> {
    let n = x.len();
    let m = KRYLOV_DIM.min(n);
    let anorm = l.norm1().max(f64::MIN_POSITIVE);
    let mut w = x.to_vec();
    let mut done = 0.0;
    let mut tau = (t).min(m as f64 / anorm);
    let mut steps = 0usize;
    while done < t {
        let beta = norm2(&w);
        if beta == 0.0 {
            return Ok(w);
        }
        let mut v: Vec<Vec<C64>> = vec![w.iter().map(|z| z / beta).collect()];
        let mut h = Mat::<C64>::zeros(m + 1, m + 1);
        let mut happy = false;
        let mut dim = m;
        for j in 0..m {
            let mut p = l.apply_vec(&v[j]);
            for _ in 0..2 {
                for (i, vi) in v.iter().enumerate() {
                    let c: C64 = vi.iter().zip(&p).map(|(a, b)| a.conj() * b).sum();
                    h[(i, j)] += c;
                    for (pk, vk) in p.iter_mut().zip(vi) {
                        *pk -= c * vk;
                    }
                }
            }
            let hn = norm2(&p);
            if hn <= 1e-14 * anorm {
                happy = true;
                dim = j + 1;
                break;
            }
            h[(j + 1, j)] = C64::new(hn, 0.0);
            v.push(p.iter().map(|z| z / hn).collect());
        }
        let h_next = if happy { 0.0 } else { h[(m, m - 1)].re };
        loop {
            tau = tau.min(t - done);
            let hs = Mat::from_fn(dim, dim, |i, j| h[(i, j)] * tau);
            let e = expm_dense(&hs)?;
            let err = beta * h_next * tau * e[(dim - 1, 0)].norm();
            if happy || err <= tol * beta.max(1.0) * (tau / t).max(1e-3) || tau < 1e-14 * t {
                let mut out = vec![C64::new(0.0, 0.0); n];
                for (k, vk) in v.iter().take(dim).enumerate() {
                    let c = e[(k, 0)] * beta;
                    for (o, a) in out.iter_mut().zip(vk) {
                        *o += c * a;
                    }
                }
                w = out;
                done += tau;
                if err < 0.1 * tol * beta.max(1.0) * (tau / t).max(1e-3) {
                    tau *= 2.0;
                }
                break;
            }
            tau *= 0.5;
        }
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::NoConvergence {
                wanted: 1,
                converged: 0,
                restarts: steps,
                worst: t - done,
            });
        }
    }
    Ok(w)
}

/// Propagator `e^{Lt}` on the local coordinates of `l`.
pub fn evolve_vec(l: &SuperMatrix, x: &[C64], t: f64) -> Result<Vec<C64>> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if x.len() != l.len() {
        return Err(Error::Shape(format!("vector of length {} for block of size {}", x.len(), l.len())));
    }
    if t == 0.0 {
        return Ok(x.to_vec());
    }
    if l.is_explicit() && l.len() <= DENSE_EXPM_LIMIT {
        let a = l.to_dense() * faer::Scale(C64::new(t, 0.0));
        let e = expm_dense(&a)?;
        let xm = Mat::from_fn(x.len(), 1, |i, _| x[i]);
        let y = e * xm;
        return Ok((0..x.len()).map(|i| y[(i, 0)]).collect());
    }
    expmv_krylov(l, x, t, KRYLOV_TOL)
}

/// `ρ(t) = e^{Lt} ρ0` for `t ≥ 0`.
pub fn evolve_expm(l: &SuperMatrix, rho0: &Operator, t: f64) -> Result<Operator> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if rho0.dim() != l.hilbert_dim() {
        return Err(Error::Shape(format!(
            "state of dimension {} for Liouvillian on dimension {}",
            rho0.dim(),
            l.hilbert_dim()
        )));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let x = l.restrict(&vectorize(rho0));
    let y = evolve_vec(l, &x, t)?;
    l.to_operator(&y)
}

/// Sampled trajectory with optional observable tracks.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<Operator>,
    pub observables: Vec<(String, Vec<f64>)>,
}

/// Evolves `rho0` over sorted `times`, stepping between consecutive samples.
///
/// For states of a full Liouvillian the trace must stay 1 to `1e-10`.
pub fn trajectory(
    l: &SuperMatrix,
    rho0: &Operator,
    times: &[f64],
    observables: &[(&str, &Operator)],
) -> Result<TrajectoryRecord> {
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter("times must be sorted ascending".into()));
    }
    let track_trace =
        matches!(l.embedding(), Embedding::Full) && (rho0.trace() - C64::new(1.0, 0.0)).norm() <= 1e-10;
    let mut states = Vec::with_capacity(times.len());
    let mut current = rho0.clone();
    let mut last = 0.0;
    for &t in times {
        current = evolve_expm(l, &current, t - last)?;
        last = t;
        if track_trace {
            let tr = current.trace();
            if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
                return Err(Error::InvalidState(format!("trace {tr} at t = {t}")));
            }
        }
        states.push(current.clone());
    }
    let mut tracks = Vec::with_capacity(observables.len());
    for (name, op) in observables {
        let vals = states
            .iter()
            .map(|s| Ok(op.matmul(s)?.trace().re))
            .collect::<Result<Vec<f64>>>()?;
        tracks.push((name.to_string(), vals));
    }
    Ok(TrajectoryRecord {
        times: times.to_vec(),
        states,
        observables: tracks,
    })
}

impl TrajectoryRecord {
    /// CSV with a `t` column followed by one column per observable.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend(self.observables.iter().map(|(n, _)| n.clone()));
        wr.write_record(&header).map_err(csv_err)?;
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![format!("{t:.12e}")];
            row.extend(self.observables.iter().map(|(_, v)| format!("{:.12e}", v[i])));
            wr.write_record(&row).map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("{other:?}")),
    }
}

/// Coefficients `c_i = ⟨L_i, ρ0⟩` of `ρ0 = Σ c_i ρ̂_i`.
///
/// Needs a complete spectrum with left eigenmatrices; the reconstruction is verified to `1e-9`.
pub fn decompose_state(rho0: &Operator, spectrum: &Spectrum) -> Result<Vec<C64>> {
    let d = rho0.dim();
    if spectrum.pairs.len() != d * d {
        return Err(Error::DecompositionUnavailable(format!(
            "spectrum has {} of {} modes",
            spectrum.pairs.len(),
            d * d
        )));
    }
    let mut coeffs = Vec::with_capacity(d * d);
    for p in &spectrum.pairs {
        let left = p.left.as_ref().ok_or_else(|| {
            Error::DecompositionUnavailable(
                "no biorthonormal left eigenmatrices; L may be defective, see detect_jordan".into(),
            )
        })?;
        coeffs.push(hs_inner(left, rho0)?);
    }
    let rebuilt = combine(&coeffs, spectrum, |_| C64::new(1.0, 0.0))?;
    let res = hs_norm(&rebuilt.sub(rho0)?);
    if res > 1e-9 * hs_norm(rho0).max(1.0) {
        return Err(Error::DecompositionUnavailable(format!(
            "reconstruction residual {res:.3e}; eigenbasis ill-conditioned, see detect_jordan"
        )));
    }
    Ok(coeffs)
}

fn combine(coeffs: &[C64], spectrum: &Spectrum, weight: impl Fn(C64) -> C64) -> Result<Operator> {
    if coeffs.len() != spectrum.pairs.len() {
        return Err(Error::Shape("coefficient count differs from mode count".into()));
    }
    let d = spectrum
        .pairs
        .first()
        .ok_or_else(|| Error::DecompositionUnavailable("empty spectrum".into()))?
        .right
        .dim();
    let mut acc = Operator::zeros(d);
    for (c, p) in coeffs.iter().zip(&spectrum.pairs) {
        acc = acc.axpby(C64::new(1.0, 0.0), &p.right, c * weight(p.value))?;
    }
    Ok(acc)
}

/// `ρ(t) = Σ c_i e^{λ_i t} ρ̂_i`.
pub fn propagate_spectral(coeffs: &[C64], spectrum: &Spectrum, t: f64) -> Result<Operator> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    combine(coeffs, spectrum, |lam| (lam * t).exp())
}

/// Closed-form and propagated Pauli expectations for the two-level model at `ω = γ`.
#[derive(Clone, Debug, Serialize)]
pub struct JordanTrack {
    pub times: Vec<f64>,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
    pub sz: Vec<f64>,
    pub sx_closed: Vec<f64>,
    pub sy_closed: Vec<f64>,
    pub sz_closed: Vec<f64>,
    /// Largest pointwise relative deviation over the three tracks, ignoring absolute deviations up to 1e-15.
    pub max_rel_error: f64,
}

/// Closed-form `(⟨σˣ⟩, ⟨σʸ⟩, ⟨σᶻ⟩)` at `ω = γ` for `ρ(0) = [[a, b], [b*, 1 − a]]`.
pub fn jordan_closed_form(omega: f64, epsilon: f64, gamma: f64, a: f64, b: C64, t: f64) -> [f64; 3] {
    let env = (-(gamma + epsilon / 2.0) * t).exp();
    let lin = t * omega * (b.re + b.im);
    let zss = -epsilon / (2.0 * gamma + epsilon);
    [
        2.0 * env * (lin + b.re),
        2.0 * env * (lin - b.im),
        zss + (2.0 * a - 1.0 - zss) * (-(2.0 * gamma + epsilon) * t).exp(),
    ]
}

/// Propagates `[[1/2, b], [b*, 1/2]]` at the Jordan point and compares with the closed form.
pub fn jordan_decay_check(omega: f64, epsilon: f64, gamma: f64, b: C64, times: &[f64]) -> Result<JordanTrack> {
    jordan_decay_check_with(omega, epsilon, gamma, 0.5, b, times)
}

/// As [`jordan_decay_check`] with initial population `a` of the upper level.
pub fn jordan_decay_check_with(
    omega: f64,
    epsilon: f64,
    gamma: f64,
    a: f64,
    b: C64,
    times: &[f64],
) -> Result<JordanTrack> {
    if (omega - gamma).abs() > 1e-12 * gamma.abs().max(1.0) {
        return Err(Error::NotJordanPoint { omega, gamma });
    }
    if !(0.0..=1.0).contains(&a) || b.norm_sqr() > a * (1.0 - a) + 1e-15 {
        return Err(Error::InvalidState(format!("a = {a}, b = {b} is not a density matrix")));
    }
    let l = crate::liouville::build_liouvillian(&two_level_model(omega, epsilon, gamma)?)?;
    let rho0 = Operator::from_rows(&[&[C64::new(a, 0.0), b], &[b.conj(), C64::new(1.0 - a, 0.0)]])?;
    let (px, py, pz) = pauli();
    let mut track = JordanTrack {
        times: times.to_vec(),
        sx: vec![],
        sy: vec![],
        sz: vec![],
        sx_closed: vec![],
        sy_closed: vec![],
        sz_closed: vec![],
        max_rel_error: 0.0,
    };
    for &t in times {
        let rho = evolve_expm(&l, &rho0, t)?;
        let num = [
            px.matmul(&rho)?.trace().re,
            py.matmul(&rho)?.trace().re,
            pz.matmul(&rho)?.trace().re,
        ];
        let cf = jordan_closed_form(omega, epsilon, gamma, a, b, t);
        for k in 0..3 {
            let denom = cf[k].abs().max(1e-300);
            let err = (num[k] - cf[k]).abs();
            if err > 1e-15 {
                track.max_rel_error = track.max_rel_error.max(err / denom);
            }
        }
        track.sx.push(num[0]);
        track.sy.push(num[1]);
        track.sz.push(num[2]);
        track.sx_closed.push(cf[0]);
        track.sy_closed.push(cf[1]);
        track.sz_closed.push(cf[2]);
    }
    Ok(track)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::build_liouvillian;
    use crate::models::{kerr_model, two_photon_model};
    use crate::spectra::{full_spectrum, steady_state};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(d: usize, rng: &mut ChaCha8Rng) -> Operator {
        let g = Operator::from_fn(d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .unwrap();
        let r = g.matmul(&g.adjoint()).unwrap();
        let tr = r.trace().re;
        r.scale_real(1.0 / tr)
    }

    #[test]
    fn expm_small_cases() {
        let z = Mat::<C64>::zeros(3, 3);
        let e = expm_dense(&z).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((e[(i, j)] - c(want, 0.0)).norm() < 1e-15);
            }
        }
        // exp([[0, x], [-x, 0]]) is a rotation; large x exercises scaling and squaring.
        let x = 40.0;
        let a = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(x, 0.0),
            (1, 0) => c(-x, 0.0),
            _ => c(0.0, 0.0),
        });
        let e = expm_dense(&a).unwrap();
        assert!((e[(0, 0)] - c(x.cos(), 0.0)).norm() < 1e-12);
        assert!((e[(0, 1)] - c(x.sin(), 0.0)).norm() < 1e-12);
        // Nilpotent block: exp([[l, 1], [0, l]]) = e^l [[1, 1], [0, 1]].
        let a = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(1.0, 0.0),
            (i, j) if i == j => c(-1.5, 0.0),
            _ => c(0.0, 0.0),
        });
        let e = expm_dense(&a).unwrap();
        assert!((e[(0, 1)].re - (-1.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn identity_at_zero_and_negative_time() {
        let l = build_liouvillian(&two_level_model(0.5, 0.5, 1.0).unwrap()).unwrap();
        let rho = Operator::real_diag(&[0.3, 0.7]);
        let out = evolve_expm(&l, &rho, 0.0).unwrap();
        assert_eq!(out.to_mat(), rho.to_mat());
        assert!(matches!(evolve_expm(&l, &rho, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn eigenmatrix_evolves_by_its_eigenvalue() {
        let l = build_liouvillian(&two_level_model(0.5, 0.5, 1.0).unwrap()).unwrap();
        let spec = full_spectrum(&l).unwrap();
        for p in &spec.pairs {
            let out = evolve_expm(&l, &p.right, 1.7).unwrap();
            let want = p.right.scale((p.value * 1.7).exp());
            assert!(hs_norm(&out.sub(&want).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn long_time_reaches_steady_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = build_liouvillian(&kerr_model(1.0, 1.0, 0.8, 1.0, 6).unwrap()).unwrap();
        let ss = steady_state(&l).unwrap();
        let spec = full_spectrum(&l).unwrap();
        let rho0 = random_state(6, &mut rng);
        let out = evolve_expm(&l, &rho0, 50.0 / spec.gap).unwrap();
        assert!(hs_norm(&out.sub(&ss).unwrap()) < 1e-6);
        assert!(out.hermiticity_defect() < 1e-10);
        assert!((out.trace() - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn krylov_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let l = build_liouvillian(&two_photon_model(-2.0, 1.0, 1.5, 1.0, 0.5, 7).unwrap()).unwrap();
        let rho0 = random_state(7, &mut rng);
        let x = vectorize(&rho0);
        for t in [0.05, 0.7, 3.0] {
            let dense = evolve_vec(&l, &x, t).unwrap();
            let kry = expmv_krylov(&l, &x, t, KRYLOV_TOL).unwrap();
            let diff: Vec<C64> = dense.iter().zip(&kry).map(|(a, b)| a - b).collect();
            assert!(norm2(&diff) < 1e-8, "t = {t}: {}", norm2(&diff));
        }
    }

    #[test]
    fn semigroup_and_trajectory() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let l = build_liouvillian(&kerr_model(-1.0, 0.5, 1.2, 1.0, 5).unwrap()).unwrap();
        let rho0 = random_state(5, &mut rng);
        let a = evolve_expm(&l, &evolve_expm(&l, &rho0, 0.4).unwrap(), 0.9).unwrap();
        let b = evolve_expm(&l, &rho0, 1.3).unwrap();
        assert!(hs_norm(&a.sub(&b).unwrap()) < 1e-8);
        let n = crate::operator::number(5).unwrap();
        let tr = trajectory(&l, &rho0, &[0.0, 0.4, 1.3], &[("n", &n)]).unwrap();
        assert!(hs_norm(&tr.states[2].sub(&b).unwrap()) < 1e-8);
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,n\n"));
        assert_eq!(text.lines().count(), 4);
        assert!(trajectory(&l, &rho0, &[1.0, 0.5], &[]).is_err());
    }

    #[test]
    fn decomposition_and_spectral_propagation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l = build_liouvillian(&two_level_model(0.5, 0.5, 1.0).unwrap()).unwrap();
        let spec = full_spectrum(&l).unwrap();
        for _ in 0..20 {
            let rho0 = random_state(2, &mut rng);
            let coeffs = decompose_state(&rho0, &spec).unwrap();
            let t = rng.random_range(0.0..5.0);
            let a = propagate_spectral(&coeffs, &spec, t).unwrap();
            let b = evolve_expm(&l, &rho0, t).unwrap();
            assert!(hs_norm(&a.sub(&b).unwrap()) < 1e-8);
            assert!(a.hermiticity_defect() < 1e-10);
        }
        let ss = steady_state(&l).unwrap();
        let coeffs = decompose_state(&ss, &spec).unwrap();
        let i0 = spec.trace_mode_index().unwrap();
        for (i, c0) in coeffs.iter().enumerate() {
            if i != i0 {
                assert!(c0.norm() < 1e-10);
            }
        }
        let far = propagate_spectral(&coeffs, &spec, 1e3).unwrap();
        assert!(hs_norm(&far.sub(&ss).unwrap()) < 1e-10);
        // c_1 of ρ_ss + A ρ̂_1 equals A.
        let i1 = (0..4).find(|&i| i != i0).unwrap();
        let amp = c(0.05, 0.0);
        let probe = ss.axpby(c(1.0, 0.0), &spec.pairs[i1].right, amp).unwrap();
        let coeffs = decompose_state(&probe, &spec).unwrap();
        assert!((coeffs[i1] - amp).norm() < 1e-10);
    }

    #[test]
    fn underdamped_oscillation_frequency() {
        // γ < ω: ⟨σˣ⟩ = Re(κ e^{λ₁ t}) for the complex pair.
        let l = build_liouvillian(&two_level_model(2.0, 0.5, 1.0).unwrap()).unwrap();
        let spec = full_spectrum(&l).unwrap();
        let rho0 = Operator::from_rows(&[&[c(0.5, 0.0), c(0.3, 0.1)], &[c(0.3, -0.1), c(0.5, 0.0)]]).unwrap();
        let coeffs = decompose_state(&rho0, &spec).unwrap();
        let (sx, _, _) = pauli();
        let lam = spec.lambda1().unwrap().value;
        assert!((lam.im.abs() - 3f64.sqrt()).abs() < 1e-10);
        let x: Vec<f64> = (0..40)
            .map(|k| {
                let r = propagate_spectral(&coeffs, &spec, 0.1 * k as f64).unwrap();
                sx.matmul(&r).unwrap().trace().re / (lam.re * 0.1 * k as f64).exp()
            })
            .collect();
        // The rescaled signal solves x'' = -(Im λ)² x, checked by second differences.
        let w2 = lam.im * lam.im;
        for k in 1..39 {
            let dd = (x[k + 1] - 2.0 * x[k] + x[k - 1]) / 0.01;
            assert!((dd + w2 * x[k]).abs() < 2e-2 * x.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
    }

    #[test]
    fn decomposition_unavailable_at_jordan_point() {
        let l = build_liouvillian(&two_level_model(1.0, 0.5, 1.0).unwrap()).unwrap();
        let spec = full_spectrum(&l).unwrap();
        let rho0 = Operator::from_real_rows(&[&[0.5, 0.2], &[0.2, 0.5]]).unwrap();
        assert!(matches!(
            decompose_state(&rho0, &spec),
            Err(Error::DecompositionUnavailable(_))
        ));
    }

    #[test]
    fn jordan_track_matches_closed_form() {
        let times: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
        let b = c(0.25, 0.25);
        let tr = jordan_decay_check(1.0, 1.0, 1.0, b, &times).unwrap();
        assert!(tr.max_rel_error < 1e-8, "{}", tr.max_rel_error);
        let tr = jordan_decay_check(1.0, 0.5, 1.0, c(0.2, -0.1), &times).unwrap();
        assert!(tr.max_rel_error < 1e-8, "{}", tr.max_rel_error);
        let t0 = jordan_decay_check(1.0, 0.5, 1.0, c(0.3, 0.0), &[0.0]).unwrap();
        assert!((t0.sx[0] - 0.6).abs() < 1e-15);
        assert!(matches!(
            jordan_decay_check(0.5, 0.5, 1.0, b, &times),
            Err(Error::NotJordanPoint { .. })
        ));
        // σᶻ relaxes as a single exponential at rate 2γ + ε.
        let tr = jordan_decay_check_with(1.0, 0.5, 1.0, 0.9, c(0.1, 0.0), &times).unwrap();
        let zss = -0.5 / 2.5;
        for k in 1..=40 {
            let r = (tr.sz[k] - zss) / (tr.sz[k - 1] - zss);
            assert!((r.ln() / -0.1 - 2.5).abs() < 1e-6);
        }
        // σˣ is not a single exponential: the log-derivative drifts in time.
        let rate = |k: usize| (tr.sx[k + 1] / tr.sx[k]).ln() / -0.1;
        assert!((rate(5) - rate(50)).abs() > 1e-2);
    }
}
