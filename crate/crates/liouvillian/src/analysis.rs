//! Transition diagnostics: observables, fidelities, parameter scans, bifurcation points
//! and the finite-size power law of the bifurcation.

use crate::error::{Error, Result};
use crate::liouville::{build_liouvillian, SuperMatrix};
use crate::models::{tail_population, ModelParams, ModelSpec, TAIL_TOLERANCE};
use crate::operator::{eigh, from_spectral, hs_norm, Operator, C64};
use crate::spectra::{
    check_unique_kernel, hermitian_split_with, leading_spectrum_with, low_spectrum, sort_order,
    steady_state_unchecked, to_density_matrix, EigenPair, LeadingOptions, PhaseSplit, Spectrum,
    DEFAULT_SHIFT, ZERO_TOL_REL,
};
use crate::symmetry::{number_parity_symmetry, sector_decompose};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

/// `Tr[ρO]` for Hermitian `O`.
pub fn expectation(rho: &Operator, o: &Operator) -> Result<f64> {
    let defect = o.hermiticity_defect();
    if defect > 1e-10 * hs_norm(o).max(1.0) {
        return Err(Error::NonHermitian(defect));
    }
    let v = o.matmul(rho)?.trace();
    if v.im.abs() > 1e-10 * hs_norm(o).max(1.0) * hs_norm(rho).max(1.0) {
        return Err(Error::InvalidState(format!(
            "expectation value has imaginary part {:.3e}",
            v.im
        )));
    }
    Ok(v.re)
}

fn sqrt_psd(rho: &Operator) -> Result<Operator> {
    let (w, u) = eigh(rho)?;
    let s: Vec<f64> = w.iter().map(|x| x.max(0.0).sqrt()).collect();
    from_spectral(&s, &u)
}

/// Uhlmann fidelity `Tr √(√ρ ξ √ρ)`, clamped to `[0, 1]`.
pub fn fidelity(rho: &Operator, xi: &Operator) -> Result<f64> {
    if rho.dim() != xi.dim() {
        return Err(Error::Shape("fidelity of states on different spaces".into()));
    }
    let r = to_density_matrix(rho)?;
    let x = to_density_matrix(xi)?;
    let s = sqrt_psd(&r)?;
    let m = s.matmul(&x)?.matmul(&s)?.hermitian_part();
    let (w, _) = eigh(&m)?;
    let f: f64 = w.iter().map(|v| v.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `½ ‖a − b‖₁`.
pub fn trace_distance(a: &Operator, b: &Operator) -> Result<f64> {
    let d = a.sub(b)?.hermitian_part();
    let (w, _) = eigh(&d)?;
    Ok(0.5 * w.iter().map(|x| x.abs()).sum::<f64>())
}

/// One grid point of a scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRecord {
    pub zeta: f64,
    pub n: f64,
    pub gap: f64,
    pub im_lambda1: f64,
    pub density: f64,
    pub one_minus_f: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    /// Set when the two slowest decaying eigenvalues (nearly) coincide.
    pub jordan_flag: Option<bool>,
    /// Sector of `λ₁` when sectors are used.
    pub sector: Option<usize>,
    pub tail: f64,
    pub status: String,
    #[serde(skip)]
    pub eigenvalues: Vec<C64>,
}

impl ScanRecord {
    fn failed(zeta: f64, n: f64, err: &Error) -> Self {
        ScanRecord {
            zeta,
            n,
            gap: f64::NAN,
            im_lambda1: f64::NAN,
            density: f64::NAN,
            one_minus_f: f64::NAN,
            f_plus: f64::NAN,
            f_minus: f64::NAN,
            jordan_flag: None,
            sector: None,
            tail: f64::NAN,
            status: format!("error: {err}").replace(['\n', ','], " "),
            eigenvalues: vec![],
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Options for [`analyze_point`] and [`scan`].
#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Leading eigenvalues per (sector) block.
    pub k: usize,
    /// Order of the `exp(2πi a†a/n)` symmetry to decompose by, if any.
    pub symmetry_order: Option<usize>,
    /// `|Im λ|` below which an eigenvalue counts as real.
    pub im_tol: f64,
    /// Zero-eigenvalue threshold relative to `‖L‖₁`.
    pub zero_rel: f64,
    pub shift: f64,
    pub solver: LeadingOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            k: 4,
            symmetry_order: None,
            im_tol: 1e-8,
            zero_rel: ZERO_TOL_REL,
            shift: DEFAULT_SHIFT,
            solver: LeadingOptions::default(),
        }
    }
}

fn with_zero_tol(mut s: Spectrum, zero_rel: f64) -> Spectrum {
    s.zero_tol = zero_rel * s.norm1;
    s
}

/// Steady state, slow spectrum and the split of the first decaying mode at one parameter point.
#[derive(Clone, Debug)]
pub struct PointAnalysis {
    pub steady: Operator,
    /// Per-sector spectra `(j, spectrum)`; a single entry with `j = 0` without sectors.
    pub spectra: Vec<(usize, Spectrum)>,
    pub lambda1: EigenPair,
    pub lambda1_sector: usize,
    /// Split of `ρ̂₁` with `ρ⁺` the higher-density part; `None` for complex `λ₁`.
    pub split: Option<PhaseSplit>,
}

impl PointAnalysis {
    /// All computed eigenvalues, merged and sorted.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let v: Vec<C64> = self.spectra.iter().flat_map(|(_, s)| s.values()).collect();
        sort_order(&v).into_iter().map(|i| v[i]).collect()
    }

    /// Slowest decaying mode of sector `j`.
    pub fn slowest_in_sector(&self, j: usize) -> Option<&EigenPair> {
        self.spectra
            .iter()
            .find(|(s, _)| *s == j)
            .and_then(|(_, sp)| sp.lambda1())
    }
}

/// Orients a split so that `ρ⁺` carries the larger `⟨O⟩`.
pub fn orient_split(split: PhaseSplit, o: &Operator) -> Result<PhaseSplit> {
    if expectation(&split.plus, o)? >= expectation(&split.minus, o)? {
        Ok(split)
    } else {
        Ok(split.swapped())
    }
}

/// Spectral analysis of one model.
pub fn analyze(model: &ModelSpec, opts: &ScanOptions) -> Result<PointAnalysis> {
    let l = build_liouvillian(model)?;
    analyze_liouvillian(&l, model, opts)
}

fn analyze_liouvillian(l: &SuperMatrix, model: &ModelSpec, opts: &ScanOptions) -> Result<PointAnalysis> {
    let (steady, spectra) = match opts.symmetry_order {
        Some(order) => {
            let s = number_parity_symmetry(model.dim, order)?;
            let dec = sector_decompose(l, &s)?;
            let spectra: Vec<(usize, Spectrum)> = dec
                .low_spectra_with(opts.k, C64::new(opts.shift, 0.0), &opts.solver, opts.im_tol)?
                .into_iter()
                .map(|(j, s)| (j, with_zero_tol(s, opts.zero_rel)))
                .collect();
            if let Some((_, even)) = spectra.iter().find(|(j, _)| *j == 0) {
                check_unique_kernel(even)?;
            }
            (dec.steady_state()?, spectra)
        }
        None => {
            let k = opts.k.max(2).min(l.len());
            let spec = leading_spectrum_with(l, k, C64::new(opts.shift, 0.0), &opts.solver, opts.im_tol)?;
            let spec = with_zero_tol(spec, opts.zero_rel);
            check_unique_kernel(&spec)?;
            (steady_state_unchecked(l)?, vec![(0, spec)])
        }
    };
    let (lambda1_sector, lambda1) = spectra
        .iter()
        .filter_map(|(j, s)| s.lambda1().map(|p| (*j, p.clone())))
        .min_by(|a, b| {
            a.1.value
                .re
                .abs()
                .total_cmp(&b.1.value.re.abs())
                .then(a.0.cmp(&b.0))
        })
        .ok_or_else(|| Error::NotFound("no decaying mode".into()))?;
    let number = model.number_operator();
    let split = if lambda1.value.im.abs() <= opts.im_tol {
        Some(orient_split(hermitian_split_with(&lambda1, opts.im_tol)?, &number)?)
    } else {
        None
    };
    Ok(PointAnalysis {
        steady,
        spectra,
        lambda1,
        lambda1_sector,
        split,
    })
}

/// Scan record of one model at parameter value `zeta`. Failures are recorded in `status`.
pub fn analyze_point(model: &ModelSpec, zeta: f64, opts: &ScanOptions) -> ScanRecord {
    let n = model.meta.n;
    let run = || -> Result<ScanRecord> {
        let a = analyze(model, opts)?;
        let density = expectation(&a.steady, &model.number_operator())? / n;
        let (one_minus_f, f_plus, f_minus) = match &a.split {
            Some(s) => (
                1.0 - fidelity(&a.steady, &s.mixture())?,
                fidelity(&a.steady, &s.plus)?,
                fidelity(&a.steady, &s.minus)?,
            ),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        let eigenvalues = a.eigenvalues();
        let decaying: Vec<C64> = a
            .spectra
            .iter()
            .flat_map(|(_, s)| {
                let skip = usize::from(s.has_trace_mode);
                s.values().into_iter().skip(skip)
            })
            .collect();
        let jordan_flag = {
            let mut v = decaying.clone();
            v.sort_by(|x, y| x.re.abs().total_cmp(&y.re.abs()));
            v.get(1).map(|l2| (l2 - v[0]).norm() <= 1e-6 * v[0].norm().max(1e-3))
        };
        let tail = if model.dim > 2 { tail_population(&a.steady) } else { 0.0 };
        let status = if tail > TAIL_TOLERANCE {
            format!("tail {tail:.1e} above cutoff tolerance")
        } else {
            "ok".to_string()
        };
        Ok(ScanRecord {
            zeta,
            n,
            gap: a.lambda1.value.re.abs(),
            im_lambda1: a.lambda1.value.im,
            density,
            one_minus_f,
            f_plus,
            f_minus,
            jordan_flag,
            sector: opts.symmetry_order.map(|_| a.lambda1_sector),
            tail,
            status,
            eigenvalues,
        })
    };
    run().unwrap_or_else(|e| ScanRecord::failed(zeta, n, &e))
}

/// Scans a model family over an ascending grid of `ζ`, in parallel with deterministic order.
pub fn scan<F>(family: F, grid: &[f64], opts: &ScanOptions) -> Result<Vec<ScanRecord>>
where
    F: Fn(f64) -> Result<ModelSpec> + Sync,
{
    if grid.is_empty() {
        return Err(Error::Parameter("empty scan grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("scan grid must be strictly ascending".into()));
    }
    Ok(grid
        .par_iter()
        .map(|&z| match family(z) {
            Ok(m) => analyze_point(&m, z, opts),
            Err(e) => ScanRecord::failed(z, f64::NAN, &e),
        })
        .collect())
}

/// Scans `parameter` of `base` with `ζ = value / γ`.
pub fn scan_params(
    base: &ModelParams,
    parameter: &str,
    grid: &[f64],
    opts: &ScanOptions,
) -> Result<Vec<ScanRecord>> {
    base.with_parameter(parameter, 1.0)?;
    let gamma = base.gamma();
    scan(
        |z| base.with_parameter(parameter, z * gamma)?.build(),
        grid,
        opts,
    )
}

/// Scan CSV: an optional comment line, then one row per record.
pub fn write_scan_csv<W: Write>(records: &[ScanRecord], comment: Option<&str>, mut w: W) -> Result<()> {
    if let Some(c) = comment {
        writeln!(w, "# {c}")?;
    }
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record([
        "zeta",
        "N",
        "gap",
        "im_lambda1",
        "density",
        "one_minus_f",
        "f_plus",
        "f_minus",
        "jordan_flag",
        "status",
    ])
    .map_err(crate::dynamics::csv_err)?;
    for r in records {
        let flag = match r.jordan_flag {
            Some(true) => "1",
            Some(false) => "0",
            None => "",
        };
        wr.write_record([
            format!("{:.10e}", r.zeta),
            format!("{}", r.n),
            format!("{:.10e}", r.gap),
            format!("{:.10e}", r.im_lambda1),
            format!("{:.10e}", r.density),
            format!("{:.10e}", r.one_minus_f),
            format!("{:.10e}", r.f_plus),
            format!("{:.10e}", r.f_minus),
            flag.to_string(),
            r.status.clone(),
        ])
        .map_err(crate::dynamics::csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

/// Greedy nearest-neighbour continuation of eigenvalue branches across a scan.
///
/// Branch `b` at step `s+1` is the unused eigenvalue minimizing `|λ − λ_b(s)|` (complex modulus).
pub fn track_eigenvalues(steps: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let Some(first) = steps.first() else {
        return vec![];
    };
    let mut branches: Vec<Vec<C64>> = first.iter().map(|&v| vec![v]).collect();
    for next in &steps[1..] {
        let mut used = vec![false; next.len()];
        for b in branches.iter_mut() {
            let last = *b.last().unwrap();
            if let Some(j) = (0..next.len())
                .filter(|&j| !used[j])
                .min_by(|&i, &j| (next[i] - last).norm().total_cmp(&(next[j] - last).norm()))
            {
                used[j] = true;
                b.push(next[j]);
            }
        }
    }
    branches
}

/// Bifurcation point where `Im λ₁` switches between zero and non-zero.
///
/// Takes the first grid point whose classification (`|Im λ₁| < im_tol`) differs from its
/// predecessor and persists for the next two points, then bisects the bracket to relative
/// `1e-3` with `refine`, which returns `|Im λ₁|` at a parameter value.
pub fn bifurcation_point(
    records: &[ScanRecord],
    im_tol: f64,
    refine: Option<&(dyn Fn(f64) -> Result<f64> + Sync)>,
) -> Result<f64> {
    let pts: Vec<(f64, bool)> = records
        .iter()
        .filter(|r| r.im_lambda1.is_finite())
        .map(|r| (r.zeta, r.im_lambda1.abs() < im_tol))
        .collect();
    let found = (1..pts.len()).find(|&i| {
        pts[i].1 != pts[i - 1].1 && (i..(i + 3)).all(|k| k < pts.len() && pts[k].1 == pts[i].1)
    });
    let Some(i) = found else {
        let ims: Vec<String> = records
            .iter()
            .map(|r| format!("{:.4}:{:.2e}", r.zeta, r.im_lambda1))
            .collect();
        return Err(Error::NotFound(format!(
            "no persistent change of Im λ₁ across {im_tol:.1e}; track {}",
            ims.join(" ")
        )));
    };
    let (mut lo, mut hi) = (pts[i - 1].0, pts[i].0);
    let hi_real = pts[i].1;
    if let Some(f) = refine {
        while (hi - lo).abs() > 1e-3 * hi.abs().max(f64::MIN_POSITIVE) {
            let mid = 0.5 * (lo + hi);
            if (f(mid)? < im_tol) == hi_real {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `G_B(N) = G_c + A N^{−exponent}`.
#[derive(Clone, Debug, Serialize)]
pub struct PowerLawFit {
    pub amplitude: f64,
    pub exponent: f64,
    pub critical_value: f64,
    /// Sum of squared residuals of `ln(G_B − G_c) − ln A + exponent·ln N`.
    pub residual: f64,
    /// Covariance of `(G_c, A, exponent)`.
    pub covariance: [[f64; 3]; 3],
    pub iterations: usize,
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    (icpt, slope, rss)
}

fn inv3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, d) = ((i + 1) % 3, (i + 2) % 3);
            r[i][j] = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    Some(r)
}

/// Least-squares fit of `ln(G_B − G_c) = ln A − exponent·ln N`, nonlinear in `G_c`.
///
/// `G_c` is located by variable projection over `u = ln(min G_B − G_c)`, minimizing the
/// scale-free `1 − R²` of the inner linear fit.
pub fn power_law_fit(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 4 {
        return Err(Error::Fit {
            message: format!("need at least 4 points, got {}", points.len()),
            trace: vec![],
        });
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || points.iter().any(|p| !(p.0 > 0.0)) {
        return Err(Error::Fit {
            message: "N must be positive and strictly increasing".into(),
            trace: vec![],
        });
    }
    let ln_n: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let g: Vec<f64> = points.iter().map(|p| p.1).collect();
    let gmin = g.iter().cloned().fold(f64::INFINITY, f64::min);
    let gmax = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = (gmax - gmin).max(1e-12 * gmax.abs()).max(f64::MIN_POSITIVE);
    let mut trace = Vec::new();
    let profile = |u: f64| -> f64 {
        let gc = gmin - u.exp();
        let y: Vec<f64> = g.iter().map(|v| (v - gc).ln()).collect();
        let my = y.iter().sum::<f64>() / y.len() as f64;
        let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
        linear_fit(&ln_n, &y).2 / syy
    };
    let (u_lo, u_hi) = ((1e-8 * scale).ln(), (1e4 * scale).ln());
    let grid = 400;
    let us: Vec<f64> = (0..=grid)
        .map(|i| u_lo + (u_hi - u_lo) * i as f64 / grid as f64)
        .collect();
    let vals: Vec<f64> = us.iter().map(|&u| profile(u)).collect();
    let best = (0..us.len())
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap();
    trace.push(format!("profile minimum at u = {:.6} (1 - R² = {:.3e})", us[best], vals[best]));
    if best == 0 || best == grid {
        return Err(Error::Fit {
            message: "critical value runs to the edge of the search range".into(),
            trace,
        });
    }
    let (mut a, mut b) = (us[best - 1], us[best + 1]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (profile(c), profile(d));
    let mut iterations = 0;
    while (b - a).abs() > 1e-13 * (1.0 + a.abs()) {
        iterations += 1;
        if iterations > 500 {
            return Err(Error::Fit {
                message: "golden-section search did not converge".into(),
                trace,
            });
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = profile(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = profile(d);
        }
        if iterations % 10 == 0 {
            trace.push(format!("iter {iterations}: G_c in [{:.12}, {:.12}]", gmin - a.exp(), gmin - b.exp()));
        }
    }
    let u = 0.5 * (a + b);
    let gc = gmin - u.exp();
    let y: Vec<f64> = g.iter().map(|v| (v - gc).ln()).collect();
    let (icpt, slope, rss) = linear_fit(&ln_n, &y);
    let p = [gc, icpt, -slope];
    let jac = |p: &[f64; 3]| -> Vec<[f64; 3]> {
        g.iter()
            .zip(&ln_n)
            .map(|(v, ln)| [-1.0 / (v - p[0]), -1.0, *ln])
            .collect()
    };
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::Fit {
            message: "fit diverged".into(),
            trace,
        });
    }
    let amp = p[1].exp();
    let j = jac(&p);
    let mut jtj = [[0.0; 3]; 3];
    for row in &j {
        for a in 0..3 {
            for b in 0..3 {
                jtj[a][b] += row[a] * row[b];
            }
        }
    }
    let dof = (points.len() as f64 - 3.0).max(1.0);
    let sigma2 = rss / dof;
    let cov_log = inv3(jtj).unwrap_or([[f64::NAN; 3]; 3]);
    // Map (G_c, ln A, exponent) to (G_c, A, exponent).
    let jm = [1.0, amp, 1.0];
    let mut covariance = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            covariance[a][b] = sigma2 * cov_log[a][b] * jm[a] * jm[b];
        }
    }
    Ok(PowerLawFit {
        amplitude: amp,
        exponent: p[2],
        critical_value: gc,
        residual: rss,
        covariance,
        iterations,
    })
}

/// `|Im|` of the slowest mode of the odd parity sector.
pub fn odd_sector_lambda1(model: &ModelSpec, k: usize) -> Result<C64> {
    let l = build_liouvillian(model)?;
    let s = number_parity_symmetry(model.dim, 2)?;
    let dec = sector_decompose(&l, &s)?;
    let odd = dec
        .sector(1)
        .ok_or_else(|| Error::Symmetry("no odd sector".into()))?;
    let spec = low_spectrum(&odd.block, k.min(odd.block.len()))?;
    spec.lambda1()
        .map(|p| p.value)
        .ok_or_else(|| Error::NotFound("odd sector has no decaying mode".into()))
}

/// Bifurcation of the odd-sector slowest mode of a `Z₂`-symmetric family along an ascending grid.
pub fn sector_bifurcation<F>(family: F, grid: &[f64], im_tol: f64, k: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<ModelSpec> + Sync,
{
    if grid.len() < 4 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("bifurcation grid needs 4 ascending points".into()));
    }
    let ims: Vec<Result<f64>> = grid
        .par_iter()
        .map(|&z| Ok(odd_sector_lambda1(&family(z)?, k)?.im.abs()))
        .collect();
    let records: Vec<ScanRecord> = grid
        .iter()
        .zip(ims)
        .map(|(&z, im)| {
            let mut r = ScanRecord::failed(z, f64::NAN, &Error::NotFound(String::new()));
            if let Ok(v) = im {
                r.im_lambda1 = v;
                r.status = "ok".into();
            }
            r
        })
        .collect();
    let refine = |z: f64| Ok(odd_sector_lambda1(&family(z)?, k)?.im.abs());
    bifurcation_point(&records, im_tol, Some(&refine))
}

/// Grows the cutoff by factors of 1.5 until the steady-state tail population is below `tol`.
pub fn converge_cutoff(params: &ModelParams, tol: f64, max_cutoff: usize) -> Result<(ModelParams, f64)> {
    if !params.is_bosonic() {
        return Ok((params.clone(), 0.0));
    }
    let mut p = params.clone();
    loop {
        let m = p.build()?;
        let l = build_liouvillian(&m)?;
        let rho = steady_state_unchecked(&l)?;
        let tail = tail_population(&rho);
        if tail <= tol {
            return Ok((p, tail));
        }
        let next = ((m.dim as f64) * 1.5).ceil() as usize;
        if next > max_cutoff {
            return Err(Error::Conditioning(format!(
                "tail population {tail:.3e} at cutoff {} exceeds {tol:.1e}",
                m.dim
            )));
        }
        p = p.with_cutoff(next);
    }
}
