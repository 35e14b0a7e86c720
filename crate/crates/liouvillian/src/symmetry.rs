//! Weak symmetries `U = V · V†` of the Liouvillian: commutation checks, block
//! decomposition into sectors and the symmetry-broken basis of a degenerate kernel.
//!
//! Sector `j` of a `Z_n` symmetry collects the eigenvectors of `U` with eigenvalue
//! `z_j = exp(2πij/n)`. For `V = exp(2πi a†a / n)` the basis element `|m⟩⟨l|` lies in
//! sector `(m − l) mod n`, which is used directly; other unitaries are handled by
//! diagonalizing `U`.

use crate::error::{Error, Result};
use crate::liouville::{Embedding, SuperMatrix};
use crate::operator::{hs_norm, unvectorize, vectorize, Operator, C64};
use crate::spectra::{
    leading_spectrum_with, low_spectrum, phase_fix, LeadingOptions, sort_order, steady_state_unchecked, EigenPair, Spectrum,
};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
enum Kind {
    NumberPhase,
    Generic,
}

/// Unitary superoperator `ρ ↦ VρV†` with `Vⁿ ∝ I`.
#[derive(Clone, Debug)]
pub struct SymmetrySuperOp {
    v: Operator,
    order: usize,
    kind: Kind,
}

/// Root of unity `z_j = exp(2πij/n)`.
pub fn root_of_unity(j: usize, n: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)
}

/// `Z_n` number-phase symmetry `V = exp(2πi a†a / n)`.
pub fn number_parity_symmetry(dim: usize, n: usize) -> Result<SymmetrySuperOp> {
    if n < 2 {
        return Err(Error::Parameter(format!("symmetry order must be >= 2, got {n}")));
    }
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let phases: Vec<C64> = (0..dim).map(|k| root_of_unity(k % n, n)).collect();
    Ok(SymmetrySuperOp {
        v: Operator::diag(&phases),
        order: n,
        kind: Kind::NumberPhase,
    })
}

impl SymmetrySuperOp {
    /// Symmetry from an arbitrary unitary `v` of order `n` (`vⁿ` proportional to the identity).
    pub fn from_unitary(v: Operator, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Parameter("symmetry order must be >= 1".into()));
        }
        let d = v.dim();
        let vv = v.adjoint().matmul(&v)?;
        let defect = hs_norm(&vv.sub(&Operator::identity(d))?);
        if defect > 1e-12 * (d as f64).sqrt() {
            return Err(Error::Symmetry(format!("V is not unitary (defect {defect:.3e})")));
        }
        let mut p = Operator::identity(d);
        for _ in 0..n {
            p = p.matmul(&v)?;
        }
        let phase = p.get(0, 0);
        let off = hs_norm(&p.sub(&Operator::identity(d).scale(phase))?);
        if off > 1e-10 * (d as f64).sqrt() {
            return Err(Error::Symmetry(format!("V^{n} is not proportional to the identity")));
        }
        Ok(SymmetrySuperOp {
            v,
            order: n,
            kind: Kind::Generic,
        })
    }

    /// Trivial symmetry `V = I`.
    pub fn identity(dim: usize) -> Self {
        SymmetrySuperOp {
            v: Operator::identity(dim),
            order: 1,
            kind: Kind::Generic,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn v(&self) -> &Operator {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    /// `U ρ = VρV†`.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        self.v.matmul(rho)?.matmul(&self.v.adjoint())
    }

    /// `U⁻¹ ρ = V†ρV`.
    pub fn apply_inverse(&self, rho: &Operator) -> Result<Operator> {
        self.v.adjoint().matmul(rho)?.matmul(&self.v)
    }

    /// Sector of the basis element `|m⟩⟨l|` for number-phase symmetries.
    pub fn sector_of_basis(&self, m: usize, l: usize) -> Option<usize> {
        match self.kind {
            Kind::NumberPhase => {
                let n = self.order as isize;
                Some((((m as isize - l as isize) % n) + n) as usize % n as usize)
            }
            Kind::Generic => None,
        }
    }

    fn vec_phases(&self) -> Option<Vec<C64>> {
        match self.kind {
            Kind::NumberPhase => {
                let d = self.dim();
                Some(
                    (0..d * d)
                        .map(|g| root_of_unity(self.sector_of_basis(g / d, g % d).unwrap(), self.order))
                        .collect(),
                )
            }
            Kind::Generic => None,
        }
    }
}

/// Relative commutation defect `‖U⁻¹LU − L‖ / ‖L‖`.
///
/// Exact (1-norm) for number-phase symmetries on explicit Liouvillians, otherwise estimated
/// from `probes` seeded random vectors.
pub fn symmetry_defect(l: &SuperMatrix, s: &SymmetrySuperOp, probes: usize, seed: u64) -> Result<f64> {
    if l.hilbert_dim() != s.dim() || !matches!(l.embedding(), Embedding::Full) {
        return Err(Error::Shape("symmetry and Liouvillian act on different spaces".into()));
    }
    let norm = l.norm1().max(f64::MIN_POSITIVE);
    if let (Some(csc), Some(ph)) = (l.csc(), s.vec_phases()) {
        let mut colsum = vec![0.0f64; csc.ncols()];
        for (i, j, v) in csc.triplets() {
            colsum[j] += v.norm() * (ph[i].conj() * ph[j] - C64::new(1.0, 0.0)).norm();
        }
        return Ok(colsum.into_iter().fold(0.0, f64::max) / norm);
    }
    let d = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..probes.max(1) {
        let x = Operator::from_fn(d, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })?;
        let lhs = s.apply_inverse(&l.apply(&s.apply(&x)?)?)?;
        let rhs = l.apply(&x)?;
        worst = worst.max(hs_norm(&lhs.sub(&rhs)?) / hs_norm(&x));
    }
    Ok(worst / norm)
}

/// True iff `‖U⁻¹LU − L‖ ≤ tol · ‖L‖`.
pub fn check_symmetry(l: &SuperMatrix, s: &SymmetrySuperOp, tol: f64) -> bool {
    matches!(symmetry_defect(l, s, 8, 42), Ok(d) if d <= tol)
}

/// One symmetry sector: label `j`, eigenvalue `z_j` and the Liouvillian block.
#[derive(Clone, Debug)]
pub struct SectorBlock {
    pub j: usize,
    pub z: C64,
    pub block: SuperMatrix,
}

/// Block-diagonal form of a symmetric Liouvillian.
#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    pub order: usize,
    pub sectors: Vec<SectorBlock>,
}

/// Tolerance of the commutation check performed before decomposing.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Splits `L` into sector blocks. Refuses when `L` does not commute with `U`.
pub fn sector_decompose(l: &SuperMatrix, s: &SymmetrySuperOp) -> Result<SectorDecomposition> {
    let defect = symmetry_defect(l, s, 8, 42)?;
    if defect > SYMMETRY_TOL {
        return Err(Error::Symmetry(format!(
            "Liouvillian does not commute with the symmetry (relative defect {defect:.3e})"
        )));
    }
    let n = s.order;
    let d = s.dim();
    let mut sectors = Vec::with_capacity(n);
    match s.kind {
        Kind::NumberPhase => {
            let mut idx: Vec<Vec<usize>> = vec![Vec::new(); n];
            for g in 0..d * d {
                idx[s.sector_of_basis(g / d, g % d).unwrap()].push(g);
            }
            for (j, ix) in idx.into_iter().enumerate() {
                if ix.is_empty() {
                    continue;
                }
                sectors.push(SectorBlock {
                    j,
                    z: root_of_unity(j, n),
                    block: l.block_on_indices(ix)?,
                });
            }
        }
        Kind::Generic => {
            let big = d * d;
            let mut u = Mat::<C64>::zeros(big, big);
            let mut e = vec![C64::new(0.0, 0.0); big];
            for c in 0..big {
                e[c] = C64::new(1.0, 0.0);
                let col = vectorize(&s.apply(&unvectorize(&e, d)?)?);
                for r in 0..big {
                    u[(r, c)] = col[r];
                }
                e[c] = C64::new(0.0, 0.0);
            }
            let eig = u
                .eigen()
                .map_err(|e| Error::Conditioning(format!("symmetry eigensolver: {e:?}")))?;
            let vals = eig.S();
            let vecs = eig.U();
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
            for k in 0..big {
                let (j, dist) = (0..n)
                    .map(|j| (j, (vals[k] - root_of_unity(j, n)).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                if dist > 1e-8 {
                    return Err(Error::Symmetry(format!(
                        "eigenvalue {} of U is not an {n}-th root of unity",
                        vals[k]
                    )));
                }
                groups[j].push(k);
            }
            for (j, g) in groups.into_iter().enumerate() {
                if g.is_empty() {
                    continue;
                }
                let raw = Mat::from_fn(big, g.len(), |r, c| vecs[(r, g[c])]);
                let q = raw.qr().compute_thin_Q();
                sectors.push(SectorBlock {
                    j,
                    z: root_of_unity(j, n),
                    block: l.block_on_basis(q)?,
                });
            }
        }
    }
    Ok(SectorDecomposition { order: n, sectors })
}

impl SectorDecomposition {
    pub fn sector(&self, j: usize) -> Option<&SectorBlock> {
        self.sectors.iter().find(|s| s.j == j)
    }

    /// Steady state computed inside the `z = 1` block.
    pub fn steady_state(&self) -> Result<Operator> {
        let b = self
            .sector(0)
            .ok_or_else(|| Error::IncompleteKernel("no z = 1 sector".into()))?;
        steady_state_unchecked(&b.block)
    }

    /// Slowest `k` modes of each sector.
    pub fn low_spectra(&self, k: usize) -> Result<Vec<(usize, Spectrum)>> {
        use rayon::prelude::*;
        self.sectors
            .par_iter()
            .map(|s| Ok((s.j, low_spectrum(&s.block, k.min(s.block.len()))?)))
            .collect()
    }

    /// As [`SectorDecomposition::low_spectra`] with explicit solver settings.
    pub fn low_spectra_with(
        &self,
        k: usize,
        shift: C64,
        opts: &LeadingOptions,
        im_tol: f64,
    ) -> Result<Vec<(usize, Spectrum)>> {
        use rayon::prelude::*;
        self.sectors
            .par_iter()
            .map(|s| {
                let k = k.min(s.block.len());
                Ok((s.j, leading_spectrum_with(&s.block, k, shift, opts, im_tol)?))
            })
            .collect()
    }

    /// Concatenated, re-sorted full spectra of all sectors.
    pub fn merged_values(spectra: &[(usize, Spectrum)]) -> Vec<C64> {
        let vals: Vec<C64> = spectra.iter().flat_map(|(_, s)| s.values()).collect();
        sort_order(&vals).into_iter().map(|i| vals[i]).collect()
    }

    /// Sizes and leading eigenvalues of each sector, for JSON output.
    pub fn summary(&self, spectra: &[(usize, Spectrum)]) -> Vec<SectorSummary> {
        self.sectors
            .iter()
            .map(|s| SectorSummary {
                j: s.j,
                z: [s.z.re, s.z.im],
                size: s.block.len(),
                leading: spectra
                    .iter()
                    .find(|(j, _)| *j == s.j)
                    .map(|(_, sp)| sp.values().iter().map(|v| [v.re, v.im]).collect())
                    .unwrap_or_default(),
            })
            .collect()
    }
}

/// JSON-friendly description of one sector.
#[derive(Clone, Debug, Serialize)]
pub struct SectorSummary {
    pub j: usize,
    pub z: [f64; 2],
    pub size: usize,
    pub leading: Vec<[f64; 2]>,
}

/// A (near-)zero mode together with its sector label.
#[derive(Clone, Debug)]
pub struct SectorMode {
    pub sector: usize,
    pub pair: EigenPair,
}

/// Density-matrix basis of a degenerate kernel, cyclically permuted by the symmetry.
#[derive(Clone, Debug)]
pub struct BrokenBasis {
    /// `ρ̃_l`, `l = 0..n`, with `U ρ̃_l = ρ̃_{(l+1) mod n}`.
    pub states: Vec<Operator>,
    /// Modes `ρ̂_j` as combined: `ρ̂₀` trace-normalized, the others scaled by `scale`.
    pub modes: Vec<Operator>,
    /// Common factor applied to the non-trivial modes.
    pub scale: f64,
}

/// Default metastability threshold, relative to the loss rate.
pub const METASTABILITY_REL: f64 = 1e-6;

fn min_eigenvalue(a: &Operator) -> Result<f64> {
    Ok(crate::operator::eigh(a)?.0[0])
}

/// Builds `ρ̃_l = ρ̂₀ + c Σ_{j≥1} z_jˡ ρ̂_j` from one (near-)zero mode per sector.
///
/// `ρ̂₀` is trace-normalized, modes are paired so that `ρ̂_{n−j} = ρ̂_j†`, and `c` is the
/// largest factor for which every `ρ̃_l` stays positive semidefinite. Modes must satisfy
/// `|Re λ| ≤ threshold`.
pub fn symmetry_broken_basis(
    zero_modes: &[SectorMode],
    s: &SymmetrySuperOp,
    threshold: f64,
) -> Result<BrokenBasis> {
    let n = s.order;
    let mut by_sector: Vec<Option<&EigenPair>> = vec![None; n];
    for m in zero_modes {
        if m.sector >= n {
            return Err(Error::Parameter(format!("sector {} out of range", m.sector)));
        }
        if m.pair.value.re.abs() > threshold {
            continue;
        }
        if by_sector[m.sector].is_some() {
            return Err(Error::Conditioning(format!(
                "several candidate zero modes in sector {}",
                m.sector
            )));
        }
        by_sector[m.sector] = Some(&m.pair);
    }
    let missing: Vec<usize> = (0..n).filter(|&j| by_sector[j].is_none()).collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteKernel(format!(
            "no mode below {threshold:.3e} in sectors {missing:?}"
        )));
    }
    let r0 = phase_fix(&by_sector[0].unwrap().right)
        .ok_or_else(|| Error::Conditioning("z = 1 mode is not Hermitian up to a phase".into()))?;
    let tr = r0.trace().re;
    if tr.abs() < 1e-12 {
        return Err(Error::IncompleteKernel("z = 1 mode carries no trace".into()));
    }
    let r0 = r0.scale_real(1.0 / tr);
    let mut modes: Vec<Operator> = vec![r0.clone(); n];
    for j in 1..n {
        let k = n - j;
        let p = &by_sector[j].unwrap().right;
        if j == k {
            modes[j] = phase_fix(p).ok_or_else(|| {
                Error::Conditioning(format!("self-conjugate mode {j} is not Hermitian"))
            })?;
        } else if j < k {
            let partner = &by_sector[k].unwrap().right;
            let dag = p.adjoint();
            let ov = crate::operator::hs_inner(&dag, partner)?;
            let rel = ov.norm() / (hs_norm(&dag) * hs_norm(partner));
            if rel < 1.0 - 1e-6 {
                return Err(Error::Conditioning(format!(
                    "modes {j} and {k} are not adjoint partners (overlap {rel:.6})"
                )));
            }
            modes[j] = p.clone();
            modes[k] = dag;
        }
    }
    let combine = |c: f64, l: usize| -> Result<Operator> {
        let mut acc = r0.clone();
        for (j, m) in modes.iter().enumerate().skip(1) {
            let z = root_of_unity((j * l) % n, n);
            acc = acc.axpby(C64::new(1.0, 0.0), m, z * c)?;
        }
        Ok(acc)
    };
    let feasible = |c: f64| -> Result<bool> {
        for l in 0..n {
            let st = combine(c, l)?.hermitian_part();
            if min_eigenvalue(&st)? < -64.0 * f64::EPSILON * st.norm1() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let scale = if n == 1 {
        0.0
    } else {
        let mut hi = 1.0;
        while feasible(hi)? {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::Conditioning("mode scale is unbounded".into()));
            }
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        lo
    };
    let mut states = Vec::with_capacity(n);
    for l in 0..n {
        let st = combine(scale, l)?;
        let defect = st.hermiticity_defect();
        if defect > 1e-8 * hs_norm(&st) {
            return Err(Error::Conditioning(format!(
                "broken-basis state {l} is not Hermitian (defect {defect:.3e})"
            )));
        }
        states.push(st.hermitian_part());
    }
    let modes = modes
        .into_iter()
        .enumerate()
        .map(|(j, m)| if j == 0 { m } else { m.scale_real(scale) })
        .collect();
    Ok(BrokenBasis {
        states,
        modes,
        scale,
    })
}

/// Inverts the broken basis: `ρ̂_k = Σ_l (z_k*)ˡ ρ̃_l / n`.
pub fn invert_broken_basis(states: &[Operator]) -> Result<Vec<Operator>> {
    let n = states.len();
    let d = states
        .first()
        .ok_or_else(|| Error::Parameter("empty basis".into()))?
        .dim();
    (0..n)
        .map(|k| {
            let mut acc = Operator::zeros(d);
            for (l, st) in states.iter().enumerate() {
                let z = root_of_unity((k * l) % n, n).conj() / n as f64;
                acc = acc.axpby(C64::new(1.0, 0.0), st, z)?;
            }
            Ok(acc)
        })
        .collect()
}
