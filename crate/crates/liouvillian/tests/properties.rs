//! Property tests against direct matrix-level oracles.

use liouvillian::analysis::{fidelity, trace_distance};
use liouvillian::dynamics::{evolve_expm, evolve_vec};
use liouvillian::liouville::{apply_liouvillian, build_liouvillian, matrix_free};
use liouvillian::models::{Jump, ModelMeta, ModelSpec};
use liouvillian::operator::{hs_norm, kron, unvectorize, vectorize, Operator, C64};
use liouvillian::symmetry::{number_parity_symmetry, sector_decompose};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_op(d: usize, rng: &mut ChaCha8Rng) -> Operator {
    Operator::from_fn(d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).unwrap()
}

fn random_state(d: usize, rng: &mut ChaCha8Rng) -> Operator {
    let g = random_op(d, rng);
    let r = g.matmul(&g.adjoint()).unwrap();
    let t = r.trace().re;
    r.scale_real(1.0 / t)
}

fn random_model(d: usize, rng: &mut ChaCha8Rng) -> ModelSpec {
    let g = random_op(d, rng);
    let h = g.add(&g.adjoint()).unwrap().scale_real(0.5);
    let jumps = (0..rng.random_range(1..=3))
        .map(|_| Jump {
            op: random_op(d, rng),
            rate: rng.random_range(0.0..2.0),
        })
        .collect();
    let meta = ModelMeta {
        params: None,
        n: 1.0,
        gamma: 1.0,
    };
    ModelSpec::new(h, jumps, meta).unwrap()
}

/// `-i[H, ρ] + Σ γ (Γ ρ Γ† - ½{Γ†Γ, ρ})` evaluated with operator products.
fn lindblad_rhs(m: &ModelSpec, rho: &Operator) -> Operator {
    let h = &m.hamiltonian;
    let comm = h.matmul(rho).unwrap().sub(&rho.matmul(h).unwrap()).unwrap();
    let mut out = comm.scale(c(0.0, -1.0));
    for j in &m.jumps {
        let a = &j.op;
        let ad = a.adjoint();
        let k = ad.matmul(a).unwrap();
        let jump = a.matmul(rho).unwrap().matmul(&ad).unwrap();
        let anti = k.matmul(rho).unwrap().add(&rho.matmul(&k).unwrap()).unwrap();
        let term = jump.sub(&anti.scale_real(0.5)).unwrap().scale_real(j.rate);
        out = out.add(&term).unwrap();
    }
    out
}

fn case() -> impl Strategy<Value = (usize, u64)> {
    (2usize..=6, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn row_stacking_identity((d, seed) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, x, b) = (random_op(d, &mut rng), random_op(d, &mut rng), random_op(d, &mut rng));
        let lhs = vectorize(&a.matmul(&x).unwrap().matmul(&b).unwrap());
        let k = kron(&a.to_mat(), &b.transpose().to_mat());
        let vx = vectorize(&x);
        for (i, l) in lhs.iter().enumerate() {
            let r: C64 = (0..d * d).map(|j| k[(i, j)] * vx[j]).sum();
            prop_assert!((l - r).norm() <= 1e-12 * (1.0 + l.norm()));
        }
        prop_assert!(hs_norm(&unvectorize(&vx, d).unwrap().sub(&x).unwrap()) == 0.0);
    }

    #[test]
    fn liouvillian_matches_master_equation((d, seed) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(d, &mut rng);
        let rho = random_op(d, &mut rng);
        let want = lindblad_rhs(&m, &rho);
        let scale = 1.0 + hs_norm(&want);
        for l in [build_liouvillian(&m).unwrap(), matrix_free(&m).unwrap()] {
            let got = apply_liouvillian(&l, &rho).unwrap();
            prop_assert!(hs_norm(&got.sub(&want).unwrap()) <= 1e-12 * scale);
        }
    }

    #[test]
    fn dynamics_is_trace_preserving_and_positive((d, seed) in case(), t in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(d, &mut rng);
        let l = build_liouvillian(&m).unwrap();
        let rho0 = random_state(d, &mut rng);
        let rho = evolve_expm(&l, &rho0, t).unwrap();
        prop_assert!((rho.trace() - c(1.0, 0.0)).norm() <= 1e-10);
        prop_assert!(rho.hermiticity_defect() <= 1e-10);
        // Contractivity of the trace distance under a CPTP map.
        let sigma0 = random_state(d, &mut rng);
        let sigma = evolve_expm(&l, &sigma0, t).unwrap();
        let before = trace_distance(&rho0, &sigma0).unwrap();
        let after = trace_distance(&rho, &sigma).unwrap();
        prop_assert!(after <= before + 1e-9, "{after} > {before}");
        let f = fidelity(&rho, &rho).unwrap();
        prop_assert!((f - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn matrix_free_and_explicit_propagators_agree((d, seed) in case(), t in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(d, &mut rng);
        let x = vectorize(&random_state(d, &mut rng));
        let a = evolve_vec(&build_liouvillian(&m).unwrap(), &x, t).unwrap();
        let b = evolve_vec(&matrix_free(&m).unwrap(), &x, t).unwrap();
        let diff: f64 = a.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-8, "{diff}");
    }

    #[test]
    fn fidelity_and_trace_distance_bounds((d, seed) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state(d, &mut rng);
        let sigma = random_state(d, &mut rng);
        let f = fidelity(&rho, &sigma).unwrap();
        let g = fidelity(&sigma, &rho).unwrap();
        let t = trace_distance(&rho, &sigma).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - g).abs() <= 1e-8);
        prop_assert!((t - trace_distance(&sigma, &rho).unwrap()).abs() <= 1e-12);
        prop_assert!(1.0 - f <= t + 1e-8);
        prop_assert!(t <= (1.0 - f * f).max(0.0).sqrt() + 1e-8);
    }

    #[test]
    fn parity_sectors_partition_the_spectrum_dimension(d in 2usize..=8, n in 2usize..=4) {
        // A phase-covariant model: diagonal H and a single lowering jump.
        let h = Operator::real_diag(&(0..d).map(|k| (k * k) as f64 * 0.3).collect::<Vec<_>>());
        let a = liouvillian::operator::destroy(d).unwrap();
        let m = ModelSpec::new(h, vec![Jump { op: a, rate: 1.0 }], ModelMeta { params: None, n: 1.0, gamma: 1.0 }).unwrap();
        let l = build_liouvillian(&m).unwrap();
        let s = number_parity_symmetry(d, n).unwrap();
        let dec = sector_decompose(&l, &s).unwrap();
        let mut present: Vec<usize> = (0..d * d).map(|k| (k / d + n * d - k % d) % n).collect();
        present.sort_unstable();
        present.dedup();
        prop_assert_eq!(dec.sectors.iter().map(|b| b.j).collect::<Vec<_>>(), present);
        prop_assert_eq!(dec.sectors.iter().map(|b| b.block.len()).sum::<usize>(), d * d);
    }
}
