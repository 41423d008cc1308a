use nalgebra::{DMatrix, DVector};
use npovm::asd::{asd_measurement, asd_to_npovm, discrimination_error, dual_basis, max_uniform_c, PureStateFamily};
use npovm::bridge::{
    c0_from_c, check_rejection_condition, construct_povm, cost_bounded_pipeline,
    implementation_domain, invert_postselection, verify_implementation, verify_on_states,
    VerifyConfig, REJECTION_TOL,
};
use npovm::hermitian::HermitianMatrix;
use npovm::measurement::{sample_domain_states, Measurement, Outcome, DEFAULT_JITTER};
use npovm::random;
use npovm::supermap::{common_fixed_subspace, SuperMap};
use npovm::C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg(seed: u64, samples: usize) -> VerifyConfig {
    VerifyConfig {
        samples,
        seed,
        jitter: DEFAULT_JITTER,
    }
}

fn hermitian(d: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec(-2.0f64..2.0, 2 * d * d).prop_map(move |v| {
        HermitianMatrix::from_fn(d, |r, c| {
            let (a, b) = (r.min(c), r.max(c));
            let re = v[2 * (a * d + b)];
            let im = if a == b { 0.0 } else { v[2 * (a * d + b) + 1] };
            if r <= c {
                C64::new(re, im)
            } else {
                C64::new(re, -im)
            }
        })
        .unwrap()
    })
}

fn trace_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    (a.matrix() * b.matrix()).trace().re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coordinates_are_an_isometry((a, b) in (2usize..5).prop_flat_map(|d| (hermitian(d), hermitian(d)))) {
        let back = HermitianMatrix::from_coords(a.dim(), &a.to_coords()).unwrap();
        prop_assert!(back.max_abs_diff(&a) < 1e-12);
        let dot = a.to_coords().dot(&b.to_coords());
        prop_assert!((dot - trace_inner(&a, &b)).abs() < 1e-10);
    }

    #[test]
    fn adjoint_is_the_hs_transpose(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = SuperMap::unitary_conjugation(random::random_unitary(d, &mut rng)).unwrap();
        let x = random::random_hermitian(d, &mut rng);
        let y = random::random_hermitian(d, &mut rng);
        let lhs = trace_inner(&f.apply(&x).unwrap(), &y);
        let rhs = trace_inner(&x, &f.adjoint().apply(&y).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn fixed_space_is_fixed(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dec = random::random_decomposition(4, &mut rng);
        let maps: Vec<SuperMap> = dec.terms().values().flat_map(|ts| ts.iter().map(|t| t.map.clone())).collect();
        let k = common_fixed_subspace(4, maps.iter()).unwrap();
        prop_assert!(k.gram_deviation() < 1e-10);
        for x in k.basis() {
            for f in &maps {
                prop_assert!(f.adjoint().apply(x).unwrap().max_abs_diff(x) < 1e-9);
            }
        }
    }

    #[test]
    fn forward_construction_implements_the_decomposition(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dec = random::random_decomposition(d, &mut rng);
        let n = dec.induced_measurement().unwrap();
        let ps = construct_povm(&dec).unwrap();
        prop_assert!(ps.povm.is_povm(1e-10));
        prop_assert!(ps.povm.sum_residual().hs_norm() < 1e-10);
        let dom = implementation_domain(&dec).unwrap();
        let r = verify_implementation(&n, &ps, &dom, &cfg(seed, 30)).unwrap();
        prop_assert!(r.max_ratio_error < 1e-9);
        prop_assert!(r.acceptance_spread < 1e-10);
        prop_assert!((r.acceptance - 1.0 / ps.c).abs() < 1e-10);
    }

    #[test]
    fn inverse_undoes_forward(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dec = random::random_decomposition(d, &mut rng);
        let ps = construct_povm(&dec).unwrap();
        prop_assume!(ps.c > 1.0 + 1e-9);
        let c0 = c0_from_c(ps.c).unwrap();
        let k = implementation_domain(&dec).unwrap().subspace;
        let config = cfg(seed, 30);
        let inv = invert_postselection(&ps.povm, &ps.reject_label, &k, None, REJECTION_TOL, &config).unwrap();
        prop_assert!((inv.condition.c0 - c0).abs() < 1e-8 * c0);
        let n = dec.induced_measurement().unwrap();
        let states = sample_domain_states(&k, 30, seed, DEFAULT_JITTER).unwrap().states;
        for rho in &states {
            let a = n.expectations(rho.matrix()).unwrap();
            let b = inv.npovm.expectations(rho.matrix()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
        let r = verify_on_states(&inv.npovm, &ps.povm, &ps.reject_label, &states).unwrap();
        prop_assert!(r.max_ratio_error < 1e-9);
    }

    #[test]
    fn moving_weight_into_the_reject_outcome_is_detected(seed in any::<u64>(), d in 2usize..5, eps in 1e-3f64..0.05) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dec = random::random_decomposition(d, &mut rng);
        let ps = construct_povm(&dec).unwrap();
        prop_assume!(ps.c > 1.0 + 1e-9);
        let c0 = c0_from_c(ps.c).unwrap();
        let k = implementation_domain(&dec).unwrap().subspace;
        let r = ps.reject_effect();
        let accepted = &HermitianMatrix::identity(d) - r;
        let shrink = 1.0 - eps / accepted.hs_norm();
        prop_assume!(shrink >= 0.0);
        let outcomes = ps.povm.outcomes().iter().map(|o| {
            let e = if o.label == ps.reject_label { r + &accepted.scale(eps / accepted.hs_norm()) } else { o.effect.scale(shrink) };
            Outcome::new(o.label.clone(), e)
        }).collect();
        let m = Measurement::new(outcomes).unwrap();
        let cond = check_rejection_condition(&m, &ps.reject_label, &k, c0, REJECTION_TOL, &cfg(seed, 10)).unwrap();
        prop_assert!(!cond.holds);
        prop_assert!(cond.projection_norm >= eps / 2.0);
    }

    #[test]
    fn dual_basis_gives_unambiguous_discrimination(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states: Vec<DVector<C64>> = (0..d).map(|_| random::random_ket(d, &mut rng)).collect();
        let family = PureStateFamily::new(states.clone()).unwrap();
        let dual = dual_basis(&family);
        prop_assume!(dual.is_ok());
        let dual = dual.unwrap();
        for (j, phi) in dual.vectors.iter().enumerate() {
            for (k, psi) in states.iter().enumerate() {
                let expected = if j == k { 1.0 } else { 0.0 };
                prop_assert!((phi.dotc(psi).norm() - expected).abs() < 1e-8);
            }
        }
        let c = max_uniform_c(&dual);
        let psi = DMatrix::from_columns(&states);
        let smin = psi.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!((c - smin * smin).abs() < 1e-8);
        let m = asd_measurement(&dual, &vec![c; d]).unwrap();
        prop_assert!(m.is_povm(1e-9));
        prop_assume!(c < 1.0 - 1e-6);
        let inv = asd_to_npovm(&family, &dual, &vec![c; d], &cfg(seed, 20)).unwrap();
        prop_assert!(discrimination_error(&inv.npovm, &family).unwrap() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pipeline_implements_witnesses(seed in any::<u64>(), rotate in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, frame) = random::pt_witness_npovm(&mut rng, rotate);
        let out = cost_bounded_pipeline(&n, &frame).unwrap();
        prop_assert!(out.dim_bound_ok);
        prop_assert!(out.acc_bound_ok);
        let r = verify_implementation(&n, &out.postselected, &out.domain, &cfg(seed, 30)).unwrap();
        prop_assert!(r.max_ratio_error < 1e-9);
    }
}
