//! The two-qubit partial-transpose example, checked against hard-coded
//! matrices and an index-swapping partial transpose written here.

use approx::assert_abs_diff_eq;
use npovm::bridge::{
    acceptance_bound_check, c0_from_c, construct_povm, cost_bounded_pipeline, implementation_domain,
    invert_postselection, verify_implementation, verify_on_states, VerifyConfig, REJECTION_TOL,
};
use npovm::hermitian::{DensityMatrix, HermitianMatrix};
use npovm::pt_example::PartialTransposeExample;

fn real(rows: [[f64; 4]; 4]) -> HermitianMatrix {
    HermitianMatrix::from_real(4, &rows.concat()).unwrap()
}

/// `(ΓX)_{(a b),(a' b')} = X_{(a b'),(a' b)}` on two qubits.
fn pt_oracle(x: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::from_fn(4, |r, c| {
        let (a, b) = (r / 2, r % 2);
        let (a2, b2) = (c / 2, c % 2);
        x.entry(2 * a + b2, 2 * a2 + b)
    })
    .unwrap()
}

fn n0() -> HermitianMatrix {
    real([[1., 0., 0., 0.], [0., 0., 1., 0.], [0., 1., 0., 0.], [0., 0., 0., 1.]])
}

fn n1() -> HermitianMatrix {
    real([[0., 0., 0., 0.], [0., 1., -1., 0.], [0., -1., 1., 0.], [0., 0., 0., 0.]])
}

#[test]
fn effects_match_the_displayed_matrices() {
    let ex = PartialTransposeExample::new();
    let ps = construct_povm(&ex.decomposition()).unwrap();
    assert_abs_diff_eq!(ps.c, 2.0, epsilon = 1e-12);

    let m0 = pt_oracle(&n0()).scale(0.5);
    let m1 = n1().scale(0.5);
    let m2 = real([[1., 0., 0., -1.], [0., 1., 1., 0.], [0., 1., 1., 0.], [-1., 0., 0., 1.]]).scale(0.5);
    assert!(ps.povm.effect("0").unwrap().max_abs_diff(&m0) < 1e-12);
    assert!(ps.povm.effect("1").unwrap().max_abs_diff(&m1) < 1e-12);
    assert!(ps.reject_effect().max_abs_diff(&m2) < 1e-12);
    assert!(m2.min_eigenvalue() > -1e-12);

    // N_0 is the partial transpose of a PSD matrix and N_1 is PSD itself.
    let s0 = real([[1., 0., 0., 1.], [0., 0., 0., 0.], [0., 0., 0., 0.], [1., 0., 0., 1.]]);
    assert!(pt_oracle(&s0).max_abs_diff(&n0()) < 1e-15);
    assert!(pt_oracle(&s0).max_abs_diff(&n1()) > 0.5);
    assert!(n0().min_eigenvalue() < -0.5);
    assert!(n1().min_eigenvalue() > -1e-12);
}

#[test]
fn acceptance_is_one_half() {
    let ex = PartialTransposeExample::new();
    let dec = ex.decomposition();
    let ps = construct_povm(&dec).unwrap();
    let b = acceptance_bound_check(&dec, &ps);
    assert_abs_diff_eq!(b.acceptance, 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(b.bound, 0.25, epsilon = 1e-15);

    let dom = implementation_domain(&dec).unwrap();
    let r = verify_implementation(&ex.npovm(), &ps, &dom, &VerifyConfig::default()).unwrap();
    assert!(r.max_ratio_error < 1e-9);
    assert!(r.acceptance_spread < 1e-10);
    assert_abs_diff_eq!(r.acceptance, 0.5, epsilon = 1e-12);
}

#[test]
fn domain_is_the_pt_invariant_subspace() {
    let ex = PartialTransposeExample::new();
    let dom = implementation_domain(&ex.decomposition()).unwrap();
    // Hermitian on A times real symmetric on B: 4 · 3.
    assert_eq!(dom.dimension(), 12);
    for x in dom.subspace.basis() {
        assert!(pt_oracle(x).max_abs_diff(x) < 1e-9);
    }
}

#[test]
fn states_are_discriminated_perfectly() {
    let rho0 = real([[1., 0., 0., 0.], [0.; 4], [0.; 4], [0.; 4]]);
    // |+−⟩⟨+−|.
    let rho1 = real([
        [1., -1., 1., -1.],
        [-1., 1., -1., 1.],
        [1., -1., 1., -1.],
        [-1., 1., -1., 1.],
    ])
    .scale(0.25);
    for rho in [&rho0, &rho1] {
        assert!(pt_oracle(rho).max_abs_diff(rho) < 1e-15);
    }
    assert_abs_diff_eq!(rho0.hs_inner(&rho1).unwrap(), 0.25, epsilon = 1e-15);
    let n = [n0(), n1()];
    for (i, rho) in [&rho0, &rho1].into_iter().enumerate() {
        for (j, nj) in n.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(rho.hs_inner(nj).unwrap(), expected, epsilon = 1e-15);
        }
    }

    let ex = PartialTransposeExample::new();
    let ps = construct_povm(&ex.decomposition()).unwrap();
    let states = [DensityMatrix::new(rho0).unwrap(), DensityMatrix::new(rho1).unwrap()];
    let r = verify_on_states(&ex.npovm(), &ps.povm, &ps.reject_label, &states).unwrap();
    assert!(r.max_ratio_error < 1e-12);
}

#[test]
fn the_printed_second_state_has_trace_two() {
    let printed = real([[1.; 4]; 4]).scale(0.5);
    assert_abs_diff_eq!(printed.trace(), 2.0, epsilon = 1e-15);
    // Normalised, it is |++⟩⟨++|, which N_1 does not detect.
    let normalised = printed.scale(0.5);
    assert_abs_diff_eq!(normalised.hs_inner(&n1()).unwrap(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(normalised.hs_inner(&n0()).unwrap(), 1.0, epsilon = 1e-15);
}

#[test]
fn inversion_recovers_the_npovm() {
    let ex = PartialTransposeExample::new();
    let dec = ex.decomposition();
    let ps = construct_povm(&dec).unwrap();
    let c0 = c0_from_c(ps.c).unwrap();
    assert_abs_diff_eq!(c0, 2.0, epsilon = 1e-12);
    let k = implementation_domain(&dec).unwrap().subspace;
    let inv = invert_postselection(&ps.povm, &ps.reject_label, &k, None, REJECTION_TOL, &VerifyConfig::default())
        .unwrap();
    assert!(inv.condition.holds);
    let r = verify_implementation(&inv.npovm, &ps, &implementation_domain(&dec).unwrap(), &VerifyConfig::default())
        .unwrap();
    assert!(r.max_ratio_error < 1e-9);
}

#[test]
fn pipeline_on_the_computational_basis() {
    let ex = PartialTransposeExample::new();
    let out = cost_bounded_pipeline(&ex.npovm(), &PartialTransposeExample::computational_basis()).unwrap();
    assert_eq!(out.dim_prime_upper, 5);
    assert!(out.dim_bound_ok && out.acc_bound_ok);
    let r = verify_implementation(&ex.npovm(), &out.postselected, &out.domain, &VerifyConfig::default()).unwrap();
    assert!(r.max_ratio_error < 1e-9);
}
