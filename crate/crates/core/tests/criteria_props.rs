mod common;

use common::{bures, feasible_chi, unitary};
use faithful::criteria::{
    ccnr_check, concurrence_qubit, negativity, obs2_qubit_faithful, obs3a_bound, ppt_check, x_operator,
    x_operator_max_eigenvalue,
};
use faithful::linalg::{partial_trace, ComplexMatrix, Dims, Subsystem};
use faithful::solver::{sdp_max_overlap, SdpOptions};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn x_operator_agrees_on_feasible_points(d in 2usize..=4, seed in any::<u64>(), k in 1usize..=6) {
        let st = bures(d, seed, 0);
        let chi = feasible_chi(d, k, seed);
        let dims = Dims::square(d);
        let mixed = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
        prop_assert!(partial_trace(&chi, dims, Subsystem::A).unwrap().max_abs_diff(&mixed) < 1e-12);
        let x = x_operator(&st).unwrap();
        let lhs = x.trace_product(&chi).re;
        let rhs = st.rho().trace_product(&chi).re;
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn qubit_criterion_is_local_unitary_invariant(seed in any::<u64>()) {
        let st = bures(2, seed, 0);
        let rotated = st.local_rotation(&unitary(2, seed, 1), &unitary(2, seed, 2)).unwrap();
        let a = x_operator_max_eigenvalue(&st).unwrap();
        let b = x_operator_max_eigenvalue(&rotated).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }
}

#[test]
fn strong_entanglement_implies_qubit_faithfulness() {
    let bound = (2f64.sqrt() - 1.0) / 2.0;
    let mut implied = 0;
    for i in 0..1000 {
        let st = bures(2, 3131, i);
        let strong = concurrence_qubit(&st).unwrap() > 0.5 || negativity(&st).unwrap() > bound;
        if strong {
            implied += 1;
            assert!(obs2_qubit_faithful(&st).unwrap().is_violated(), "sample {i}");
        }
    }
    assert!(implied > 100, "only {implied} strongly entangled samples");
}

#[test]
fn faithful_qubit_states_are_npt_and_violate_ccnr() {
    for i in 0..1000 {
        let st = bures(2, 8080, i);
        if obs2_qubit_faithful(&st).unwrap().is_violated() {
            assert!(ppt_check(&st).unwrap().is_violated(), "sample {i}");
            assert!(ccnr_check(&st).unwrap().is_violated(), "sample {i}");
        }
    }
}

#[test]
fn eigenvalue_bound_implies_sdp_bound() {
    let opts = SdpOptions::default();
    let mut hits = 0;
    for d in [3, 4] {
        for i in 0..40 {
            let st = bures(d, 4040, i);
            if obs3a_bound(&st).unwrap().is_satisfied() {
                hits += 1;
                let sol = sdp_max_overlap(&st, &opts).unwrap();
                assert!(sol.upper_bound <= 1.0 / d as f64 + 1e-6, "d={d} sample {i}: {}", sol.upper_bound);
            }
        }
    }
    assert!(hits > 10);
}
