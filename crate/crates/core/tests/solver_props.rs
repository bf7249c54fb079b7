mod common;

use common::bures;
use faithful::criteria::x_operator_max_eigenvalue;
use faithful::linalg::{min_eigenvalue, partial_trace, ComplexMatrix, Dims, Subsystem};
use faithful::seesaw::{max_singlet_fraction, SeesawOptions};
use faithful::solver::{obs3_verdict, sdp_max_overlap, OverlapVerdict, SdpOptions, SdpStatus};
use faithful::states::{ginibre, BipartiteState, SampleRng};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn optimizer_is_feasible_and_gap_is_closed(d in 2usize..=4, seed in any::<u64>()) {
        let st = bures(d, seed, 0);
        let sol = sdp_max_overlap(&st, &SdpOptions::default()).unwrap();
        prop_assert_eq!(sol.status, SdpStatus::Converged);
        prop_assert!(sol.upper_bound - sol.lower_bound <= 1e-6);
        prop_assert!(min_eigenvalue(&sol.chi).unwrap() >= -1e-8);
        prop_assert!((sol.chi.trace().re - 1.0).abs() <= 1e-8);
        let mixed = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
        for side in [Subsystem::A, Subsystem::B] {
            let m = partial_trace(&sol.chi, Dims::square(d), side).unwrap();
            prop_assert!((&m - &mixed).frobenius_norm() <= 1e-7);
        }
        let value = st.rho().trace_product(&sol.chi).re;
        prop_assert!((value - sol.optimum).abs() <= 1e-9);
    }

    #[test]
    fn see_saw_sdp_and_eigenvalue_bounds_are_ordered(d in 2usize..=4, seed in any::<u64>()) {
        let st = bures(d, seed, 1);
        let sol = sdp_max_overlap(&st, &SdpOptions::default()).unwrap();
        let opts = SeesawOptions { restarts: 8, ..SeesawOptions::default() };
        let s = max_singlet_fraction(&st, &opts).unwrap().best_value;
        let top = x_operator_max_eigenvalue(&st).unwrap();
        prop_assert!(s <= sol.optimum + 1e-6, "see-saw {s} above sdp {}", sol.optimum);
        prop_assert!(sol.optimum <= top + 1e-6, "sdp {} above lambda_max {top}", sol.optimum);
    }
}

#[test]
fn repaired_objective_rises_after_burn_in() {
    let opts = SdpOptions { record_history: true, ..SdpOptions::default() };
    let (mut closer, mut runs) = (0usize, 0usize);
    for d in [3, 4] {
        for i in 0..10 {
            let sol = sdp_max_overlap(&bures(d, 55, i), &opts).unwrap();
            let h = &sol.history;
            assert!(h.iter().all(|v| *v <= sol.upper_bound + 1e-9));
            assert!((h[h.len() - 1] - sol.optimum).abs() <= 1e-6);
            if h.len() < 70 {
                continue;
            }
            // Mean shortfall from the optimum, first vs second half after burn-in.
            let tail = &h[50..];
            let mid = tail.len() / 2;
            let shortfall = |xs: &[f64]| xs.iter().map(|v| sol.optimum - v).sum::<f64>() / xs.len() as f64;
            runs += 1;
            closer += (shortfall(&tail[mid..]) <= shortfall(&tail[..mid]) + 1e-9) as usize;
        }
    }
    assert!(runs >= 10);
    assert!(closer * 5 >= runs * 4, "{closer} of {runs} runs moved towards the optimum");
}

/// Low-rank state whose relaxation is loose, mixed with white noise so that
/// the relaxation exceeds 1/d while the best maximally entangled overlap
/// does not.
#[test]
fn noisy_entangled_state_is_left_open() {
    let d = 4;
    let dims = Dims::square(d);
    let opts = SdpOptions::default();
    let seesaw = SeesawOptions::default();
    let (inv_d, inv_n) = (1.0 / d as f64, 1.0 / (d * d) as f64);
    for i in 0..200u64 {
        let mut rng = SampleRng::stream(403, i);
        let g = ginibre(d * d, &mut rng);
        let g = ComplexMatrix::from_fn(d * d, 3, |r, c| g[(r, c)]);
        let st = BipartiteState::from_unnormalized(g.mul_adjoint(&g), dims).unwrap();
        let v = sdp_max_overlap(&st, &opts).unwrap().optimum;
        if v <= inv_d {
            continue;
        }
        let f = max_singlet_fraction(&st, &seesaw).unwrap().best_value;
        if f <= inv_d || v - f < 2e-4 {
            continue;
        }
        let threshold = |x: f64| (inv_d - inv_n) / (x - inv_n);
        let p = 0.5 * (threshold(v) + threshold(f));
        let noisy = st.with_white_noise(p).unwrap();
        let sol = sdp_max_overlap(&noisy, &opts).unwrap();
        assert!((sol.optimum - (p * v + (1.0 - p) * inv_n)).abs() <= 1e-6);
        assert!(sol.optimum > inv_d + 1e-5);
        assert!(sol.purity < 1.0 - 1e-3);
        let best = max_singlet_fraction(&noisy, &seesaw).unwrap().best_value;
        assert!((best - (p * f + (1.0 - p) * inv_n)).abs() <= 1e-6);
        assert!(best < inv_d);
        let c = obs3_verdict(&noisy, &sol).unwrap();
        assert_eq!(c.verdict, OverlapVerdict::Inconclusive);
        return;
    }
    panic!("no state with a loose relaxation found");
}
