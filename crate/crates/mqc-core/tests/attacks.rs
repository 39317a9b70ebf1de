use mqc_core::attacks::*;
use mqc_core::montecarlo::{attack2_empirical, double_photon_failure_rate};
use mqc_core::optics::{det_probs_coherent, det_probs_fixed_k, overlap_q};
use mqc_core::{BasisPair, DetectorPair, QubitState};
use proptest::prelude::*;

#[test]
fn attack1_matches_event_probabilities() {
    // strategy I, |0⟩, BB84: guess β = 0 on a single click
    let det = DetectorPair::uniform(0.12, 0.0).unwrap();
    let bases = BasisPair::bb84();
    for mu in [0.0, 0.5, 3.0, 10.0, 30.0] {
        let ev: Vec<_> = (0..2)
            .map(|b| {
                det_probs_coherent(&det, overlap_q(&QubitState::zero(), &bases, b), b, mu).unwrap()
            })
            .collect();
        let general = attack1_guess_general(&ev[0], &ev[1]);
        let closed = attack1_guess_coherent(0.12, mu).unwrap();
        assert!((general - closed).abs() < 1e-14, "mu={mu}");
    }
    assert_eq!(attack1_guess_coherent(0.12, 0.0).unwrap(), 0.5);
}

#[test]
fn attack1_general_same_distribution_is_half() {
    let det = DetectorPair::symmetric(0.3, 0.2, 0.01, 0.02).unwrap();
    let ev = det_probs_fixed_k(&det, 0.4, 0, 5);
    assert_eq!(attack1_guess_general(&ev, &ev), 0.5);
}

#[test]
fn double_photon_reference_numbers() {
    let p = DoublePhotonParams::EXAMPLE;
    let out = double_photon_attack(&p).unwrap();
    let im = &out.intermediates;
    assert_eq!(format!("{:.4}", im["P0"]), "0.2256");
    assert_eq!(format!("{:.4}", im["P1"]), "0.1900");
    assert_eq!(format!("{:.4}", im["delta"]), "0.0857");

    // oracle: report probability (at least one click) of |00⟩ from the event model
    let det = DetectorPair::symmetric(p.eta0, p.eta1, p.d0, p.d1).unwrap();
    let bases = BasisPair::bb84();
    for (b, key) in [(0, "P0"), (1, "P1")] {
        let q = overlap_q(&QubitState::zero(), &bases, b);
        let report = 1.0 - det_probs_fixed_k(&det, q, b, 2).get(0, 0);
        assert!((report - im[key]).abs() < 1e-15);
    }
}

#[test]
fn double_photon_fail_bound_as_written() {
    // The bound evaluated from the stated expression is 0.03522, slightly above
    // the 0.035 quoted alongside it; see the decisions ledger.
    let out = double_photon_attack(&DoublePhotonParams::EXAMPLE).unwrap();
    assert!(
        (out.fail_prob_bound - 0.035_216_7).abs() < 1e-6,
        "{}",
        out.fail_prob_bound
    );
    assert!((out.guess_prob + out.fail_prob_bound - 1.0).abs() < 1e-15);
}

#[test]
fn double_photon_empirical_failure_within_bound() {
    let p = DoublePhotonParams::EXAMPLE;
    let bound = double_photon_attack(&p).unwrap().fail_prob_bound;
    let est = double_photon_failure_rate(7, 200, 4, &p).unwrap();
    assert!(
        est.value <= bound + 3.0 * est.stderr.max(1.0 / 200.0),
        "{est:?} vs {bound}"
    );
}

#[test]
fn chernoff_bound_holds_empirically() {
    let cases = [
        (100_000u64, 0.01, [0.3, 0.6], [0.05, 0.05]),
        (1_000_000, 0.001, [0.2, 0.9], [0.1, 0.1]),
        (50_000, 0.05, [0.1, 0.3], [0.02, 0.021]),
    ];
    for (i, (n, a, pa, pp)) in cases.into_iter().enumerate() {
        let out = attack2_chernoff(n as f64, a, pa, pp).unwrap();
        let est = attack2_empirical(100 + i as u64, 200, 4, n, a, pa, pp).unwrap();
        let fail = 1.0 - est.value;
        assert!(
            fail <= out.fail_prob_bound + 3.0 * est.stderr.max(1.0 / 200.0),
            "case {i}: empirical failure {fail} vs bound {}",
            out.fail_prob_bound
        );
    }
}

#[test]
fn chernoff_intermediates() {
    let out = attack2_chernoff(1e5, 0.01, [0.3, 0.6], [0.05, 0.05]).unwrap();
    let g0 = 0.01 * 0.3 + 0.99 * 0.05;
    let g1 = 0.01 * 0.6 + 0.99 * 0.05;
    assert!((out.intermediates["g0"] - g0).abs() < 1e-15);
    assert!((out.intermediates["delta"] - (g1 - g0) / (g1 + g0)).abs() < 1e-15);
    assert!(out.intermediates["G_N"] > 1e5 * g0 && out.intermediates["G_N"] < 1e5 * g1);
}

#[test]
fn coinflip_numbers() {
    let fail = coinflip_failure_term(0.68, 40);
    assert_eq!(format!("{fail:.0e}"), "6e-8");
    assert!((coinflip_attack_success(0.68, 40).unwrap() - (1.0 - fail)).abs() < 1e-15);
    assert_eq!(coinflip_attack_success(1.0, 1).unwrap(), 0.5);
    assert_eq!(coinflip_double_click_abort(1.0, 1).unwrap(), 0.125);
    let want = 1.0 - (1.0f64 - 0.085).powi(10);
    assert!((coinflip_double_click_abort(0.68, 10).unwrap() - want).abs() < 1e-15);
    assert!(coinflip_double_click_abort(0.68, 2000).unwrap() > 1.0 - 1e-12);
    assert_eq!(coinflip_double_click_success_ceiling(1.0), 0.875);
}

proptest! {
    #[test]
    fn attack1_monotone(eta in 0.01f64..0.99, mu in 0.0f64..50.0, step in 0.01f64..5.0) {
        let g = attack1_guess_coherent(eta, mu).unwrap();
        prop_assert!(attack1_guess_coherent(eta, mu + step).unwrap() > g || g == 1.0);
        prop_assert!(attack1_guess_coherent((eta + 0.005).min(0.995), mu).unwrap() >= g);
        prop_assert!((0.5..=1.0).contains(&g));
    }

    #[test]
    fn attack1_below_one_for_moderate_mu(eta in 0.01f64..0.99, mu in 0.0f64..20.0) {
        prop_assert!(attack1_guess_coherent(eta, mu).unwrap() < 1.0);
    }
}
