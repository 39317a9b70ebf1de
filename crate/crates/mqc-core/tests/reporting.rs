#![allow(clippy::needless_range_loop)]

use mqc_core::optics::{det_probs_fixed_k, overlap_q};
use mqc_core::reporting::*;
use mqc_core::{BasisPair, DetectorPair, EventDistribution, QubitState, ReportingStrategy};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::random_state;

fn report_gap(
    strategy: &ReportingStrategy,
    det: &DetectorPair,
    state: &QubitState,
    bases: &BasisPair,
    k: u64,
) -> f64 {
    let p: Vec<f64> = (0..2)
        .map(|b| {
            report_prob(
                strategy,
                &det_probs_fixed_k(det, overlap_q(state, bases, b), b, k),
                b,
            )
        })
        .collect();
    (p[1] - p[0]).abs()
}

#[test]
fn strategy_ii_is_basis_blind_with_equal_efficiencies() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let s = ReportingStrategy::strategy_ii();
    for _ in 0..1000 {
        let eta = rng.random_range(0.01..0.99);
        let (d0, d1) = (rng.random_range(0.0..0.2), rng.random_range(0.0..0.2));
        let det = DetectorPair::new([[eta; 2]; 2], [[d0; 2], [d1; 2]]).unwrap();
        let bases = BasisPair::new(rng.random_range(0.01..=1.0)).unwrap();
        let state = random_state(&mut rng);
        let k = rng.random_range(0..=10);
        assert!(report_gap(&s, &det, &state, &bases, k) < 1e-12);
    }
}

#[test]
fn strategy_iii_single_photon_cap() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..1000 {
        let delta: f64 = rng.random_range(0.0..0.05);
        let mut eta = [[0.0; 2]; 2];
        let mut d = [[0.0; 2]; 2];
        for i in 0..2 {
            for b in 0..2 {
                eta[i][b] = rng.random_range(0.01..0.99);
                d[i][b] = rng.random_range(0.0..=delta);
            }
        }
        let det = DetectorPair::new(eta, d).unwrap();
        let (s0, s1) = (rng.random::<f64>(), rng.random::<f64>());
        let strat = ReportingStrategy::strategy_iii(&det, s0, s1).unwrap();
        let bases = BasisPair::new(rng.random_range(0.01..=1.0)).unwrap();
        let state = random_state(&mut rng);
        for k in 0..=1 {
            let cap = lemma1_bound(delta, s0.max(s1), k).unwrap();
            let gap = report_gap(&strat, &det, &state, &bases, k);
            assert!(gap <= cap + 1e-15, "k={k}: gap {gap} > cap {cap}");
        }
    }
}

#[test]
fn lemma1_examples() {
    assert_eq!(lemma1_bound(0.0, 0.7, 1).unwrap(), 0.0);
    let v = lemma1_bound(1e-5, 1.0, 1).unwrap();
    assert!((v - (1.1e-4 + 3e-10)).abs() < 1e-18);
    assert_eq!(lemma1_bound(0.01, 1.0, 0).unwrap(), 0.02);
    assert!(lemma1_bound(0.01, 1.0, 2).is_err());
}

#[test]
fn feasibility_examples() {
    let base = FeasibilityInputs {
        delta_cc_i: (0.005, 0.005),
        delta_err_equal: 0.01,
        delta_err_diff: 0.001,
        delta_error: 0.01,
        delta_00_ii: 0.95,
        delta_det: 0.04,
    };
    let v = trivial_feasibility(&base).unwrap();
    assert!(v.first_class_ok);
    assert!((v.first_class_lhs - 0.0061).abs() < 1e-15);
    // δ_00/(5(1−δ_00)) = 3.8 dwarfs δ_det
    assert!((v.det_rhs - 3.8).abs() < 1e-12);
    assert!(!v.second_class_forces_nontrivial);

    let weak = FeasibilityInputs {
        delta_00_ii: 0.1,
        delta_det: 0.04,
        delta_error: 0.046,
        ..base
    };
    let v = trivial_feasibility(&weak).unwrap();
    assert!((v.det_rhs - 0.1 / 4.5).abs() < 1e-15);
    assert!(v.second_class_forces_nontrivial);

    let big_error = FeasibilityInputs {
        delta_error: 1.0 / 12.0,
        ..weak
    };
    assert!(
        !trivial_feasibility(&big_error)
            .unwrap()
            .second_class_forces_nontrivial
    );
    assert!(trivial_feasibility(&FeasibilityInputs {
        delta_det: 1.0,
        ..base
    })
    .is_err());
}

#[test]
fn symmetrized_strategy_equalizes_single_click_rates() {
    let freqs = [[0.12, 0.10], [0.08, 0.09]];
    let s = ReportingStrategy::symmetrized(freqs).unwrap();
    for i in 0..2 {
        for b in 0..2 {
            let (c0, c1) = if i == 0 { (1, 0) } else { (0, 1) };
            assert!((s.get(c0, c1, b) * freqs[i][b] - 0.08).abs() < 1e-15);
        }
        assert_eq!(s.get(0, 0, i), 0.0);
        assert_eq!(s.get(1, 1, i), 0.0);
    }
}

#[test]
fn json_round_trip_and_axis_order() {
    let s = ReportingStrategy::strategy_iii(
        &DetectorPair::symmetric(0.1, 0.2, 0.0, 0.0).unwrap(),
        0.3,
        0.4,
    )
    .unwrap();
    let text = serde_json::to_string(&s).unwrap();
    let back: ReportingStrategy = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    // S[c0=1][c1=1][β=1]
    assert_eq!(v["S"][1][1][1], 0.4);
    assert!(serde_json::from_str::<ReportingStrategy>(
        r#"{"S": [[[1,1],[1,1]],[[1,1],[1,1]]], "x": 1}"#
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn trivial_strategy_reports_at_its_rate(
        s in 0.001f64..=1.0,
        a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0,
        beta in 0usize..2,
    ) {
        let w = [a, b, c, 1.0];
        let t: f64 = w.iter().sum();
        let ev = EventDistribution::new([[w[0] / t, w[1] / t], [w[2] / t, w[3] / t]]).unwrap();
        let p = report_prob(&ReportingStrategy::trivial(s).unwrap(), &ev, beta);
        prop_assert!((p - s).abs() < 1e-15);
    }

    #[test]
    fn report_prob_monotone_in_entries(
        entries in prop::array::uniform8(0.0f64..=1.0),
        idx in 0usize..8,
        bump in 0.0f64..=1.0,
        w in prop::array::uniform4(0.0f64..1.0),
        beta in 0usize..2,
    ) {
        let t: f64 = w.iter().sum::<f64>() + 1e-9;
        let ev = EventDistribution::new([[w[0] / t, w[1] / t], [w[2] / t, (w[3] + 1e-9) / t]]).unwrap();
        let mut s = [[[0.0; 2]; 2]; 2];
        for (n, x) in entries.iter().enumerate() {
            s[n >> 2][(n >> 1) & 1][n & 1] = *x;
        }
        let lo = ReportingStrategy::new(s).unwrap();
        let x = &mut s[idx >> 2][(idx >> 1) & 1][idx & 1];
        *x = (*x + bump).min(1.0);
        let hi = ReportingStrategy::new(s).unwrap();
        prop_assert!(report_prob(&hi, &ev, beta) >= report_prob(&lo, &ev, beta));
    }
}
