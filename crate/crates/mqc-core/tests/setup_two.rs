use mqc_core::setup_two::*;
use mqc_core::{DetectorQuad, QubitState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{enumerate_patterns, random_pure_state};

fn random_quad<R: Rng>(rng: &mut R, dmax: f64) -> DetectorQuad {
    DetectorQuad::new(
        std::array::from_fn(|_| rng.random_range(0.01..0.99)),
        std::array::from_fn(|_| rng.random_range(0.0..dmax)),
        rng.random_range(0.0..1.5),
    )
    .unwrap()
}

#[test]
fn single_clicks_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..15 {
        let quad = random_quad(&mut rng, 0.2);
        let state = random_pure_state(&mut rng);
        for k in 0..=5 {
            let brute = enumerate_patterns(&quad, &state, k);
            let closed = single_click_probs(&quad, &state, k as u64);
            for i in 0..4 {
                assert!((closed[i] - brute[1 << i]).abs() < 1e-12, "k={k} i={i}");
            }
            // one arm silent, the other not
            let arm01 = |m: usize| m & 0b0011 != 0;
            let armpm = |m: usize| m & 0b1100 != 0;
            let r0: f64 = (0..16)
                .filter(|&m| armpm(m) && !arm01(m))
                .map(|m| brute[m])
                .sum();
            let r1: f64 = (0..16)
                .filter(|&m| arm01(m) && !armpm(m))
                .map(|m| brute[m])
                .sum();
            // the pattern in the ± arm assigns basis B_1; rsdcii reports [B_0, B_1]
            let g = rsdcii_report_probs_general(&quad, &state, k as u64);
            assert!((g.p_report[0] - r1).abs() < 1e-12);
            assert!((g.p_report[1] - r0).abs() < 1e-12);
        }
    }
}

#[test]
fn pair_equal_closed_form_matches_general() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..200 {
        let (e0, ep) = (rng.random_range(0.01..0.99), rng.random_range(0.01..0.99));
        let quad = DetectorQuad::new(
            [e0, e0, ep, ep],
            std::array::from_fn(|_| rng.random_range(0.0..0.1)),
            0.0,
        )
        .unwrap();
        let k = rng.random_range(0..40);
        let closed = rsdcii_report_probs(&quad, k).unwrap();
        for _ in 0..5 {
            let g = rsdcii_report_probs_general(&quad, &random_pure_state(&mut rng), k);
            for b in 0..2 {
                assert!((closed.p_report[b] - g.p_report[b]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn rsdcii_balanced_under_matching_darks() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..200 {
        let eta = rng.random_range(0.01..0.99);
        let (d0, d1, dp): (f64, f64, f64) = (
            rng.random_range(0.0..0.1),
            rng.random_range(0.0..0.1),
            rng.random_range(0.0..0.1),
        );
        // choose d_− so that (1−d0)(1−d1) = (1−d+)(1−d−)
        let dm = 1.0 - (1.0 - d0) * (1.0 - d1) / (1.0 - dp);
        if !(0.0..1.0).contains(&dm) {
            continue;
        }
        let quad = DetectorQuad::new([eta; 4], [d0, d1, dp, dm], 0.0).unwrap();
        for k in 0..=50 {
            let r = rsdcii_report_probs(&quad, k).unwrap();
            assert!((r.p_report[0] - r.p_report[1]).abs() < 1e-12);
        }
    }
}

#[test]
fn rsdcii_at_k0_is_dark_only() {
    let quad = DetectorQuad::new([0.1, 0.1, 0.2, 0.2], [0.01, 0.02, 0.03, 0.04], 0.0).unwrap();
    let r = rsdcii_report_probs(&quad, 0).unwrap();
    let (s01, spm) = (0.99 * 0.98, 0.97 * 0.96);
    assert!((r.p_report[0] - (spm - s01 * spm)).abs() < 1e-15);
    assert!((r.p_report[1] - (s01 - s01 * spm)).abs() < 1e-15);
}

/// Conditional probability that a reported `|0⟩^{⊗k}` pulse was assigned `B_0`.
fn mpaii_oracle(quad: &DetectorQuad, k: u64) -> f64 {
    let p = single_click_probs(quad, &QubitState::zero(), k);
    (p[D0] + p[D1]) / p.iter().sum::<f64>()
}

#[test]
fn mpaii_matches_conditional_oracle() {
    for eta in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let quad = DetectorQuad::uniform(eta, 1e-5).unwrap();
        for k in 0..=60 {
            let (g, o) = (mpaii_guess(&quad, k).unwrap(), mpaii_oracle(&quad, k));
            assert!((g - o).abs() < 1e-12, "eta={eta} k={k}: {g} vs {o}");
        }
    }
}

#[test]
fn mpaii_regimes() {
    let quad = DetectorQuad::uniform(0.1, 1e-5).unwrap();
    assert_eq!(mpaii_guess(&quad, 0).unwrap(), 0.5);
    assert!((mpaii_guess(&quad, 1).unwrap() - 0.5).abs() < 1e-15);
    // frozen from the conditional-probability oracle
    assert!((mpaii_guess(&quad, 150).unwrap() - mpaii_oracle(&quad, 150)).abs() < 1e-12);
    assert!((mpaii_guess(&quad, 150).unwrap() - 0.965).abs() < 5e-4);
    let first = (1..2000)
        .find(|&k| mpaii_guess(&quad, k).unwrap() > 0.99)
        .unwrap();
    assert!(first > 150 && first < 400, "{first}");
    for (eta, k) in [(0.3, 58), (0.5, 29), (0.7, 17), (0.9, 11)] {
        let q = DetectorQuad::uniform(eta, 1e-5).unwrap();
        assert!(mpaii_guess(&q, k).unwrap() > 0.99);
        assert!(mpaii_guess(&q, k - 1).unwrap() <= 0.99);
    }
    assert!(mpaii_guess(&DetectorQuad::new([0.1; 4], [1e-5; 4], 0.3).unwrap(), 5).is_err());
}

#[test]
fn attack2_setup2_reference_points() {
    let a = (1.0f64 - 1e-5).powi(2);
    // direct evaluation without rescaling; safe at these k
    let direct = |eta: f64, k: i32| {
        let (e0, ep) = (eta + 0.005, eta - 0.005);
        let p0 = a * (1.0 - ep / 2.0).powi(k) - a * a * (1.0 - (e0 + ep) / 2.0).powi(k);
        let p1 = a * (1.0 - e0 / 2.0).powi(k) - a * a * (1.0 - (e0 + ep) / 2.0).powi(k);
        p0.max(p1) / (p0 + p1)
    };
    for (eta, want) in [
        (0.1, 0.9329),
        (0.3, 0.9498),
        (0.5, 0.9656),
        (0.7, 0.9791),
        (0.9, 0.9895),
    ] {
        let g = attack2_setup2_guess(a, eta + 0.005, eta - 0.005, 500).unwrap();
        assert!((g - direct(eta, 500)).abs() < 1e-12);
        assert!((g - want).abs() < 1e-4, "eta={eta}: {g}");
    }
    assert_eq!(attack2_setup2_guess(a, 0.105, 0.095, 0).unwrap(), 0.5);
    assert!(attack2_setup2_guess(a, 0.105, 0.095, 1).unwrap() > 0.5);
    assert!(attack2_setup2_guess(a, 0.105, 0.095, 1_000_000).unwrap() > 1.0 - 1e-9);
}

#[test]
fn attack2_setup2_monotone_in_k() {
    for eta in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for dd in [0.001, 0.005, 0.02] {
            for dark in [0.0, 1e-5, 1e-2] {
                let a = (1.0f64 - dark).powi(2);
                let mut prev = 0.5;
                for k in 1..=2000 {
                    let g = attack2_setup2_guess(a, eta + dd, eta - dd, k).unwrap();
                    assert!(g >= prev - 1e-14, "eta={eta} dd={dd} k={k}");
                    prev = g;
                }
            }
        }
    }
}

#[test]
fn slii_single_photon_gap_never_exceeded() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..1000 {
        let delta: f64 = rng.random_range(0.0..0.05);
        let quad = DetectorQuad::new(
            std::array::from_fn(|_| rng.random_range(0.01..0.99)),
            std::array::from_fn(|_| rng.random_range(0.0..=delta)),
            rng.random_range(0.0..1.5),
        )
        .unwrap();
        let s = slii_strategy(quad.eta).unwrap();
        let state = random_pure_state(&mut rng);
        let cap = slii_single_photon_gap(delta, 1).unwrap();
        for k in 0..=1 {
            let r = slii_report(&quad, &state, k, s);
            assert!((r.p_report[1] - r.p_report[0]).abs() <= cap + 1e-15);
        }
    }
}

proptest! {
    #[test]
    fn mpaii_above_half_iff_multiphoton(eta in 0.01f64..0.99, d in 0.0f64..0.01, k in 0u64..300) {
        let quad = DetectorQuad::uniform(eta, d).unwrap();
        let g = mpaii_guess(&quad, k).unwrap();
        prop_assert!(g >= 0.5 - 1e-15);
        if k >= 2 {
            prop_assert!(g > 0.5);
        } else {
            prop_assert!((g - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn rsdcii_state_independent(seed in any::<u64>(), k in 0u64..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (e0, ep) = (rng.random_range(0.01..0.99), rng.random_range(0.01..0.99));
        let quad = DetectorQuad::new([e0, e0, ep, ep], [1e-3; 4], 0.0).unwrap();
        let a = rsdcii_report_probs_general(&quad, &random_pure_state(&mut rng), k);
        let b = rsdcii_report_probs_general(&quad, &random_pure_state(&mut rng), k);
        prop_assert!((a.p_report[0] - b.p_report[0]).abs() < 1e-12);
        prop_assert!((a.p_report[1] - b.p_report[1]).abs() < 1e-12);
    }
}
