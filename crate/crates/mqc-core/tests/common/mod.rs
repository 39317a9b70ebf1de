//! Shared oracles and random draws for the integration tests.
#![allow(dead_code)]

use mqc_core::{DetectorPair, DetectorQuad, QubitState};
use rand::Rng;

/// Enumerate every photon fate (detector, detected or not) and every dark
/// count pattern, and accumulate the click events.
pub fn enumerate_events(det: &DetectorPair, q: f64, beta: usize, k: u32) -> [[f64; 2]; 2] {
    let eta = [det.eta[0][beta], det.eta[1][beta]];
    let d = [det.d[0][beta], det.d[1][beta]];
    let mut out = [[0.0; 2]; 2];
    for code in 0..4u32.pow(k) {
        let mut c = code;
        let mut p = 1.0;
        let mut hit = [false; 2];
        for _ in 0..k {
            let fate = c % 4;
            c /= 4;
            let i = (fate / 2) as usize;
            let detected = fate % 2 == 1;
            p *= if i == 0 { q } else { 1.0 - q };
            p *= if detected { eta[i] } else { 1.0 - eta[i] };
            hit[i] |= detected;
        }
        for dark in 0..4u32 {
            let dk = [dark & 1 == 1, dark & 2 == 2];
            let pd: f64 = (0..2)
                .map(|i| if dk[i] { d[i] } else { 1.0 - d[i] })
                .product();
            let c0 = (hit[0] || dk[0]) as usize;
            let c1 = (hit[1] || dk[1]) as usize;
            out[c0][c1] += p * pd;
        }
    }
    out
}

/// Exhaustive enumeration over (arm, detector, detected) per photon and dark
/// counts per detector. Returns P(click pattern) for all 16 patterns.
pub fn enumerate_patterns(quad: &DetectorQuad, state: &QubitState, k: u32) -> [f64; 16] {
    let q0 = 0.5 * (1.0 + state.rz);
    let qp = 0.5 * (1.0 + state.rx * quad.theta.cos() + state.rz * quad.theta.sin());
    let route = [0.5 * q0, 0.5 * (1.0 - q0), 0.5 * qp, 0.5 * (1.0 - qp)];
    let mut out = [0.0; 16];
    for code in 0..8u32.pow(k) {
        let mut c = code;
        let mut p = 1.0;
        let mut hits = 0usize;
        for _ in 0..k {
            let fate = c % 8;
            c /= 8;
            let i = (fate / 2) as usize;
            let det = fate % 2 == 1;
            p *= route[i] * if det { quad.eta[i] } else { 1.0 - quad.eta[i] };
            if det {
                hits |= 1 << i;
            }
        }
        for dark in 0..16usize {
            let pd: f64 = (0..4)
                .map(|i| {
                    if dark >> i & 1 == 1 {
                        quad.d[i]
                    } else {
                        1.0 - quad.d[i]
                    }
                })
                .product();
            out[hits | dark] += p * pd;
        }
    }
    out
}

/// Uniform direction, radius ≤ 1 (mixed states allowed).
pub fn random_state<R: Rng>(rng: &mut R) -> QubitState {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r: f64 = rng.random_range(0.0..=1.0);
    let s = (1.0 - z * z).sqrt();
    QubitState::new(r * s * phi.cos(), r * s * phi.sin(), r * z).unwrap()
}

/// Uniform pure state on the Bloch sphere.
pub fn random_pure_state<R: Rng>(rng: &mut R) -> QubitState {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    QubitState::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    )
    .unwrap()
}
