//! Closed-form calculators for multiphoton attacks on the two-detector setup.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, dark, open_prob, prob, Error, Result};
use crate::optics::EventDistribution;

/// Result of an attack calculation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackOutcome {
    /// Alice's guessing probability, or a lower bound on it.
    pub guess_prob: f64,
    /// Upper bound on Alice's failure probability.
    pub fail_prob_bound: f64,
    /// Derived quantities, keyed by name.
    pub intermediates: BTreeMap<String, f64>,
}

/// Attack I with a coherent pulse on `|0⟩`: equal efficiencies, no dark
/// counts, BB84 bases, strategy I.
pub fn attack1_guess_coherent(eta: f64, mu: f64) -> Result<f64> {
    open_prob("eta", eta)?;
    check_range("mu", mu, "[0, inf)", mu >= 0.0)?;
    let x = mu * eta;
    // 1 - (2 e^{-x/2} - e^{-x})/2  =  (1 - e^{-x/2})^2 / 2 + 1/2
    let h = -(-x / 2.0).exp_m1();
    Ok(0.5 + 0.5 * h * h)
}

/// Alice guesses β = 0 when Bob reports a single click and β = 1 otherwise.
pub fn attack1_guess_general(events0: &EventDistribution, events1: &EventDistribution) -> f64 {
    0.5 * (events0.get(1, 0) + events0.get(0, 1) + events1.get(0, 0) + events1.get(1, 1))
}

/// Chernoff-bound attack over `n` pulses, a fraction `a` of which are
/// Alice's dishonest pulses. `p_attack[β]` and `p_protocol[β]` are the
/// probabilities that such a pulse triggers `m = 1` in basis `β`.
pub fn attack2_chernoff(
    n: f64,
    a: f64,
    p_attack: [f64; 2],
    p_protocol: [f64; 2],
) -> Result<AttackOutcome> {
    check_range("N", n, "[1, inf)", n >= 1.0)?;
    open_prob("a", a)?;
    for p in p_attack.iter().chain(&p_protocol) {
        prob("p", *p)?;
    }
    let g0 = a * p_attack[0] + (1.0 - a) * p_protocol[0];
    let g1 = a * p_attack[1] + (1.0 - a) * p_protocol[1];
    if !(g1 > g0 && g0 > 0.0) {
        return Err(Error::Precondition(format!(
            "attack premise g1 > g0 > 0 violated (g0 = {g0}, g1 = {g1})"
        )));
    }
    let delta = (g1 - g0) / (g1 + g0);
    let g_n = n * g0 * (1.0 + delta);
    let fail =
        0.5 * ((-n * g0 * delta * delta / 3.0).exp() + (-n * g1 * delta * delta / 2.0).exp());
    Ok(AttackOutcome {
        guess_prob: 1.0 - fail,
        fail_prob_bound: fail,
        intermediates: BTreeMap::from([
            ("g0".into(), g0),
            ("g1".into(), g1),
            ("delta".into(), delta),
            ("G_N".into(), g_n),
        ]),
    })
}

/// Parameters of the double-photon attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublePhotonParams {
    pub d0: f64,
    pub d1: f64,
    pub eta0: f64,
    pub eta1: f64,
    pub mu: f64,
    pub n: f64,
}

impl DoublePhotonParams {
    /// Weak-coherent example with a 0.04 efficiency mismatch.
    pub const EXAMPLE: Self = Self {
        d0: 1e-5,
        d1: 1e-5,
        eta0: 0.12,
        eta1: 0.08,
        mu: 0.05,
        n: 2e7,
    };
}

/// Alice counts reported two-photon `|0⟩` pulses and compares with `G`.
pub fn double_photon_attack(p: &DoublePhotonParams) -> Result<AttackOutcome> {
    dark("d0", p.d0)?;
    dark("d1", p.d1)?;
    open_prob("eta0", p.eta0)?;
    open_prob("eta1", p.eta1)?;
    check_range("mu", p.mu, "(0, inf)", p.mu > 0.0)?;
    check_range("N", p.n, "[1, inf)", p.n >= 1.0)?;
    if p.eta0 <= p.eta1 {
        return Err(Error::Precondition(format!(
            "requires eta0 > eta1 > 0, got eta0 = {}, eta1 = {}",
            p.eta0, p.eta1
        )));
    }
    let s = (1.0 - p.d0) * (1.0 - p.d1);
    let (a0, a1) = (1.0 - p.eta0, 1.0 - p.eta1);
    let p0 = 1.0 - s * a0 * a0;
    let p1 = 1.0 - s / 4.0 * (a0 * a0 + a1 * a1 + 2.0 * a0 * a1);
    let delta = (p0 - p1) / (p0 + p1);
    // e^{-μ} μ² N: two-photon weight e^{-μ}μ²/2 times N, before basis/state fractions
    let w = p.n * (-p.mu).exp() * p.mu * p.mu;
    let g = w * p0 * p1 / (4.0 * (p0 + p1));
    let e0 = w * p0 / 8.0;
    let e1 = w * p1 / 8.0;
    let fail =
        0.5 * ((-w * p0 * delta * delta / 16.0).exp() + (-w * p1 * delta * delta / 24.0).exp());
    Ok(AttackOutcome {
        guess_prob: 1.0 - fail,
        fail_prob_bound: fail,
        intermediates: BTreeMap::from([
            ("P0".into(), p0),
            ("P1".into(), p1),
            ("delta".into(), delta),
            ("G".into(), g),
            ("E_N_rep_0".into(), e0),
            ("E_N_rep_1".into(), e1),
        ]),
    })
}

/// Lower bound on Alice's success in the coin-flip attack with `m`
/// dishonest pulses when Bob discards double clicks.
pub fn coinflip_attack_success(s_min: f64, m: u32) -> Result<f64> {
    check_range("s_min", s_min, "(0, 1]", s_min > 0.0 && s_min <= 1.0)?;
    if m == 0 {
        return Err(Error::Precondition("M must be at least 1".into()));
    }
    Ok(1.0 - coinflip_failure_term(s_min, m))
}

/// `(1 − S_min/2)^M`
pub fn coinflip_failure_term(s_min: f64, m: u32) -> f64 {
    (1.0 - s_min / 2.0).powi(m as i32)
}

/// Lower bound on Bob's abort probability when he assigns a random outcome to
/// double clicks.
pub fn coinflip_double_click_abort(s_min: f64, m: u32) -> Result<f64> {
    check_range("s_min", s_min, "(0, 1]", s_min > 0.0 && s_min <= 1.0)?;
    if m == 0 {
        return Err(Error::Precondition("M must be at least 1".into()));
    }
    Ok(1.0 - (1.0 - s_min / 8.0).powi(m as i32))
}

/// Success ceiling `7/8 · S_min` of the single-pulse attack against the
/// random-outcome countermeasure.
pub fn coinflip_double_click_success_ceiling(s_min: f64) -> f64 {
    7.0 / 8.0 * s_min
}
