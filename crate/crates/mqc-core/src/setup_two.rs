//! Four-detector receiver (Setup II): a 50:50 beam splitter sends each photon
//! either to a `{D_0, D_1}` polarizing splitter (basis `B_0`) or to a
//! `{D_+, D_−}` one (basis `B_1`). The assigned basis is an outcome, not a
//! choice, so report probabilities are joint: `P_report(1, β)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, dark, open_prob, Error, Result};
use crate::optics::{powk, QubitState};

pub const D0: usize = 0;
pub const D1: usize = 1;
pub const DPLUS: usize = 2;
pub const DMINUS: usize = 3;

/// Efficiencies and dark counts of `(D_0, D_1, D_+, D_−)`, and the angle
/// `theta ∈ [0, π/2)` of the `B_1` basis measured from |+⟩ towards |0⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorQuad {
    pub eta: [f64; 4],
    pub d: [f64; 4],
    #[serde(default)]
    pub theta: f64,
}

impl DetectorQuad {
    pub fn new(eta: [f64; 4], d: [f64; 4], theta: f64) -> Result<Self> {
        let q = Self { eta, d, theta };
        q.validate()?;
        Ok(q)
    }

    pub fn uniform(eta: f64, d: f64) -> Result<Self> {
        Self::new([eta; 4], [d; 4], 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..4 {
            open_prob("eta", self.eta[i])?;
            dark("d", self.d[i])?;
        }
        check_range(
            "theta",
            self.theta,
            "[0, pi/2)",
            (0.0..std::f64::consts::FRAC_PI_2).contains(&self.theta),
        )?;
        Ok(())
    }

    /// Per-photon routing weights `(q_0, 1 − q_0, q_+, 1 − q_+) / 2`.
    pub fn routing(&self, state: &QubitState) -> [f64; 4] {
        let q0 = (0.5 * (1.0 + state.rz)).clamp(0.0, 1.0);
        let qp = (0.5 * (1.0 + state.rx * self.theta.cos() + state.rz * self.theta.sin()))
            .clamp(0.0, 1.0);
        [0.5 * q0, 0.5 * (1.0 - q0), 0.5 * qp, 0.5 * (1.0 - qp)]
    }
}

/// Joint probabilities that Bob reports `m = 1` and assigns basis `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadReport {
    pub p_report: [f64; 2],
}

/// Probabilities that exactly one detector clicks, `(P_0, P_1, P_+, P_−)`,
/// for the product state `state^{⊗k}`.
pub fn single_click_probs(quad: &DetectorQuad, state: &QubitState, k: u64) -> [f64; 4] {
    let w = quad.routing(state);
    let x: [f64; 4] = std::array::from_fn(|i| w[i] * quad.eta[i]);
    let all = powk(1.0 - x.iter().sum::<f64>(), k);
    std::array::from_fn(|i| {
        let others_silent: f64 = (0..4)
            .filter(|&j| j != i)
            .map(|j| 1.0 - quad.d[j])
            .product();
        let not_i = powk(1.0 - (x.iter().sum::<f64>() - x[i]), k);
        (others_silent * (not_i - (1.0 - quad.d[i]) * all)).max(0.0)
    })
}

/// Symmetrization of losses for Setup II: `S_i = min_j v_j / v_i`, where `v`
/// holds either observed single-click frequencies or efficiencies.
pub fn slii_strategy(values: [f64; 4]) -> Result<[f64; 4]> {
    for v in values {
        check_range("value", v, "(0, inf)", v > 0.0)?;
    }
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(values.map(|v| m / v))
}

/// Report probabilities under SLII with per-detector weights `s`.
pub fn slii_report(quad: &DetectorQuad, state: &QubitState, k: u64, s: [f64; 4]) -> QuadReport {
    let p = single_click_probs(quad, state, k);
    QuadReport {
        p_report: [
            s[D0] * p[D0] + s[D1] * p[D1],
            s[DPLUS] * p[DPLUS] + s[DMINUS] * p[DMINUS],
        ],
    }
}

/// Guessing probability of Alice's `|0⟩^{⊗k}` pulse against SLII when all
/// four detectors share `η` and `d` and `theta = 0`. Alice guesses `B_0`.
pub fn mpaii_guess(quad: &DetectorQuad, k: u64) -> Result<f64> {
    quad.validate()?;
    let eta = quad.eta[0];
    let d = quad.d[0];
    if quad.eta.iter().any(|&e| e != eta) || quad.d.iter().any(|&x| x != d) || quad.theta != 0.0 {
        return Err(Error::Precondition(
            "closed form holds only for uniform efficiencies and dark counts with theta = 0".into(),
        ));
    }
    if k <= 1 {
        // one photon cannot reach both arms; the closed form reduces to 1/2
        return Ok(0.5);
    }
    // ratios relative to (1 - 3η/4)^k keep large k finite
    let base = 1.0 - 0.75 * eta;
    let rho1 = powk((1.0 - 0.5 * eta) / base, k);
    let rho2 = powk((1.0 - eta) / base, k);
    let num = 2.0 * (1.0 - (1.0 - d) * rho2);
    let den = 2.0 + rho1 + (1.0 - 4.0 * (1.0 - d)) * rho2;
    if rho1.is_infinite() {
        return Ok(1.0);
    }
    Ok(1.0 - num / den)
}

/// Report probabilities under RSDCII (single and double clicks reported;
/// a click pattern within one arm assigns that arm's basis) for pair-equal
/// efficiencies `η_0 = η_1`, `η_+ = η_−`. They do not depend on the state.
pub fn rsdcii_report_probs(quad: &DetectorQuad, k: u64) -> Result<QuadReport> {
    quad.validate()?;
    if quad.eta[D0] != quad.eta[D1] || quad.eta[DPLUS] != quad.eta[DMINUS] {
        return Err(Error::Precondition(
            "closed form requires eta_0 = eta_1 and eta_+ = eta_-".into(),
        ));
    }
    let (e0, ep) = (quad.eta[D0], quad.eta[DPLUS]);
    let s01 = (1.0 - quad.d[D0]) * (1.0 - quad.d[D1]);
    let spm = (1.0 - quad.d[DPLUS]) * (1.0 - quad.d[DMINUS]);
    let both = s01 * spm * powk(1.0 - 0.5 * (e0 + ep), k);
    Ok(QuadReport {
        p_report: [
            spm * powk(1.0 - 0.5 * ep, k) - both,
            s01 * powk(1.0 - 0.5 * e0, k) - both,
        ],
    })
}

/// RSDCII report probabilities for a product state with arbitrary
/// efficiencies: one arm silent, the other not.
pub fn rsdcii_report_probs_general(quad: &DetectorQuad, state: &QubitState, k: u64) -> QuadReport {
    let w = quad.routing(state);
    let x: [f64; 4] = std::array::from_fn(|i| w[i] * quad.eta[i]);
    let s01 = (1.0 - quad.d[D0]) * (1.0 - quad.d[D1]);
    let spm = (1.0 - quad.d[DPLUS]) * (1.0 - quad.d[DMINUS]);
    let both = s01 * spm * powk(1.0 - x.iter().sum::<f64>(), k);
    QuadReport {
        p_report: [
            spm * powk(1.0 - x[DPLUS] - x[DMINUS], k) - both,
            s01 * powk(1.0 - x[D0] - x[D1], k) - both,
        ],
    }
}

/// Attack II against RSDCII: Alice guesses the more likely basis.
/// `a_dark = (1−d_0)(1−d_1) = (1−d_+)(1−d_−)`.
pub fn attack2_setup2_guess(a_dark: f64, eta0: f64, etaplus: f64, k: u64) -> Result<f64> {
    check_range("a", a_dark, "(0, 1]", a_dark > 0.0 && a_dark <= 1.0)?;
    open_prob("eta0", eta0)?;
    open_prob("etaplus", etaplus)?;
    if eta0 == etaplus {
        return Err(Error::Precondition(
            "requires eta0 != etaplus; equal efficiencies leak nothing".into(),
        ));
    }
    if k == 0 {
        return Ok(0.5);
    }
    let (lo, hi) = if eta0 < etaplus {
        (eta0, etaplus)
    } else {
        (etaplus, eta0)
    };
    let base = 1.0 - 0.5 * lo;
    let r1 = powk((1.0 - 0.5 * hi) / base, k);
    let r2 = powk((1.0 - 0.5 * (eta0 + etaplus)) / base, k);
    let bias = (1.0 - r1) / (1.0 + r1 - 2.0 * a_dark * r2);
    Ok(0.5 * (1.0 + bias))
}

/// Cap `6δ` on the basis dependence of SLII for zero- and one-photon pulses.
pub fn slii_single_photon_gap(delta: f64, k: u64) -> Result<f64> {
    check_range("delta", delta, "[0, 1)", (0.0..1.0).contains(&delta))?;
    if k > 1 {
        return Err(Error::Precondition(format!(
            "cap holds only for k in {{0, 1}}, got k = {k}"
        )));
    }
    Ok(6.0 * delta)
}
