//! Closed-form caps on how much Bob's report probability can depend on his
//! basis, and their composition over many pulses.
//!
//! The maximizers `B_exp` involve ratios of logarithms that cancel badly when
//! the efficiency gap is tiny, so they are evaluated through `ln_1p`.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, prob, Error, Result};

/// Envelope `0 < η_low ≤ η_{iβ} ≤ η_up < 1` and dark-count cap `d_{iβ} ≤ δ < 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyEnvelope {
    pub eta_low: f64,
    pub eta_up: f64,
    pub delta: f64,
}

impl EfficiencyEnvelope {
    pub fn new(eta_low: f64, eta_up: f64, delta: f64) -> Result<Self> {
        check_range(
            "eta_low",
            eta_low,
            "(0, eta_up]",
            eta_low > 0.0 && eta_low <= eta_up,
        )?;
        check_range("eta_up", eta_up, "[eta_low, 1)", eta_up < 1.0)?;
        check_range("delta", delta, "[0, 1/2)", (0.0..0.5).contains(&delta))?;
        Ok(Self {
            eta_low,
            eta_up,
            delta,
        })
    }

    /// `η ± δ_eff`
    pub fn centered(eta: f64, delta_eff: f64, delta: f64) -> Result<Self> {
        Self::new(eta - delta_eff, eta + delta_eff, delta)
    }
}

/// Stationary point and value of a two-exponential bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundDetail {
    /// Real photon number maximizing the deviation, clamped at 0.
    pub b_exp: f64,
    pub b_det: f64,
    /// `max(2δ, b_det)`
    pub bound: f64,
}

/// `ln(1 - η)` and `ln((1 - η_lo)/(1 - η_hi))` (positive), computed stably.
fn logs(eta_lo: f64, eta_hi: f64) -> (f64, f64, f64) {
    let l_lo = (-eta_lo).ln_1p();
    let l_hi = (-eta_hi).ln_1p();
    let gap = ((eta_hi - eta_lo) / (1.0 - eta_hi)).ln_1p();
    (l_lo, l_hi, gap)
}

/// Guessing-probability cap for a single pulse.
pub fn guess_bound_single(eps_basis: f64, delta_report: f64) -> Result<f64> {
    check_range("eps_basis", eps_basis, "[0, inf)", eps_basis >= 0.0)?;
    prob("delta_report", delta_report)?;
    Ok((0.5 + eps_basis) * (1.0 + delta_report))
}

/// Cap on `|ΔP_report|` for strategy II within `env`.
pub fn bound_b_ii(env: &EfficiencyEnvelope) -> f64 {
    bound_b_ii_detail(env).bound
}

pub fn bound_b_ii_detail(env: &EfficiencyEnvelope) -> BoundDetail {
    let two_delta = 2.0 * env.delta;
    if env.eta_low == env.eta_up {
        return BoundDetail {
            b_exp: 0.0,
            b_det: two_delta,
            bound: two_delta,
        };
    }
    let (l_low, l_up, gap) = logs(env.eta_low, env.eta_up);
    // ln((1-2δ) L_up/L_low) with L_up/L_low = 1 + gap/|L_low|
    let num = (-two_delta).ln_1p() + (gap / -l_low).ln_1p();
    let b_exp = num / gap;
    let b_det = if b_exp >= 0.0 {
        (1.0 - two_delta) * (gap / -l_low) * (b_exp * l_up).exp()
    } else {
        // deviation decreases on k ≥ 0; its supremum is the k = 0 value
        two_delta
    };
    BoundDetail {
        b_exp: b_exp.max(0.0),
        b_det,
        bound: b_det.max(two_delta),
    }
}

/// Cap on `|ΔP_report|` for strategy III with `η_min/η_max ≤ S_11β ≤ 1`.
pub fn bound_b_iii(eta_min: f64, eta_max: f64, delta: f64) -> Result<f64> {
    Ok(bound_b_iii_detail(eta_min, eta_max, delta)?.bound)
}

pub fn bound_b_iii_detail(eta_min: f64, eta_max: f64, delta: f64) -> Result<BoundDetail> {
    let env = EfficiencyEnvelope::new(eta_min, eta_max, delta)?;
    let two_delta = 2.0 * env.delta;
    if eta_min == eta_max {
        return Ok(BoundDetail {
            b_exp: 0.0,
            b_det: two_delta,
            bound: two_delta,
        });
    }
    let r = eta_min / eta_max;
    let (l_min, l_max, gap) = logs(eta_min, eta_max);
    // ln((1-2δ) η_max L_max / (η_min L_min))
    let num = (-two_delta).ln_1p() - r.ln() + (gap / -l_min).ln_1p();
    let b_exp = num / gap;
    let b_det = if b_exp >= 0.0 {
        1.0 - r + (1.0 - two_delta) * (gap / -l_min) * (b_exp * l_max).exp()
    } else {
        two_delta
    };
    Ok(BoundDetail {
        b_exp: b_exp.max(0.0),
        b_det,
        bound: b_det.max(two_delta),
    })
}

/// One row of a `(η, δ_eff)` sweep with envelope `η ± δ_eff`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSweepRow {
    pub eta: f64,
    pub delta_eff: f64,
    pub b_ii: f64,
    pub b_iii: f64,
}

/// `B_II` and `B_III` over the grid `etas × delta_effs`, in grid order.
pub fn bound_sweep(etas: &[f64], delta_effs: &[f64], delta: f64) -> Result<Vec<BoundSweepRow>> {
    let mut rows = Vec::with_capacity(etas.len() * delta_effs.len());
    for &eta in etas {
        for &de in delta_effs {
            let env = EfficiencyEnvelope::centered(eta, de, delta)?;
            rows.push(BoundSweepRow {
                eta,
                delta_eff: de,
                b_ii: bound_b_ii(&env),
                b_iii: bound_b_iii(env.eta_low, env.eta_up, delta)?,
            });
        }
    }
    Ok(rows)
}

/// A guessing-probability bound that may exceed 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComposedBound {
    pub raw: f64,
    pub vacuous: bool,
}

impl ComposedBound {
    fn from_raw(raw: f64) -> Self {
        Self {
            raw,
            vacuous: raw >= 1.0,
        }
    }

    pub fn clamped(&self) -> f64 {
        self.raw.min(1.0)
    }
}

/// `1/2 + (1/2) Σ B_i` over the pulses of a protocol run.
pub fn multi_pulse_bound(per_pulse: &[f64]) -> Result<ComposedBound> {
    let mut s = 0.0;
    for &b in per_pulse {
        s += prob("B_i", b)?;
    }
    Ok(ComposedBound::from_raw(0.5 + 0.5 * s))
}

/// Same as [`multi_pulse_bound`] for `n` identical pulses.
pub fn multi_pulse_bound_uniform(n: f64, b: f64) -> Result<ComposedBound> {
    check_range("N", n, "[0, inf)", n >= 0.0)?;
    prob("B", b)?;
    Ok(ComposedBound::from_raw(0.5 + 0.5 * n * b))
}

/// Inputs of [`mixed_pulse_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedPulseInputs {
    pub n: f64,
    pub eps: f64,
    pub delta_empty: f64,
    pub delta_mult: f64,
    /// cap for empty pulses
    pub b0: f64,
    /// cap for single-photon pulses
    pub b1: f64,
    /// cap for multiphoton pulses
    pub b_mult: f64,
}

/// Bound for a run in which, except with probability `eps`, at least a
/// fraction `1 − δ_empty` of pulses are empty and at most `δ_mult` carry
/// more than one photon.
pub fn mixed_pulse_bound(inp: &MixedPulseInputs) -> Result<ComposedBound> {
    check_range("N", inp.n, "[0, inf)", inp.n >= 0.0)?;
    prob("eps", inp.eps)?;
    prob("delta_empty", inp.delta_empty)?;
    prob("delta_mult", inp.delta_mult)?;
    if inp.delta_mult > inp.delta_empty {
        return Err(Error::Precondition(format!(
            "requires 0 <= delta_mult <= delta_empty <= 1, got delta_mult = {} > delta_empty = {}",
            inp.delta_mult, inp.delta_empty
        )));
    }
    for (name, b) in [("b0", inp.b0), ("b1", inp.b1), ("b_mult", inp.b_mult)] {
        check_range(name, b, "[0, inf)", b >= 0.0)?;
    }
    let mix = (1.0 - inp.delta_empty) * inp.b0
        + (inp.delta_empty - inp.delta_mult) * inp.b1
        + inp.delta_mult * inp.b_mult;
    Ok(ComposedBound::from_raw(
        inp.eps + (1.0 - inp.eps) * (0.5 + 0.5 * inp.n * mix),
    ))
}
