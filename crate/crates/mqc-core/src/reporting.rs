//! Probabilistic reporting strategies `S[c0][c1][β]`: Bob announces a
//! successful measurement (`m = 1`) with probability `S` after observing
//! detection event `(c0, c1)` in basis `β`.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, prob, Error, Result};
use crate::optics::{DetectorPair, EventDistribution};

/// Report-probability table indexed `[c0][c1][β]`.
///
/// Serializes as `{"S": [[[S000, S001], [S010, S011]], [[S100, S101], [S110, S111]]]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportingStrategy {
    #[serde(rename = "S")]
    pub s: [[[f64; 2]; 2]; 2],
}

impl ReportingStrategy {
    pub fn new(s: [[[f64; 2]; 2]; 2]) -> Result<Self> {
        let r = Self { s };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        for x in self.s.iter().flatten().flatten() {
            prob("S", *x)?;
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, c0: usize, c1: usize, beta: usize) -> f64 {
        self.s[c0][c1][beta]
    }

    /// Report single clicks only.
    pub fn strategy_i() -> Self {
        Self::from_fn(|c0, c1, _| if c0 != c1 { 1.0 } else { 0.0 })
    }

    /// Report whenever at least one detector clicks.
    pub fn strategy_ii() -> Self {
        Self::from_fn(|c0, c1, _| if c0 + c1 > 0 { 1.0 } else { 0.0 })
    }

    /// Single clicks weighted by `η_min / η_{iβ}` of the clicking detector,
    /// double clicks reported with probability `s11[β]`.
    pub fn strategy_iii(det: &DetectorPair, s11_0: f64, s11_1: f64) -> Result<Self> {
        det.validate()?;
        let s11 = [prob("s11_0", s11_0)?, prob("s11_1", s11_1)?];
        let m = det.eta_min();
        Ok(Self::from_fn(|c0, c1, b| match (c0, c1) {
            (0, 0) => 0.0,
            (0, 1) => m / det.eta[1][b],
            (1, 0) => m / det.eta[0][b],
            _ => s11[b],
        }))
    }

    /// Report every event with the same probability `s ∈ (0, 1]`.
    pub fn trivial(s: f64) -> Result<Self> {
        check_range("S", s, "(0, 1]", s > 0.0 && s <= 1.0)?;
        Ok(Self::from_fn(|_, _, _| s))
    }

    /// Symmetrization of losses from observed single-click frequencies.
    /// `freqs[i][β]` is the frequency with which only detector `D_i` clicks in
    /// basis `β`. Each single click is reported with probability
    /// `F_min / F`; no-click and double-click events are never reported.
    pub fn symmetrized(freqs: [[f64; 2]; 2]) -> Result<Self> {
        for f in freqs.iter().flatten() {
            check_range("frequency", *f, "(0, 1]", *f > 0.0 && *f <= 1.0)?;
        }
        let fmin = freqs
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min);
        Ok(Self::from_fn(|c0, c1, b| match (c0, c1) {
            (1, 0) => fmin / freqs[0][b],
            (0, 1) => fmin / freqs[1][b],
            _ => 0.0,
        }))
    }

    fn from_fn(f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut s = [[[0.0; 2]; 2]; 2];
        for (c0, a) in s.iter_mut().enumerate() {
            for (c1, b) in a.iter_mut().enumerate() {
                for (beta, x) in b.iter_mut().enumerate() {
                    *x = f(c0, c1, beta);
                }
            }
        }
        Self { s }
    }
}

/// `P_report(1|β) = Σ S[c0][c1][β] · p(c0, c1)`.
pub fn report_prob(strategy: &ReportingStrategy, events: &EventDistribution, beta: usize) -> f64 {
    assert!(beta < 2, "basis index must be 0 or 1");
    let mut acc = 0.0;
    for c0 in 0..2 {
        for c1 in 0..2 {
            acc += strategy.get(c0, c1, beta) * events.get(c0, c1);
        }
    }
    acc.clamp(0.0, 1.0)
}

/// Cap on `|ΔP_report|` for strategy III with pulses of zero or one photon.
pub fn lemma1_bound(delta: f64, s11_max: f64, k: u64) -> Result<f64> {
    check_range("delta", delta, "[0, 1)", (0.0..1.0).contains(&delta))?;
    prob("s11_max", s11_max)?;
    match k {
        0 => Ok(2.0 * delta),
        1 => Ok(6.0 * delta + 2.0 * delta * delta + s11_max * (5.0 * delta + delta * delta)),
        _ => Err(Error::Precondition(format!(
            "single-photon cap holds only for k in {{0, 1}}, got k = {k}"
        ))),
    }
}

/// Inputs of [`trivial_feasibility`]; all rates lie in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityInputs {
    /// `(δ_00, δ_11)` of the first class of protocols.
    pub delta_cc_i: (f64, f64),
    pub delta_err_equal: f64,
    pub delta_err_diff: f64,
    pub delta_error: f64,
    pub delta_00_ii: f64,
    pub delta_det: f64,
}

/// Outcome of [`trivial_feasibility`] together with both sides of every
/// inequality involved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub first_class_ok: bool,
    pub first_class_lhs: f64,
    pub first_class_rhs: f64,
    pub second_class_forces_nontrivial: bool,
    /// `δ_det` against `δ_00 / (5(1 − δ_00))`
    pub det_lhs: f64,
    pub det_rhs: f64,
    /// `δ_error` against `1/12 − δ_err_equal / 6`
    pub error_lhs: f64,
    pub error_rhs: f64,
}

/// Whether the trivial strategy with `S = 1` keeps the error rate acceptable
/// (first class), and whether the second-class conditions force any correct
/// strategy to be non-trivial.
pub fn trivial_feasibility(inp: &FeasibilityInputs) -> Result<FeasibilityVerdict> {
    for (name, v) in [
        ("delta_00_I", inp.delta_cc_i.0),
        ("delta_11_I", inp.delta_cc_i.1),
        ("delta_err_equal", inp.delta_err_equal),
        ("delta_err_diff", inp.delta_err_diff),
        ("delta_error", inp.delta_error),
        ("delta_00_II", inp.delta_00_ii),
        ("delta_det", inp.delta_det),
    ] {
        check_range(name, v, "[0, 1)", (0.0..1.0).contains(&v))?;
    }
    let first_class_lhs =
        (inp.delta_cc_i.0 + inp.delta_cc_i.1) * (0.5 + inp.delta_err_equal) + inp.delta_err_diff;
    let det_rhs = inp.delta_00_ii / (5.0 * (1.0 - inp.delta_00_ii));
    let error_rhs = 1.0 / 12.0 - inp.delta_err_equal / 6.0;
    Ok(FeasibilityVerdict {
        first_class_ok: first_class_lhs <= inp.delta_error,
        first_class_lhs,
        first_class_rhs: inp.delta_error,
        second_class_forces_nontrivial: inp.delta_det > det_rhs && inp.delta_error < error_rhs,
        det_lhs: inp.delta_det,
        det_rhs,
        error_lhs: inp.delta_error,
        error_rhs,
    })
}
