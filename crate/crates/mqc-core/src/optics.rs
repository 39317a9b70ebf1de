//! Qubit states, measurement bases and the exact detection model of a
//! two-detector (Setup I) receiver built from threshold detectors.
//!
//! Photons of a `k`-photon pulse are routed independently to `D_0` with
//! probability `q_β` and to `D_1` otherwise. A detector with efficiency `η`
//! and dark-count probability `d` that receives `k_i` photons stays silent
//! with probability `(1-d)(1-η)^{k_i}`.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, dark, open_prob, prob, Error, Result};

/// Tolerance for the normalization of an [`EventDistribution`].
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance for the normalization of a routing distribution.
pub const ROUTING_TOL: f64 = 1e-9;
/// Distance from `cos²a = 1` below which a basis pair is flagged near-degenerate.
pub const NEAR_DEGENERATE_TOL: f64 = 1e-6;

/// `x^k` with an exact-integer fast path.
#[inline]
pub(crate) fn powk(x: f64, k: u64) -> f64 {
    match i32::try_from(k) {
        Ok(k) => x.powi(k),
        Err(_) => x.powf(k as f64),
    }
}

/// Single-photon polarization state as a Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitState {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl QubitState {
    pub fn new(rx: f64, ry: f64, rz: f64) -> Result<Self> {
        let s = Self { rx, ry, rz };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.norm();
        if !n.is_finite() || n > 1.0 + 1e-12 {
            return Err(Error::NotAState(n));
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }

    /// |0⟩
    pub const fn zero() -> Self {
        Self {
            rx: 0.0,
            ry: 0.0,
            rz: 1.0,
        }
    }
    /// |1⟩
    pub const fn one() -> Self {
        Self {
            rx: 0.0,
            ry: 0.0,
            rz: -1.0,
        }
    }
    /// |+⟩
    pub const fn plus() -> Self {
        Self {
            rx: 1.0,
            ry: 0.0,
            rz: 0.0,
        }
    }
    /// |−⟩
    pub const fn minus() -> Self {
        Self {
            rx: -1.0,
            ry: 0.0,
            rz: 0.0,
        }
    }

    /// Pure state `c0|0⟩ + c1|1⟩` with real amplitudes (normalized here).
    pub fn from_real_amplitudes(c0: f64, c1: f64) -> Result<Self> {
        let n2 = c0 * c0 + c1 * c1;
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::Precondition("zero amplitude vector".into()));
        }
        Ok(Self {
            rx: 2.0 * c0 * c1 / n2,
            ry: 0.0,
            rz: (c0 * c0 - c1 * c1) / n2,
        })
    }

    /// Orthogonal state (antipodal Bloch vector).
    pub fn flipped(&self) -> Self {
        Self {
            rx: -self.rx,
            ry: -self.ry,
            rz: -self.rz,
        }
    }
}

/// Classification of a basis pair relative to the degenerate case `B_0 = B_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisStatus {
    Regular,
    NearDegenerate,
    Degenerate,
}

/// The pair of measurement bases. `B_0` is the computational basis; `B_1` has
/// `|ψ_01⟩ = cos a|0⟩ + sin a|1⟩` and `|ψ_11⟩ = sin a|0⟩ − cos a|1⟩`.
///
/// The pair is stored through `cos2a = cos²(a)`; `1/2` gives the
/// computational/Hadamard (BB84) pair and `1` makes both bases coincide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisPair {
    pub cos2a: f64,
}

impl BasisPair {
    pub fn new(cos2a: f64) -> Result<Self> {
        check_range("cos2a", cos2a, "(0, 1]", cos2a > 0.0 && cos2a <= 1.0)?;
        Ok(Self { cos2a })
    }

    pub const fn bb84() -> Self {
        Self { cos2a: 0.5 }
    }

    /// Pair whose second basis sits at angle `theta` from |+⟩ on the Bloch
    /// sphere (`theta = π/2 − 2a`).
    pub fn from_theta(theta: f64) -> Result<Self> {
        let a = std::f64::consts::FRAC_PI_4 - theta / 2.0;
        Self::new(a.cos().powi(2))
    }

    pub fn status(&self) -> BasisStatus {
        if self.cos2a == 1.0 {
            BasisStatus::Degenerate
        } else if 1.0 - self.cos2a < NEAR_DEGENERATE_TOL {
            BasisStatus::NearDegenerate
        } else {
            BasisStatus::Regular
        }
    }

    /// `sin(2a) = cos θ`
    pub fn sin_2a(&self) -> f64 {
        2.0 * (self.cos2a * (1.0 - self.cos2a)).max(0.0).sqrt()
    }

    /// `cos(2a) = sin θ`
    pub fn cos_2a(&self) -> f64 {
        2.0 * self.cos2a - 1.0
    }

    pub fn theta(&self) -> f64 {
        self.cos_2a().atan2(self.sin_2a())
    }

    /// Bloch vector of `|ψ_01⟩`.
    pub fn psi01(&self) -> QubitState {
        QubitState {
            rx: self.sin_2a(),
            ry: 0.0,
            rz: self.cos_2a(),
        }
    }

    /// Bloch vector of `|ψ_11⟩`.
    pub fn psi11(&self) -> QubitState {
        self.psi01().flipped()
    }
}

/// Efficiencies `eta[i][β]` and dark-count probabilities `d[i][β]` of the two
/// detectors, indexed by detector `i` and basis `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorPair {
    pub eta: [[f64; 2]; 2],
    pub d: [[f64; 2]; 2],
}

impl DetectorPair {
    pub fn new(eta: [[f64; 2]; 2], d: [[f64; 2]; 2]) -> Result<Self> {
        let s = Self { eta, d };
        s.validate()?;
        Ok(s)
    }

    /// Basis-independent detectors.
    pub fn symmetric(eta0: f64, eta1: f64, d0: f64, d1: f64) -> Result<Self> {
        Self::new([[eta0, eta0], [eta1, eta1]], [[d0, d0], [d1, d1]])
    }

    pub fn uniform(eta: f64, d: f64) -> Result<Self> {
        Self::symmetric(eta, eta, d, d)
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..2 {
            for b in 0..2 {
                open_prob("eta", self.eta[i][b])?;
                dark("d", self.d[i][b])?;
            }
        }
        Ok(())
    }

    pub fn eta_min(&self) -> f64 {
        self.eta
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn eta_max(&self) -> f64 {
        self.eta.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn d_max(&self) -> f64 {
        self.d.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// Photon-number content of a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseSpec {
    FixedK { k: u64 },
    Coherent { mu: f64 },
}

impl PulseSpec {
    pub fn coherent(mu: f64) -> Result<Self> {
        check_range("mu", mu, "(0, inf)", mu > 0.0)?;
        Ok(Self::Coherent { mu })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::FixedK { .. } => Ok(()),
            Self::Coherent { mu } => Self::coherent(mu).map(|_| ()),
        }
    }
}

/// Probabilities of the four detection events `(c0, c1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventDistribution {
    pub p: [[f64; 2]; 2],
}

impl EventDistribution {
    pub fn new(p: [[f64; 2]; 2]) -> Result<Self> {
        for row in &p {
            for &x in row {
                prob("p", x)?;
            }
        }
        let e = Self { p };
        let s = e.total();
        if (s - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(s));
        }
        Ok(e)
    }

    pub fn uniform() -> Self {
        Self { p: [[0.25; 2]; 2] }
    }

    #[inline]
    pub fn get(&self, c0: usize, c1: usize) -> f64 {
        self.p[c0][c1]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    /// Build from the silence probabilities: both silent, `D_0` silent, `D_1` silent.
    fn from_silence(p00: f64, d0_silent: f64, d1_silent: f64) -> Self {
        let p01 = (d0_silent - p00).max(0.0);
        let p10 = (d1_silent - p00).max(0.0);
        let p11 = (1.0 - d0_silent - d1_silent + p00).max(0.0);
        Self {
            p: [[p00, p01], [p10, p11]],
        }
    }
}

/// Born-rule probability that a photon in `state` is routed to `D_0` when
/// measured in basis `B_β`.
pub fn overlap_q(state: &QubitState, bases: &BasisPair, beta: usize) -> f64 {
    assert!(beta < 2, "basis index must be 0 or 1");
    let q = if beta == 0 {
        0.5 * (1.0 + state.rz)
    } else {
        0.5 * (1.0 + state.rx * bases.sin_2a() + state.rz * bases.cos_2a())
    };
    q.clamp(0.0, 1.0)
}

#[inline]
fn rates(det: &DetectorPair, q: f64, beta: usize) -> (f64, f64, f64, f64, f64, f64) {
    let (e0, e1) = (det.eta[0][beta], det.eta[1][beta]);
    let (d0, d1) = (det.d[0][beta], det.d[1][beta]);
    let x0 = q * e0; // per-photon detection probability at D_0
    let x1 = (1.0 - q) * e1;
    (x0, x1, 1.0 - d0, 1.0 - d1, e0, e1)
}

/// Exact event distribution for a pulse of exactly `k` photons, each with
/// routing probability `q_beta` to `D_0`.
pub fn det_probs_fixed_k(
    det: &DetectorPair,
    q_beta: f64,
    beta: usize,
    k: u64,
) -> EventDistribution {
    assert!(beta < 2, "basis index must be 0 or 1");
    let (x0, x1, s0, s1, _, _) = rates(det, q_beta, beta);
    let all = powk(1.0 - x0 - x1, k);
    let p00 = s0 * s1 * all;
    EventDistribution::from_silence(p00, s0 * powk(1.0 - x0, k), s1 * powk(1.0 - x1, k))
}

/// Event distribution for a Poisson source of mean photon number `mu`.
///
/// `mu = 0` is accepted as the vacuum limit.
pub fn det_probs_coherent(
    det: &DetectorPair,
    q_beta: f64,
    beta: usize,
    mu: f64,
) -> Result<EventDistribution> {
    assert!(beta < 2, "basis index must be 0 or 1");
    check_range("mu", mu, "[0, inf)", mu >= 0.0)?;
    let (x0, x1, s0, s1, _, _) = rates(det, q_beta, beta);
    // Σ_k e^{-μ} μ^k/k! · x^k = e^{-μ(1-x)}
    let p00 = s0 * s1 * (-mu * (x0 + x1)).exp();
    Ok(EventDistribution::from_silence(
        p00,
        s0 * (-mu * x0).exp(),
        s1 * (-mu * x1).exp(),
    ))
}

/// Dispatch on the pulse kind.
pub fn det_probs(
    det: &DetectorPair,
    q_beta: f64,
    beta: usize,
    pulse: &PulseSpec,
) -> Result<EventDistribution> {
    match *pulse {
        PulseSpec::FixedK { k } => Ok(det_probs_fixed_k(det, q_beta, beta, k)),
        PulseSpec::Coherent { mu } => det_probs_coherent(det, q_beta, beta, mu),
    }
}

/// Routing distribution `P(k_0)` of a product state: `Binomial(k, q)`.
pub fn binomial_routing(k: u64, q: f64) -> Vec<f64> {
    let n = k as usize;
    let mut out = vec![0.0; n + 1];
    // log-space binomial coefficients keep large k finite
    let lq = q.ln();
    let lp = (1.0 - q).ln();
    let mut lc = 0.0f64;
    for (k0, slot) in out.iter_mut().enumerate() {
        if k0 > 0 {
            lc += ((n - k0 + 1) as f64).ln() - (k0 as f64).ln();
        }
        let a = if k0 == 0 { 0.0 } else { k0 as f64 * lq };
        let b = if k0 == n { 0.0 } else { (n - k0) as f64 * lp };
        *slot = (lc + a + b).exp();
    }
    out
}

/// No-click probability `P_det(0,0|β,ρ,k)` for an arbitrary `k`-photon state
/// given only through its routing distribution `routing[k0] = P(k0)`, the
/// probability that `k0` of the `k = routing.len() - 1` photons reach `D_0`.
pub fn no_click_prob_general(det: &DetectorPair, routing: &[f64], beta: usize) -> Result<f64> {
    assert!(beta < 2, "basis index must be 0 or 1");
    if routing.is_empty() {
        return Err(Error::Precondition("empty routing distribution".into()));
    }
    let mut total = 0.0;
    for &p in routing {
        prob("routing", p)?;
        total += p;
    }
    if (total - 1.0).abs() > ROUTING_TOL {
        return Err(Error::NotNormalized(total));
    }
    let k = (routing.len() - 1) as u64;
    let (a0, a1) = (1.0 - det.eta[0][beta], 1.0 - det.eta[1][beta]);
    let sum: f64 = routing
        .iter()
        .enumerate()
        .map(|(k0, &p)| p * powk(a0, k0 as u64) * powk(a1, k - k0 as u64))
        .sum();
    Ok((1.0 - det.d[0][beta]) * (1.0 - det.d[1][beta]) * sum)
}

/// Report probability for a receiver with `darks.len()` detectors of equal
/// efficiency `eta` that reports whenever at least one detector clicks.
pub fn qudit_report_prob(eta: f64, darks: &[f64], k: u64) -> Result<f64> {
    prob("eta", eta)?;
    let mut silent = powk(1.0 - eta, k);
    for &d in darks {
        silent *= 1.0 - dark("dark", d)?;
    }
    Ok(1.0 - silent)
}
