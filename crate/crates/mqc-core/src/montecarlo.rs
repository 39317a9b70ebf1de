//! Photon-level Monte Carlo: an independent oracle for the closed forms and
//! a protocol harness for empirical attack validation.
//!
//! Reproducibility: worker `w` draws from ChaCha20 seeded with
//! `seed_from_u64(seed)` on stream `w` (see [`worker_rng`]). Item `j` (pulse
//! or run) is handled by worker `j mod workers`, in increasing `j`. Results
//! are therefore bit-identical for a fixed `(seed, workers)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attacks::DoublePhotonParams;
use crate::error::{check_range, open_prob, Error, Result};
use crate::optics::{overlap_q, BasisPair, DetectorPair, PulseSpec, QubitState};
use crate::reporting::ReportingStrategy;
use crate::setup_two::DetectorQuad;

/// Environment variable consulted for the default seed.
pub const SEED_ENV: &str = "MQC_SEED";
pub const DEFAULT_SEED: u64 = 0x6d71_6321;

/// Seed from `MQC_SEED`, falling back to [`DEFAULT_SEED`].
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Independent stream for `worker`.
pub fn worker_rng(seed: u64, worker: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(worker);
    rng
}

/// Frequency estimate with standard error `sqrt(p(1-p)/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n: u64,
}

impl Estimate {
    pub fn from_counts(hits: u64, n: u64) -> Self {
        let value = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
        Self {
            value,
            stderr: (value * (1.0 - value) / n.max(1) as f64).sqrt(),
            n,
        }
    }

    /// Whether `truth` lies within `k` standard errors. A zero standard error
    /// (all-or-nothing outcomes) falls back to one count of resolution.
    pub fn within(&self, truth: f64, k: f64) -> bool {
        let se = self.stderr.max(1.0 / self.n.max(1) as f64);
        (self.value - truth).abs() <= k * se
    }
}

fn check_workers(items: u64, workers: usize) -> Result<()> {
    if items == 0 {
        return Err(Error::Precondition("need at least one pulse or run".into()));
    }
    if workers == 0 {
        return Err(Error::Precondition("need at least one worker".into()));
    }
    Ok(())
}

/// Run `f(rng, j)` for every `j < items`, partitioned across workers, and
/// return each worker's results in item order together with the item index.
fn par_items<T, F>(seed: u64, items: u64, workers: usize, f: F) -> Vec<Vec<(u64, T)>>
where
    T: Send,
    F: Fn(&mut ChaCha20Rng, u64) -> T + Sync,
{
    let w = workers as u64;
    (0..w)
        .into_par_iter()
        .map(|wi| {
            let mut rng = worker_rng(seed, wi);
            (wi..items)
                .step_by(workers)
                .map(|j| (j, f(&mut rng, j)))
                .collect()
        })
        .collect()
}

/// Draw the photon number of a pulse.
pub fn sample_photon_count<R: Rng + ?Sized>(rng: &mut R, pulse: &PulseSpec) -> u64 {
    match *pulse {
        PulseSpec::FixedK { k } => k,
        PulseSpec::Coherent { mu } => {
            if mu <= 0.0 {
                0
            } else {
                Poisson::new(mu).expect("mu > 0").sample(rng) as u64
            }
        }
    }
}

fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p).expect("valid binomial").sample(rng)
    }
}

/// A threshold detector hit by `n` photons.
#[inline]
fn clicks<R: Rng + ?Sized>(rng: &mut R, n: u64, eta: f64, d: f64) -> bool {
    // silent iff no dark count and none of the n photons is detected
    let silent = (1.0 - d) * crate::optics::powk(1.0 - eta, n);
    rng.random::<f64>() >= silent
}

/// Sample the detection event `(c0, c1)` of a `k`-photon product pulse.
pub fn sample_event<R: Rng + ?Sized>(
    rng: &mut R,
    det: &DetectorPair,
    q_beta: f64,
    beta: usize,
    k: u64,
) -> (usize, usize) {
    let k0 = binomial(rng, k, q_beta);
    let c0 = clicks(rng, k0, det.eta[0][beta], det.d[0][beta]);
    let c1 = clicks(rng, k - k0, det.eta[1][beta], det.d[1][beta]);
    (c0 as usize, c1 as usize)
}

/// One source/state/basis setting for [`estimate_event_probs`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub det: DetectorPair,
    pub source: PulseSpec,
    pub state: QubitState,
    pub bases: BasisPair,
    pub beta: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub pulses: u64,
    pub workers: usize,
    pub scenario: Scenario,
}

/// Empirical event frequencies `[c0][c1]`.
pub fn estimate_event_probs(cfg: &SimConfig) -> Result<[[Estimate; 2]; 2]> {
    check_workers(cfg.pulses, cfg.workers)?;
    let sc = &cfg.scenario;
    sc.det.validate()?;
    sc.state.validate()?;
    if sc.beta > 1 {
        return Err(Error::Precondition("beta must be 0 or 1".into()));
    }
    let q = overlap_q(&sc.state, &sc.bases, sc.beta);
    let parts = par_items(cfg.seed, cfg.pulses, cfg.workers, |rng, _| {
        let k = sample_photon_count(rng, &sc.source);
        sample_event(rng, &sc.det, q, sc.beta, k)
    });
    let mut counts = [[0u64; 2]; 2];
    for (_, (c0, c1)) in parts.iter().flatten() {
        counts[*c0][*c1] += 1;
    }
    Ok(counts.map(|row| row.map(|c| Estimate::from_counts(c, cfg.pulses))))
}

/// How Bob picks his basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisPolicy {
    Random,
    Fixed(usize),
}

/// One pulse of Alice's schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledPulse {
    pub pulse: PulseSpec,
    pub state: QubitState,
    #[serde(default)]
    pub dishonest: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub seed: u64,
    pub workers: usize,
    pub det: DetectorPair,
    pub bases: BasisPair,
    pub strategy: ReportingStrategy,
    pub basis_policy: BasisPolicy,
    pub schedule: Vec<ScheduledPulse>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseRecord {
    pub index: u64,
    pub k: u64,
    pub state: QubitState,
    pub dishonest: bool,
    pub beta: usize,
    pub c0: usize,
    pub c1: usize,
    pub m: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranscriptSummary {
    pub pulses: u64,
    pub pulses_per_basis: [u64; 2],
    pub m1_per_basis: [u64; 2],
    pub m1_fraction: f64,
    /// Frequency with which "β = 0 iff m = 1" is right (attack-I guess).
    pub attack1_guess_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub records: Vec<PulseRecord>,
    pub summary: TranscriptSummary,
}

impl Transcript {
    pub fn attack1_guess(&self) -> Estimate {
        let hits = self.records.iter().filter(|r| r.m == (r.beta == 0)).count() as u64;
        Estimate::from_counts(hits, self.records.len() as u64)
    }
}

/// Simulate Alice's schedule against Bob's strategy, pulse by pulse.
pub fn run_protocol(cfg: &ProtocolConfig) -> Result<Transcript> {
    let n = cfg.schedule.len() as u64;
    check_workers(n, cfg.workers)?;
    cfg.det.validate()?;
    cfg.strategy.validate()?;
    if let BasisPolicy::Fixed(b) = cfg.basis_policy {
        if b > 1 {
            return Err(Error::Precondition("fixed basis must be 0 or 1".into()));
        }
    }
    for p in &cfg.schedule {
        p.state.validate()?;
        p.pulse.validate()?;
    }
    let parts = par_items(cfg.seed, n, cfg.workers, |rng, j| {
        let sp = &cfg.schedule[j as usize];
        let beta = match cfg.basis_policy {
            BasisPolicy::Random => rng.random_range(0..2usize),
            BasisPolicy::Fixed(b) => b,
        };
        let k = sample_photon_count(rng, &sp.pulse);
        let q = overlap_q(&sp.state, &cfg.bases, beta);
        let (c0, c1) = sample_event(rng, &cfg.det, q, beta, k);
        let m = rng.random::<f64>() < cfg.strategy.get(c0, c1, beta);
        PulseRecord {
            index: j,
            k,
            state: sp.state,
            dishonest: sp.dishonest,
            beta,
            c0,
            c1,
            m,
        }
    });
    let mut records: Vec<PulseRecord> = Vec::with_capacity(n as usize);
    // round-robin interleave restores pulse order
    let mut iters: Vec<_> = parts.into_iter().map(|v| v.into_iter()).collect();
    'outer: loop {
        for it in iters.iter_mut() {
            match it.next() {
                Some((_, r)) => records.push(r),
                None => break 'outer,
            }
        }
    }
    debug_assert!(records.iter().enumerate().all(|(i, r)| r.index == i as u64));
    let mut per_basis = [0u64; 2];
    let mut m1 = [0u64; 2];
    for r in &records {
        per_basis[r.beta] += 1;
        m1[r.beta] += r.m as u64;
    }
    let mut t = Transcript {
        records,
        summary: TranscriptSummary {
            pulses: n,
            pulses_per_basis: per_basis,
            m1_per_basis: m1,
            m1_fraction: (m1[0] + m1[1]) as f64 / n as f64,
            attack1_guess_rate: 0.0,
        },
    };
    t.summary.attack1_guess_rate = t.attack1_guess().value;
    Ok(t)
}

/// `n` copies of one pulse.
pub fn uniform_schedule(
    n: usize,
    pulse: PulseSpec,
    state: QubitState,
    dishonest: bool,
) -> Vec<ScheduledPulse> {
    vec![
        ScheduledPulse {
            pulse,
            state,
            dishonest
        };
        n
    ]
}

/// Sample which of `(D_0, D_1, D_+, D_−)` click for `state^{⊗k}`.
pub fn sample_event_quad<R: Rng + ?Sized>(
    rng: &mut R,
    quad: &DetectorQuad,
    state: &QubitState,
    k: u64,
) -> [bool; 4] {
    let w = quad.routing(state);
    let q0 = w[0] * 2.0;
    let qp = w[2] * 2.0;
    let n01 = binomial(rng, k, 0.5);
    let n0 = binomial(rng, n01, q0);
    let np = binomial(rng, k - n01, qp);
    let n = [n0, n01 - n0, np, k - n01 - np];
    std::array::from_fn(|i| clicks(rng, n[i], quad.eta[i], quad.d[i]))
}

/// Setup-II frequencies for a fixed product pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadEstimates {
    /// Exactly detector `i` clicks.
    pub single: [Estimate; 4],
    /// One arm silent and the other not, assigned basis `β`.
    pub rsdcii: [Estimate; 2],
}

pub fn estimate_quad_probs(
    seed: u64,
    pulses: u64,
    workers: usize,
    quad: &DetectorQuad,
    state: &QubitState,
    k: u64,
) -> Result<QuadEstimates> {
    check_workers(pulses, workers)?;
    quad.validate()?;
    state.validate()?;
    let parts = par_items(seed, pulses, workers, |rng, _| {
        sample_event_quad(rng, quad, state, k)
    });
    let mut single = [0u64; 4];
    let mut arm = [0u64; 2];
    for (_, c) in parts.iter().flatten() {
        let n = c.iter().filter(|&&x| x).count();
        if n == 1 {
            single[c.iter().position(|&x| x).unwrap()] += 1;
        }
        let a01 = c[0] || c[1];
        let apm = c[2] || c[3];
        if a01 && !apm {
            arm[0] += 1;
        } else if apm && !a01 {
            arm[1] += 1;
        }
    }
    Ok(QuadEstimates {
        single: single.map(|h| Estimate::from_counts(h, pulses)),
        rsdcii: arm.map(|h| Estimate::from_counts(h, pulses)),
    })
}

/// Empirical success of the Chernoff-bound attack: per run, Bob's basis is
/// random, the reported count `Z` is drawn exactly, and Alice guesses
/// `β = 0` iff `Z < G_N`.
pub fn attack2_empirical(
    seed: u64,
    runs: u64,
    workers: usize,
    n: u64,
    a: f64,
    p_attack: [f64; 2],
    p_protocol: [f64; 2],
) -> Result<Estimate> {
    check_workers(runs, workers)?;
    let out = crate::attacks::attack2_chernoff(n as f64, a, p_attack, p_protocol)?;
    let g_n = out.intermediates["G_N"];
    let n_att = (a * n as f64).round() as u64;
    let parts = par_items(seed, runs, workers, |rng, _| {
        let beta = rng.random_range(0..2usize);
        let z = binomial(rng, n_att, p_attack[beta]) + binomial(rng, n - n_att, p_protocol[beta]);
        let guess = if (z as f64) < g_n { 0 } else { 1 };
        guess == beta
    });
    let hits = parts.iter().flatten().filter(|(_, ok)| *ok).count() as u64;
    Ok(Estimate::from_counts(hits, runs))
}

/// Empirical failure rate of the double-photon attack. Per run, Bob's basis
/// is random and `N_0^{rep,β} ~ Binomial(N, e^{-μ}μ² P_β(1)/8)`; Alice fails
/// if she reads `β = 1` as `N ≤ G` wrongly or vice versa.
pub fn double_photon_failure_rate(
    seed: u64,
    runs: u64,
    workers: usize,
    p: &DoublePhotonParams,
) -> Result<Estimate> {
    check_workers(runs, workers)?;
    let out = crate::attacks::double_photon_attack(p)?;
    let g = out.intermediates["G"];
    let w = (-p.mu).exp() * p.mu * p.mu / 8.0;
    let probs = [w * out.intermediates["P0"], w * out.intermediates["P1"]];
    let n = p.n.round() as u64;
    let parts = par_items(seed, runs, workers, |rng, _| {
        let beta = rng.random_range(0..2usize);
        let count = binomial(rng, n, probs[beta]) as f64;
        let guess = if count <= g { 1 } else { 0 };
        guess != beta
    });
    let fails = parts.iter().flatten().filter(|(_, f)| *f).count() as u64;
    Ok(Estimate::from_counts(fails, runs))
}

/// Bob's handling of double clicks in the coin-flip harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoubleClickPolicy {
    Discard,
    RandomOutcome,
}

/// Pulse-level harness for the coin-flip attack. Alice sends `m_dishonest`
/// pulses of `k` photons, each in a random state `|Φ_{α,γ}⟩` with
/// `|Φ_{α,0}⟩ = √y|0⟩ + (−1)^α √(1−y)|1⟩` and
/// `|Φ_{α,1}⟩ = √(1−y)|0⟩ − (−1)^α √y|1⟩`, followed by empty pulses up to
/// `n_pulses`. Bob validates a single click at `D_0` with probability
/// `s_min` and at `D_1` always.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinFlipConfig {
    pub seed: u64,
    pub runs: u64,
    pub workers: usize,
    pub m_dishonest: u32,
    pub n_pulses: u32,
    pub k: u64,
    pub y: f64,
    pub det: DetectorPair,
    pub s_min: f64,
    pub double_click: DoubleClickPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoinFlipTally {
    pub runs: u64,
    /// Bob accepts and the coin equals Alice's target.
    pub success: u64,
    pub abort: u64,
    pub no_outcome: u64,
}

impl CoinFlipTally {
    pub fn success_rate(&self) -> Estimate {
        Estimate::from_counts(self.success, self.runs)
    }
    pub fn abort_rate(&self) -> Estimate {
        Estimate::from_counts(self.abort, self.runs)
    }
}

#[derive(Clone, Copy)]
enum RunOutcome {
    Success,
    Abort,
    NoOutcome,
}

fn phi(alpha: usize, gamma: usize, y: f64) -> (f64, f64) {
    let s = if alpha == 0 { 1.0 } else { -1.0 };
    if gamma == 0 {
        (y.sqrt(), s * (1.0 - y).sqrt())
    } else {
        ((1.0 - y).sqrt(), -s * y.sqrt())
    }
}

pub fn coinflip_harness(cfg: &CoinFlipConfig) -> Result<CoinFlipTally> {
    check_workers(cfg.runs, cfg.workers)?;
    cfg.det.validate()?;
    check_range("y", cfg.y, "(1/2, 1)", cfg.y > 0.5 && cfg.y < 1.0)?;
    check_range(
        "s_min",
        cfg.s_min,
        "(0, 1]",
        cfg.s_min > 0.0 && cfg.s_min <= 1.0,
    )?;
    if cfg.m_dishonest == 0 || cfg.n_pulses < cfg.m_dishonest {
        return Err(Error::Precondition(
            "need 1 <= M <= number of pulses".into(),
        ));
    }
    let s_valid = [cfg.s_min, 1.0];
    let parts = par_items(cfg.seed, cfg.runs, cfg.workers, |rng, _| {
        let target = rng.random_range(0..2usize);
        let mut first = None;
        for i in 0..cfg.n_pulses {
            let alpha = rng.random_range(0..2usize);
            let gamma = rng.random_range(0..2usize);
            let beta = rng.random_range(0..2usize);
            let k = if i < cfg.m_dishonest { cfg.k } else { 0 };
            let (a0, a1) = phi(alpha, gamma, cfg.y);
            let (b0, b1) = phi(beta, 0, cfg.y);
            let q = (a0 * b0 + a1 * b1).powi(2).clamp(0.0, 1.0);
            let outcome = match sample_event(rng, &cfg.det, q, beta, k) {
                (1, 0) if rng.random::<f64>() < s_valid[0] => Some(0),
                (0, 1) if rng.random::<f64>() < s_valid[1] => Some(1),
                (1, 1) if cfg.double_click == DoubleClickPolicy::RandomOutcome => {
                    Some(rng.random_range(0..2usize))
                }
                _ => None,
            };
            if let Some(o) = outcome {
                first = Some((alpha, gamma, beta, o));
                break;
            }
        }
        let Some((alpha, gamma, beta, o)) = first else {
            return RunOutcome::NoOutcome;
        };
        let b = rng.random_range(0..2usize);
        let gamma_t = b ^ target;
        let alpha_t = if gamma_t == gamma { alpha } else { alpha ^ 1 };
        if alpha_t == beta && o != gamma_t {
            RunOutcome::Abort
        } else {
            // the coin γ̃ ⊕ b equals the target by construction
            debug_assert_eq!(gamma_t ^ b, target);
            RunOutcome::Success
        }
    });
    let mut t = CoinFlipTally {
        runs: cfg.runs,
        ..Default::default()
    };
    for (_, o) in parts.iter().flatten() {
        match o {
            RunOutcome::Success => t.success += 1,
            RunOutcome::Abort => t.abort += 1,
            RunOutcome::NoOutcome => t.no_outcome += 1,
        }
    }
    Ok(t)
}

/// Ideal-attack harness settings: lossless-ish detectors, many photons.
pub fn coinflip_ideal(
    seed: u64,
    runs: u64,
    m: u32,
    s_min: f64,
    policy: DoubleClickPolicy,
) -> Result<CoinFlipConfig> {
    open_prob("s_min", s_min.min(0.999_999))?;
    Ok(CoinFlipConfig {
        seed,
        runs,
        workers: 4,
        m_dishonest: m,
        n_pulses: m,
        k: 400,
        y: 0.85,
        det: DetectorPair::uniform(0.5, 0.0)?,
        s_min,
        double_click: policy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_stderr() {
        let e = Estimate::from_counts(25, 100);
        assert_eq!(e.value, 0.25);
        assert!((e.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        let one = Estimate::from_counts(1, 1);
        assert_eq!((one.value, one.stderr), (1.0, 0.0));
    }

    #[test]
    fn streams_differ() {
        let mut a = worker_rng(7, 0);
        let mut b = worker_rng(7, 1);
        let xa: u64 = a.random();
        let xb: u64 = b.random();
        assert_ne!(xa, xb);
        let mut a2 = worker_rng(7, 0);
        assert_eq!(xa, a2.random::<u64>());
    }

    #[test]
    fn empty_pulse_without_darks() {
        let det = DetectorPair::uniform(0.5, 0.0).unwrap();
        let mut rng = worker_rng(1, 0);
        for _ in 0..1000 {
            assert_eq!(sample_event(&mut rng, &det, 0.3, 0, 0), (0, 0));
        }
    }

    #[test]
    fn rejects_zero_workers() {
        let sc = Scenario {
            det: DetectorPair::uniform(0.5, 0.0).unwrap(),
            source: PulseSpec::FixedK { k: 1 },
            state: QubitState::zero(),
            bases: BasisPair::bb84(),
            beta: 0,
        };
        let cfg = SimConfig {
            seed: 1,
            pulses: 10,
            workers: 0,
            scenario: sc,
        };
        assert!(estimate_event_probs(&cfg).is_err());
    }
}
