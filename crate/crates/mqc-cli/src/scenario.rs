//! Scenario files.
//!
//! A scenario is a JSON document whose sections override command-line
//! flags. Every section and key is optional; unknown keys are rejected.
//!
//! ```json
//! {
//!   "setup": "I",
//!   "seed": 42,
//!   "workers": 8,
//!   "detectors": {"eta": 0.12, "eta1": 0.08, "d": 1e-5},
//!   "source": {"mu": 0.5, "state": {"rx": 0, "ry": 0, "rz": 1}, "cos2a": 0.5, "pulses": 100000},
//!   "strategy": {"kind": "III", "s11": [0.3, 0.4]},
//!   "attack": {"a": 0.01, "n": 1e6},
//!   "sweep": {"mu_max": 30, "steps": 31}
//! }
//! ```
//!
//! `detectors.pair` (`{"eta": [[..],[..]], "d": [[..],[..]]}`, indexed by
//! detector then basis) replaces the scalar detector keys for Setup I;
//! `detectors.quad` (`{"eta": [4], "d": [4], "theta": ..}`) configures
//! Setup II. `source.schedule` gives `run_protocol` an explicit list of
//! `{"pulse": {"coherent": {"mu": ..}} | {"fixed_k": {"k": ..}}, "state": {..}, "dishonest": bool}`.

use std::path::Path;

use anyhow::{Context, Result};
use mqc_core::attacks::DoublePhotonParams;
use mqc_core::montecarlo::{BasisPolicy, DoubleClickPolicy, ScheduledPulse};
use mqc_core::{DetectorPair, DetectorQuad, QubitState, ReportingStrategy};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
pub enum Setup {
    #[serde(rename = "I")]
    #[value(name = "I")]
    One,
    #[serde(rename = "II")]
    #[value(name = "II")]
    Two,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub setup: Option<Setup>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub detectors: Detectors,
    #[serde(default)]
    pub source: Source,
    pub strategy: Option<StrategySpec>,
    #[serde(default)]
    pub attack: Attack,
    #[serde(default)]
    pub sweep: Sweep,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detectors {
    pub eta: Option<f64>,
    pub eta1: Option<f64>,
    pub d: Option<f64>,
    pub d1: Option<f64>,
    pub pair: Option<DetectorPair>,
    pub quad: Option<DetectorQuad>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    pub mu: Option<f64>,
    pub k: Option<u64>,
    pub state: Option<QubitState>,
    pub cos2a: Option<f64>,
    pub beta: Option<usize>,
    pub pulses: Option<u64>,
    pub dishonest: Option<bool>,
    pub basis_policy: Option<BasisPolicy>,
    pub schedule: Option<Vec<ScheduledPulse>>,
}

#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum StrategySpec {
    I,
    II,
    III {
        s11: [f64; 2],
    },
    #[serde(rename = "trivial")]
    Trivial {
        s: f64,
    },
    #[serde(rename = "custom")]
    Custom {
        table: ReportingStrategy,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attack {
    pub a: Option<f64>,
    pub n: Option<f64>,
    pub p_attack: Option<[f64; 2]>,
    pub p_protocol: Option<[f64; 2]>,
    pub runs: Option<u64>,
    pub s_min: Option<f64>,
    pub double_click: Option<DoubleClickPolicy>,
    pub double_photon: Option<DoublePhotonParams>,
    pub delta_eff: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub mu_max: Option<f64>,
    pub steps: Option<usize>,
    pub k_max: Option<u64>,
    pub m_max: Option<u32>,
    pub eta: Option<Vec<f64>>,
    pub eta0: Option<Vec<f64>>,
    pub eta1: Option<Vec<f64>>,
    pub cos2a: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub delta_eff_max: Option<f64>,
    pub n: Option<f64>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid scenario {}", path.display()))
    }
}

/// Replace `slot` when the scenario provides a value.
pub fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}
