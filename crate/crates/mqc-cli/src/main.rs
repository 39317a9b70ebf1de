//! `mqc`: detection probabilities, attack calculators, security bounds, the
//! trivial-strategy theorem sweep and the Monte Carlo protocol harness.
//!
//! Sweeps are written as CSV (comma, `.` decimal, header row, LF), scalar
//! reports as JSON. Every command is deterministic for a fixed flag set;
//! the seed defaults to `$MQC_SEED`. A `--scenario` file overrides flags,
//! see [`scenario`].
//!
//! CSV schema v1 (headers are pinned by tests):
//!
//! | command | columns |
//! |---|---|
//! | `probs` (I) | `mu_or_k,beta,p00,p01,p10,p11` (+ `mc_p00..mc_p11,se_p00..se_p11` with `--mc`) |
//! | `probs` (II) | `k,p_d0,p_d1,p_dplus,p_dminus,rsd_b0,rsd_b1` (+ `mc_`/`se_` copies with `--mc`) |
//! | `attack attack1` | `mu,guess` (+ `mc_guess,se_guess`) |
//! | `attack coinflip` | `m,success,failure_term,double_click_abort,double_click_ceiling` (+ `mc_success,se_success,mc_abort,se_abort`) |
//! | `attack mpaii` | `eta,k,guess` |
//! | `attack setup2-attack2` | `eta,k,guess` |
//! | `bounds` | `eta,delta_eff,b_ii,b_iii,n,composed_ii,composed_ii_vacuous,composed_iii,composed_iii_vacuous` |
//! | `theorem` | `eta0,eta1,cos2a,dim,class` |
//! | `protocol --transcript` | `index,k,rx,ry,rz,dishonest,beta,c0,c1,m` |

mod commands;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use mqc_core::montecarlo::DEFAULT_SEED;

use crate::scenario::Setup;

#[derive(Parser)]
#[command(
    name = "mqc",
    version,
    about = "Multiphoton attacks on mistrustful quantum cryptography"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detection-event distributions over a mu or k sweep
    Probs(ProbsArgs),
    /// Attack calculators
    #[command(subcommand)]
    Attack(AttackCmd),
    /// B_II / B_III surfaces and composed N-pulse bounds
    Bounds(BoundsArgs),
    /// Solution-space classification over an (eta0, eta1, cos2a) grid
    Theorem(TheoremArgs),
    /// Simulate a pulse schedule; JSON summary plus optional per-pulse CSV
    Protocol(ProtocolArgs),
    /// Scalar calculators
    #[command(subcommand)]
    Calc(CalcCmd),
}

#[derive(Args, Clone)]
pub struct Common {
    /// JSON scenario file; its values override flags
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, env = "MQC_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo worker streams (part of the seed identity)
    #[arg(long, default_value_t = 4)]
    pub workers: usize,
    /// Output file; stdout if omitted
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct DetectorArgs {
    /// Efficiency of D_0 (and of D_1 unless --eta1 is given)
    #[arg(long, default_value_t = 0.12)]
    pub eta: f64,
    #[arg(long)]
    pub eta1: Option<f64>,
    /// Dark-count probability of D_0 (and of D_1 unless --d1 is given)
    #[arg(long, default_value_t = 0.0)]
    pub d: f64,
    #[arg(long)]
    pub d1: Option<f64>,
}

#[derive(Args)]
pub struct ProbsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub det: DetectorArgs,
    #[arg(long, value_enum, default_value = "I")]
    pub setup: Setup,
    /// zero | one | plus | minus | rx,ry,rz
    #[arg(long, default_value = "zero", value_parser = commands::parse_state)]
    pub state: mqc_core::QubitState,
    #[arg(long, default_value_t = 0.5)]
    pub cos2a: f64,
    /// Only this basis; both if omitted
    #[arg(long)]
    pub beta: Option<usize>,
    #[arg(long, default_value_t = 30.0)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 31)]
    pub steps: usize,
    /// Sweep k = 0..=K photons instead of mu (always for Setup II)
    #[arg(long)]
    pub k_max: Option<u64>,
    /// Polarization rotation of the Setup II measurement
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Add Monte Carlo estimates and standard errors
    #[arg(long)]
    pub mc: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub pulses: u64,
}

#[derive(Subcommand)]
pub enum AttackCmd {
    /// Attack I guessing probability over mu
    Attack1 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.12)]
        eta: f64,
        #[arg(long, default_value_t = 30.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 31)]
        steps: usize,
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 1_000_000)]
        pulses: u64,
    },
    /// Attack II Chernoff bound (JSON)
    Attack2 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        /// P(m=1 | beta) of an attack pulse, as p0,p1
        #[arg(long, value_delimiter = ',')]
        p_attack: Vec<f64>,
        /// P(m=1 | beta) of an honest pulse, as p0,p1
        #[arg(long, value_delimiter = ',')]
        p_protocol: Vec<f64>,
        /// Also estimate the success rate over this many simulated runs
        #[arg(long)]
        runs: Option<u64>,
    },
    /// Double-photon attack (JSON)
    Doublephoton {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d0: Option<f64>,
        #[arg(long)]
        d1: Option<f64>,
        #[arg(long)]
        eta0: Option<f64>,
        #[arg(long)]
        eta1: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        n: Option<f64>,
        #[arg(long)]
        runs: Option<u64>,
    },
    /// Coin-flip attack success over M dishonest pulses
    Coinflip {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.68)]
        s_min: f64,
        #[arg(long, default_value_t = 40)]
        m_max: u32,
        /// Also run the pulse-level harness with this many runs per M
        #[arg(long)]
        runs: Option<u64>,
        #[arg(long, value_enum, default_value = "discard")]
        double_click: commands::DoubleClick,
    },
    /// Setup II multiphoton attack: guessing probability over k
    Mpaii {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5, 0.7, 0.9])]
        eta: Vec<f64>,
        #[arg(long, default_value_t = 1e-5)]
        d: f64,
        #[arg(long, default_value_t = 150)]
        k_max: u64,
    },
    /// Setup II attack II with efficiencies eta +- delta_eff
    #[command(name = "setup2-attack2")]
    Setup2Attack2 {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5, 0.7, 0.9])]
        eta: Vec<f64>,
        #[arg(long, default_value_t = 0.005)]
        delta_eff: f64,
        #[arg(long, default_value_t = 1e-5)]
        d: f64,
        #[arg(long, default_value_t = 500)]
        k_max: u64,
    },
}

#[derive(Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5, 0.7, 0.9])]
    pub eta: Vec<f64>,
    /// Dark-count ceiling
    #[arg(long, default_value_t = 1e-5)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta_eff_max: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Pulses for the composed bound
    #[arg(long, default_value_t = 1.0)]
    pub n: f64,
}

#[derive(Args)]
pub struct TheoremArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',')]
    pub eta0: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub eta1: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub cos2a: Option<Vec<f64>>,
    /// Singular-value threshold, relative to the largest
    #[arg(long, default_value_t = mqc_core::theorem::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Args)]
pub struct ProtocolArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub det: DetectorArgs,
    /// Coherent pulses with this mean photon number
    #[arg(long, default_value_t = 0.1, conflicts_with = "k")]
    pub mu: f64,
    /// Fixed photon number instead of a coherent source
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value = "zero", value_parser = commands::parse_state)]
    pub state: mqc_core::QubitState,
    #[arg(long, default_value_t = 0.5)]
    pub cos2a: f64,
    #[arg(long, default_value_t = 100_000)]
    pub pulses: u64,
    /// Mark every pulse as Alice's
    #[arg(long)]
    pub dishonest: bool,
    #[arg(long, value_enum, default_value = "I")]
    pub strategy: commands::StrategyKind,
    /// S_11 for strategy III, as s0,s1
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0])]
    pub s11: Vec<f64>,
    /// Reporting rate of the trivial strategy
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// random | 0 | 1
    #[arg(long, default_value = "random", value_parser = commands::parse_basis)]
    pub basis: mqc_core::montecarlo::BasisPolicy,
    /// Per-pulse CSV transcript
    #[arg(long)]
    pub transcript: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum CalcCmd {
    /// Single-pulse gap cap of strategy III
    Lemma1 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        s11: f64,
        #[arg(long, default_value_t = 1)]
        k: u64,
    },
    /// Report probability of a d-outcome measurement with equal efficiencies
    Qudit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eta: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        darks: Vec<f64>,
        #[arg(long)]
        k: u64,
    },
    /// Composed bound for a run of empty, single- and multiphoton pulses
    Mixed {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta_empty: f64,
        #[arg(long)]
        delta_mult: f64,
        #[arg(long)]
        b0: f64,
        #[arg(long)]
        b1: f64,
        #[arg(long)]
        b_mult: f64,
    },
    /// Whether the trivial strategy satisfies both classes of protocol
    Feasibility {
        #[command(flatten)]
        common: Common,
        /// delta_00,delta_11 of the first class
        #[arg(long, value_delimiter = ',', required = true)]
        delta_cc: Vec<f64>,
        #[arg(long)]
        delta_err_equal: f64,
        #[arg(long)]
        delta_err_diff: f64,
        #[arg(long)]
        delta_error: f64,
        #[arg(long)]
        delta_00_ii: f64,
        #[arg(long)]
        delta_det: f64,
    },
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Probs(a) => commands::probs(a),
        Command::Attack(a) => commands::attack(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Theorem(a) => commands::theorem(a),
        Command::Protocol(a) => commands::protocol(a),
        Command::Calc(a) => commands::calc(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        // A closed downstream pipe (`mqc probs | head`) is not an error.
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<serde_json::Error>()
                .is_some_and(|je| je.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe))
            || c.downcast_ref::<csv::Error>().is_some_and(|ce| {
                matches!(ce.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe)
            })
    })
}
