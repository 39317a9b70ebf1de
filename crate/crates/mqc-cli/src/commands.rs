use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use mqc_core::attacks::{
    attack1_guess_coherent, attack2_chernoff, coinflip_attack_success, coinflip_double_click_abort,
    coinflip_double_click_success_ceiling, coinflip_failure_term, double_photon_attack,
    DoublePhotonParams,
};
use mqc_core::bounds::{
    bound_sweep, mixed_pulse_bound, multi_pulse_bound_uniform, MixedPulseInputs,
};
use mqc_core::montecarlo::{
    attack2_empirical, coinflip_harness, coinflip_ideal, double_photon_failure_rate,
    estimate_event_probs, estimate_quad_probs, run_protocol, uniform_schedule, BasisPolicy,
    DoubleClickPolicy, ProtocolConfig, Scenario, SimConfig,
};
use mqc_core::optics::{det_probs, overlap_q, qudit_report_prob};
use mqc_core::reporting::{lemma1_bound, trivial_feasibility, FeasibilityInputs};
use mqc_core::setup_two::{
    attack2_setup2_guess, mpaii_guess, rsdcii_report_probs_general, single_click_probs,
};
use mqc_core::theorem::sweep;
use mqc_core::{
    BasisPair, DetectorPair, DetectorQuad, Estimate, PulseSpec, QubitState, ReportingStrategy,
};
use serde::Serialize;
use serde_json::json;

use crate::scenario::{set, Detectors, ScenarioFile, Setup, StrategySpec};
use crate::{
    AttackCmd, BoundsArgs, CalcCmd, Common, DetectorArgs, ProbsArgs, ProtocolArgs, TheoremArgs,
};

#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StrategyKind {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
    #[value(name = "III")]
    III,
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DoubleClick {
    Discard,
    RandomOutcome,
}

impl From<DoubleClick> for DoubleClickPolicy {
    fn from(d: DoubleClick) -> Self {
        match d {
            DoubleClick::Discard => DoubleClickPolicy::Discard,
            DoubleClick::RandomOutcome => DoubleClickPolicy::RandomOutcome,
        }
    }
}

pub fn parse_state(s: &str) -> std::result::Result<QubitState, String> {
    match s {
        "zero" | "0" => Ok(QubitState::zero()),
        "one" | "1" => Ok(QubitState::one()),
        "plus" | "+" => Ok(QubitState::plus()),
        "minus" | "-" => Ok(QubitState::minus()),
        _ => {
            let v: Vec<f64> = s
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| format!("state must be zero|one|plus|minus|rx,ry,rz: {e}"))?;
            if v.len() != 3 {
                return Err("state must be zero|one|plus|minus|rx,ry,rz".into());
            }
            QubitState::new(v[0], v[1], v[2]).map_err(|e| e.to_string())
        }
    }
}

pub fn parse_basis(s: &str) -> std::result::Result<BasisPolicy, String> {
    match s {
        "random" => Ok(BasisPolicy::Random),
        "0" => Ok(BasisPolicy::Fixed(0)),
        "1" => Ok(BasisPolicy::Fixed(1)),
        _ => Err("basis must be random, 0 or 1".into()),
    }
}

fn load(common: &mut Common) -> Result<ScenarioFile> {
    let sc = match &common.scenario {
        Some(p) => ScenarioFile::load(p)?,
        None => ScenarioFile::default(),
    };
    set(&mut common.seed, sc.seed);
    set(&mut common.workers, sc.workers);
    Ok(sc)
}

fn sink(out: &Option<std::path::PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write(&self, out: &Option<std::path::PathBuf>) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink(out)?);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn f(x: f64) -> String {
    x.to_string()
}

fn write_json<T: Serialize>(out: &Option<std::path::PathBuf>, v: &T) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    ensure!(steps >= 1, "steps must be at least 1");
    ensure!(hi >= lo, "sweep upper end {hi} is below {lo}");
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let mut g: Vec<f64> = (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect();
    // exact endpoint so that loci like cos2a = 1 are hit
    g[steps - 1] = hi;
    Ok(g)
}

fn pair(v: &[f64], name: &str) -> Result<[f64; 2]> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => bail!("{name} takes two comma-separated values, got {}", v.len()),
    }
}

fn detector_pair(args: &DetectorArgs, sc: &Detectors) -> Result<DetectorPair> {
    if let Some(p) = sc.pair {
        p.validate()?;
        return Ok(p);
    }
    let eta = sc.eta.unwrap_or(args.eta);
    let d = sc.d.unwrap_or(args.d);
    let eta1 = sc.eta1.or(args.eta1).unwrap_or(eta);
    let d1 = sc.d1.or(args.d1).unwrap_or(d);
    Ok(DetectorPair::symmetric(eta, eta1, d, d1)?)
}

fn pulse_for_mu(mu: f64) -> PulseSpec {
    // zero intensity is the vacuum
    if mu == 0.0 {
        PulseSpec::FixedK { k: 0 }
    } else {
        PulseSpec::Coherent { mu }
    }
}

fn est_cols(e: &Estimate) -> (String, String) {
    (f(e.value), f(e.stderr))
}

pub fn probs(mut a: ProbsArgs) -> Result<()> {
    let sc = load(&mut a.common)?;
    set(&mut a.setup, sc.setup);
    set(&mut a.state, sc.source.state);
    set(&mut a.cos2a, sc.source.cos2a);
    set(&mut a.mu_max, sc.sweep.mu_max);
    set(&mut a.steps, sc.sweep.steps);
    set(&mut a.pulses, sc.source.pulses);
    a.beta = sc.source.beta.or(a.beta);
    a.k_max = sc.sweep.k_max.or(a.k_max);
    a.state.validate()?;
    match a.setup {
        Setup::One => probs_setup_one(&a, &sc),
        Setup::Two => probs_setup_two(&a, &sc),
    }
}

fn probs_setup_one(a: &ProbsArgs, sc: &ScenarioFile) -> Result<()> {
    let det = detector_pair(&a.det, &sc.detectors)?;
    let bases = BasisPair::new(a.cos2a)?;
    let betas: Vec<usize> = match a.beta {
        Some(b) if b < 2 => vec![b],
        Some(b) => bail!("beta must be 0 or 1, got {b}"),
        None => vec![0, 1],
    };
    let sources: Vec<(f64, PulseSpec)> = match a.k_max {
        Some(k) => (0..=k)
            .map(|k| (k as f64, PulseSpec::FixedK { k }))
            .collect(),
        None => grid(0.0, a.mu_max, a.steps)?
            .into_iter()
            .map(|mu| (mu, pulse_for_mu(mu)))
            .collect(),
    };
    let cells = ["p00", "p01", "p10", "p11"];
    let mut header = vec!["mu_or_k".to_string(), "beta".to_string()];
    header.extend(cells.iter().map(|s| s.to_string()));
    if a.mc {
        header.extend(cells.iter().map(|s| format!("mc_{s}")));
        header.extend(cells.iter().map(|s| format!("se_{s}")));
    }
    let mut t = Table::new(&header);
    for (i, (x, src)) in sources.iter().enumerate() {
        for &beta in &betas {
            let truth = det_probs(&det, overlap_q(&a.state, &bases, beta), beta, src)?;
            let mut row = vec![f(*x), beta.to_string()];
            row.extend(truth.p.iter().flatten().map(|&p| f(p)));
            if a.mc {
                let cfg = SimConfig {
                    seed: a.common.seed.wrapping_add((2 * i + beta) as u64),
                    pulses: a.pulses,
                    workers: a.common.workers,
                    scenario: Scenario {
                        det,
                        source: *src,
                        state: a.state,
                        bases,
                        beta,
                    },
                };
                let est = estimate_event_probs(&cfg)?;
                let flat: Vec<&Estimate> = est.iter().flatten().collect();
                row.extend(flat.iter().map(|e| f(e.value)));
                row.extend(flat.iter().map(|e| f(e.stderr)));
            }
            t.push(row);
        }
    }
    t.write(&a.common.out)
}

fn probs_setup_two(a: &ProbsArgs, sc: &ScenarioFile) -> Result<()> {
    let quad = match sc.detectors.quad {
        Some(q) => {
            q.validate()?;
            q
        }
        None => {
            let eta = sc.detectors.eta.unwrap_or(a.det.eta);
            let d = sc.detectors.d.unwrap_or(a.det.d);
            DetectorQuad::new([eta; 4], [d; 4], a.theta)?
        }
    };
    let k_max = a.k_max.unwrap_or(10);
    let cells = ["p_d0", "p_d1", "p_dplus", "p_dminus", "rsd_b0", "rsd_b1"];
    let mut header = vec!["k".to_string()];
    header.extend(cells.iter().map(|s| s.to_string()));
    if a.mc {
        header.extend(cells.iter().map(|s| format!("mc_{s}")));
        header.extend(cells.iter().map(|s| format!("se_{s}")));
    }
    let mut t = Table::new(&header);
    for k in 0..=k_max {
        let p = single_click_probs(&quad, &a.state, k);
        let r = rsdcii_report_probs_general(&quad, &a.state, k);
        let mut row = vec![k.to_string()];
        row.extend(p.iter().chain(&r.p_report).map(|&x| f(x)));
        if a.mc {
            let est = estimate_quad_probs(
                a.common.seed.wrapping_add(k),
                a.pulses,
                a.common.workers,
                &quad,
                &a.state,
                k,
            )?;
            let all: Vec<(String, String)> =
                est.single.iter().chain(&est.rsdcii).map(est_cols).collect();
            row.extend(all.iter().map(|c| c.0.clone()));
            row.extend(all.iter().map(|c| c.1.clone()));
        }
        t.push(row);
    }
    t.write(&a.common.out)
}

pub fn attack(cmd: AttackCmd) -> Result<()> {
    match cmd {
        AttackCmd::Attack1 {
            mut common,
            mut eta,
            mut mu_max,
            mut steps,
            mc,
            mut pulses,
        } => {
            let sc = load(&mut common)?;
            set(&mut eta, sc.detectors.eta);
            set(&mut mu_max, sc.sweep.mu_max);
            set(&mut steps, sc.sweep.steps);
            set(&mut pulses, sc.source.pulses);
            let det = DetectorPair::uniform(eta, 0.0)?;
            let header: &[&str] = if mc {
                &["mu", "guess", "mc_guess", "se_guess"]
            } else {
                &["mu", "guess"]
            };
            let mut t = Table::new(header);
            for (i, mu) in grid(0.0, mu_max, steps)?.into_iter().enumerate() {
                let mut row = vec![f(mu), f(attack1_guess_coherent(eta, mu)?)];
                if mc {
                    let n = usize::try_from(pulses)?;
                    let cfg = ProtocolConfig {
                        seed: common.seed.wrapping_add(i as u64),
                        workers: common.workers,
                        det,
                        bases: BasisPair::bb84(),
                        strategy: ReportingStrategy::strategy_i(),
                        basis_policy: BasisPolicy::Random,
                        schedule: uniform_schedule(n, pulse_for_mu(mu), QubitState::zero(), true),
                    };
                    let (v, se) = est_cols(&run_protocol(&cfg)?.attack1_guess());
                    row.extend([v, se]);
                }
                t.push(row);
            }
            t.write(&common.out)
        }
        AttackCmd::Attack2 {
            mut common,
            n,
            a,
            p_attack,
            p_protocol,
            runs,
        } => {
            let sc = load(&mut common)?;
            let n = sc.attack.n.or(n).context("missing --n (or attack.n)")?;
            let a = sc.attack.a.or(a).context("missing --a (or attack.a)")?;
            let p_att = match sc.attack.p_attack {
                Some(p) => p,
                None => pair(&p_attack, "--p-attack (or attack.p_attack)")?,
            };
            let p_pro = match sc.attack.p_protocol {
                Some(p) => p,
                None => pair(&p_protocol, "--p-protocol (or attack.p_protocol)")?,
            };
            let runs = sc.attack.runs.or(runs);
            let outcome = attack2_chernoff(n, a, p_att, p_pro)?;
            let empirical = match runs {
                Some(r) => {
                    ensure!(n.fract() == 0.0, "simulation needs an integer N, got {n}");
                    Some(attack2_empirical(
                        common.seed,
                        r,
                        common.workers,
                        n as u64,
                        a,
                        p_att,
                        p_pro,
                    )?)
                }
                None => None,
            };
            write_json(
                &common.out,
                &json!({
                    "params": {"n": n, "a": a, "p_attack": p_att, "p_protocol": p_pro},
                    "guess_prob": outcome.guess_prob,
                    "fail_prob_bound": outcome.fail_prob_bound,
                    "intermediates": outcome.intermediates,
                    "empirical_success": empirical,
                }),
            )
        }
        AttackCmd::Doublephoton {
            mut common,
            d0,
            d1,
            eta0,
            eta1,
            mu,
            n,
            runs,
        } => {
            let sc = load(&mut common)?;
            let mut p = sc
                .attack
                .double_photon
                .unwrap_or(DoublePhotonParams::EXAMPLE);
            if sc.attack.double_photon.is_none() {
                set(&mut p.d0, d0);
                set(&mut p.d1, d1);
                set(&mut p.eta0, eta0);
                set(&mut p.eta1, eta1);
                set(&mut p.mu, mu);
                set(&mut p.n, n);
            }
            let outcome = double_photon_attack(&p)?;
            let empirical = match sc.attack.runs.or(runs) {
                Some(r) => Some(double_photon_failure_rate(
                    common.seed,
                    r,
                    common.workers,
                    &p,
                )?),
                None => None,
            };
            write_json(
                &common.out,
                &json!({
                    "params": p,
                    "guess_prob": outcome.guess_prob,
                    "fail_prob_bound": outcome.fail_prob_bound,
                    "intermediates": outcome.intermediates,
                    "empirical_failure": empirical,
                }),
            )
        }
        AttackCmd::Coinflip {
            mut common,
            mut s_min,
            mut m_max,
            runs,
            double_click,
        } => {
            let sc = load(&mut common)?;
            set(&mut s_min, sc.attack.s_min);
            set(&mut m_max, sc.sweep.m_max);
            let runs = sc.attack.runs.or(runs);
            let policy = sc.attack.double_click.unwrap_or(double_click.into());
            let mut header = vec![
                "m",
                "success",
                "failure_term",
                "double_click_abort",
                "double_click_ceiling",
            ];
            if runs.is_some() {
                header.extend(["mc_success", "se_success", "mc_abort", "se_abort"]);
            }
            let mut t = Table::new(&header);
            let ceiling = coinflip_double_click_success_ceiling(s_min);
            for m in 1..=m_max {
                let mut row = vec![
                    m.to_string(),
                    f(coinflip_attack_success(s_min, m)?),
                    f(coinflip_failure_term(s_min, m)),
                    f(coinflip_double_click_abort(s_min, m)?),
                    f(ceiling),
                ];
                if let Some(r) = runs {
                    let mut cfg =
                        coinflip_ideal(common.seed.wrapping_add(m as u64), r, m, s_min, policy)?;
                    cfg.workers = common.workers;
                    let tally = coinflip_harness(&cfg)?;
                    let (s, s_se) = est_cols(&tally.success_rate());
                    let (ab, ab_se) = est_cols(&tally.abort_rate());
                    row.extend([s, s_se, ab, ab_se]);
                }
                t.push(row);
            }
            t.write(&common.out)
        }
        AttackCmd::Mpaii {
            mut common,
            mut eta,
            mut d,
            mut k_max,
        } => {
            let sc = load(&mut common)?;
            set(&mut eta, sc.sweep.eta);
            set(&mut d, sc.detectors.d);
            set(&mut k_max, sc.sweep.k_max);
            let mut t = Table::new(&["eta", "k", "guess"]);
            for &e in &eta {
                let quad = DetectorQuad::uniform(e, d)?;
                for k in 0..=k_max {
                    t.push(vec![f(e), k.to_string(), f(mpaii_guess(&quad, k)?)]);
                }
            }
            t.write(&common.out)
        }
        AttackCmd::Setup2Attack2 {
            mut common,
            mut eta,
            mut delta_eff,
            mut d,
            mut k_max,
        } => {
            let sc = load(&mut common)?;
            set(&mut eta, sc.sweep.eta);
            set(&mut delta_eff, sc.attack.delta_eff);
            set(&mut d, sc.detectors.d);
            set(&mut k_max, sc.sweep.k_max);
            ensure!((0.0..1.0).contains(&d), "d = {d} is outside [0, 1)");
            let a_dark = (1.0 - d) * (1.0 - d);
            let mut t = Table::new(&["eta", "k", "guess"]);
            for &e in &eta {
                for k in 0..=k_max {
                    let g = attack2_setup2_guess(a_dark, e + delta_eff, e - delta_eff, k)?;
                    t.push(vec![f(e), k.to_string(), f(g)]);
                }
            }
            t.write(&common.out)
        }
    }
}

pub fn bounds(mut a: BoundsArgs) -> Result<()> {
    let sc = load(&mut a.common)?;
    set(&mut a.eta, sc.sweep.eta);
    set(&mut a.delta, sc.sweep.delta);
    set(&mut a.delta_eff_max, sc.sweep.delta_eff_max);
    set(&mut a.steps, sc.sweep.steps);
    set(&mut a.n, sc.sweep.n);
    let rows = bound_sweep(&a.eta, &grid(0.0, a.delta_eff_max, a.steps)?, a.delta)?;
    let mut t = Table::new(&[
        "eta",
        "delta_eff",
        "b_ii",
        "b_iii",
        "n",
        "composed_ii",
        "composed_ii_vacuous",
        "composed_iii",
        "composed_iii_vacuous",
    ]);
    for r in rows {
        // per-pulse bounds above 1 carry no information; cap before composing
        let c2 = multi_pulse_bound_uniform(a.n, r.b_ii.min(1.0))?;
        let c3 = multi_pulse_bound_uniform(a.n, r.b_iii.min(1.0))?;
        t.push(vec![
            f(r.eta),
            f(r.delta_eff),
            f(r.b_ii),
            f(r.b_iii),
            f(a.n),
            f(c2.clamped()),
            c2.vacuous.to_string(),
            f(c3.clamped()),
            c3.vacuous.to_string(),
        ]);
    }
    t.write(&a.common.out)
}

pub fn theorem(mut a: TheoremArgs) -> Result<()> {
    let sc = load(&mut a.common)?;
    let eta0 = match sc.sweep.eta0.or(a.eta0.take()) {
        Some(v) => v,
        None => grid(0.1, 0.9, 9)?,
    };
    let eta1 = match sc.sweep.eta1.or(a.eta1.take()) {
        Some(v) => v,
        None => eta0.clone(),
    };
    let cos2a = match sc.sweep.cos2a.or(a.cos2a.take()) {
        Some(v) => v,
        None => grid(0.1, 1.0, 10)?,
    };
    let mut t = Table::new(&["eta0", "eta1", "cos2a", "dim", "class"]);
    for r in sweep(&eta0, &eta1, &cos2a, a.tol)? {
        t.push(vec![
            f(r.eta0),
            f(r.eta1),
            f(r.cos2a),
            r.dim.to_string(),
            r.tag.as_str().to_string(),
        ]);
    }
    t.write(&a.common.out)
}

fn strategy(
    a: &ProtocolArgs,
    det: &DetectorPair,
    spec: Option<StrategySpec>,
) -> Result<ReportingStrategy> {
    let spec = match spec {
        Some(s) => s,
        None => match a.strategy {
            StrategyKind::I => StrategySpec::I,
            StrategyKind::II => StrategySpec::II,
            StrategyKind::III => StrategySpec::III {
                s11: pair(&a.s11, "--s11")?,
            },
            StrategyKind::Trivial => StrategySpec::Trivial { s: a.s },
        },
    };
    Ok(match spec {
        StrategySpec::I => ReportingStrategy::strategy_i(),
        StrategySpec::II => ReportingStrategy::strategy_ii(),
        StrategySpec::III { s11 } => ReportingStrategy::strategy_iii(det, s11[0], s11[1])?,
        StrategySpec::Trivial { s } => ReportingStrategy::trivial(s)?,
        StrategySpec::Custom { table } => {
            table.validate()?;
            table
        }
    })
}

pub fn protocol(mut a: ProtocolArgs) -> Result<()> {
    let sc = load(&mut a.common)?;
    if sc.setup == Some(Setup::Two) {
        bail!("setup: the protocol harness simulates Setup I only");
    }
    let det = detector_pair(&a.det, &sc.detectors)?;
    set(&mut a.state, sc.source.state);
    set(&mut a.cos2a, sc.source.cos2a);
    set(&mut a.pulses, sc.source.pulses);
    set(&mut a.dishonest, sc.source.dishonest);
    set(&mut a.basis, sc.source.basis_policy);
    let pulse = match (sc.source.k, sc.source.mu) {
        (Some(_), Some(_)) => bail!("source: give either k or mu, not both"),
        (Some(k), None) => PulseSpec::FixedK { k },
        (None, Some(mu)) => pulse_for_mu(mu),
        (None, None) => a.k.map_or(pulse_for_mu(a.mu), |k| PulseSpec::FixedK { k }),
    };
    let schedule = match sc.source.schedule {
        Some(s) => {
            if let Some(n) = sc.source.pulses {
                ensure!(
                    n == s.len() as u64,
                    "source.pulses = {n} does not match the {} scheduled pulses",
                    s.len()
                );
            }
            s
        }
        None => uniform_schedule(usize::try_from(a.pulses)?, pulse, a.state, a.dishonest),
    };
    let cfg = ProtocolConfig {
        seed: a.common.seed,
        workers: a.common.workers,
        det,
        bases: BasisPair::new(a.cos2a)?,
        strategy: strategy(&a, &det, sc.strategy)?,
        basis_policy: a.basis,
        schedule,
    };
    let t = run_protocol(&cfg)?;
    if let Some(path) = &a.transcript {
        write_transcript(path, &t.records)?;
    }
    write_json(
        &a.common.out,
        &json!({
            "seed": cfg.seed,
            "workers": cfg.workers,
            "summary": t.summary,
            "attack1_guess": t.attack1_guess(),
        }),
    )
}

fn write_transcript(path: &Path, records: &[mqc_core::PulseRecord]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record([
        "index",
        "k",
        "rx",
        "ry",
        "rz",
        "dishonest",
        "beta",
        "c0",
        "c1",
        "m",
    ])?;
    for r in records {
        w.write_record([
            r.index.to_string(),
            r.k.to_string(),
            f(r.state.rx),
            f(r.state.ry),
            f(r.state.rz),
            u8::from(r.dishonest).to_string(),
            r.beta.to_string(),
            r.c0.to_string(),
            r.c1.to_string(),
            u8::from(r.m).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn calc(cmd: CalcCmd) -> Result<()> {
    match cmd {
        CalcCmd::Lemma1 {
            mut common,
            delta,
            s11,
            k,
        } => {
            load(&mut common)?;
            let b = lemma1_bound(delta, s11, k)?;
            write_json(
                &common.out,
                &json!({"delta": delta, "s11": s11, "k": k, "bound": b}),
            )
        }
        CalcCmd::Qudit {
            mut common,
            eta,
            darks,
            k,
        } => {
            load(&mut common)?;
            let p = qudit_report_prob(eta, &darks, k)?;
            write_json(
                &common.out,
                &json!({"eta": eta, "darks": darks, "k": k, "report_prob": p}),
            )
        }
        CalcCmd::Mixed {
            mut common,
            n,
            eps,
            delta_empty,
            delta_mult,
            b0,
            b1,
            b_mult,
        } => {
            load(&mut common)?;
            let inp = MixedPulseInputs {
                n,
                eps,
                delta_empty,
                delta_mult,
                b0,
                b1,
                b_mult,
            };
            let b = mixed_pulse_bound(&inp)?;
            write_json(
                &common.out,
                &json!({"inputs": inp, "bound": b.raw, "clamped": b.clamped(), "vacuous": b.vacuous}),
            )
        }
        CalcCmd::Feasibility {
            mut common,
            delta_cc,
            delta_err_equal,
            delta_err_diff,
            delta_error,
            delta_00_ii,
            delta_det,
        } => {
            load(&mut common)?;
            let [d00, d11] = pair(&delta_cc, "--delta-cc")?;
            let inp = FeasibilityInputs {
                delta_cc_i: (d00, d11),
                delta_err_equal,
                delta_err_diff,
                delta_error,
                delta_00_ii,
                delta_det,
            };
            write_json(
                &common.out,
                &json!({"inputs": inp, "verdict": trivial_feasibility(&inp)?}),
            )
        }
    }
}
