//! Numeric check that the trivial strategy is the only reporting strategy
//! hiding Bob's basis from every pulse of at most two photons.
//!
//! Each probe pulse yields one linear constraint
//! `Σ_{c0,c1} [S_{c0c1,1} P(c0,c1|1) − S_{c0c1,0} P(c0,c1|0)] = 0`
//! on the eight entries of `S`, ordered as
//! `(S000, S010, S100, S110, S001, S011, S101, S111)` (`S_{c0 c1 β}`).
//! Detectors are taken dark-count free with basis-independent efficiencies.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, open_prob, Error, Result};
use crate::optics::{det_probs_fixed_k, overlap_q, BasisPair, DetectorPair, QubitState};

pub const N_VARS: usize = 8;
/// Default relative singular-value threshold.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Condition number above which a system is flagged ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e12;
/// Distance below which `|η0 − η1|` or `1 − cos2a` counts as near-degenerate.
pub const NEAR_DEGENERATE: f64 = 1e-6;
/// Angle (rad) within which a one-dimensional nullspace counts as all-ones.
pub const ALIGN_TOL: f64 = 1e-6;

/// Column of `S_{c0 c1 β}`.
#[inline]
pub fn var_index(c0: usize, c1: usize, beta: usize) -> usize {
    4 * beta + 2 * c0 + c1
}

pub const VAR_NAMES: [&str; N_VARS] = [
    "S000", "S010", "S100", "S110", "S001", "S011", "S101", "S111",
];

/// A `k`-photon product probe `state^{⊗k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub k: u64,
    pub state: QubitState,
}

/// The eight probes: vacuum; `|0⟩, |1⟩, |ψ01⟩, |ψ11⟩`; `|00⟩, |ψ01ψ01⟩, |11⟩`.
/// `|ψ11ψ11⟩` adds no information and is left out.
pub fn default_probes(bases: &BasisPair) -> Vec<Probe> {
    let p = |k, state| Probe { k, state };
    vec![
        p(0, QubitState::zero()),
        p(1, QubitState::zero()),
        p(1, QubitState::one()),
        p(1, bases.psi01()),
        p(1, bases.psi11()),
        p(2, QubitState::zero()),
        p(2, bases.psi01()),
        p(2, QubitState::one()),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    pub matrix: DMatrix<f64>,
}

/// Constraint system for the default probes.
pub fn build_constraints(eta0: f64, eta1: f64, cos2a: f64) -> Result<ConstraintSystem> {
    let bases = BasisPair::new(cos2a)?;
    build_constraints_with(eta0, eta1, cos2a, &default_probes(&bases))
}

/// Constraint system for an arbitrary probe list (one row per probe).
pub fn build_constraints_with(
    eta0: f64,
    eta1: f64,
    cos2a: f64,
    probes: &[Probe],
) -> Result<ConstraintSystem> {
    open_prob("eta0", eta0)?;
    open_prob("eta1", eta1)?;
    let bases = BasisPair::new(cos2a)?;
    let det = DetectorPair::symmetric(eta0, eta1, 0.0, 0.0)?;
    let mut m = DMatrix::zeros(probes.len(), N_VARS);
    for (r, probe) in probes.iter().enumerate() {
        probe.state.validate()?;
        for beta in 0..2 {
            let q = overlap_q(&probe.state, &bases, beta);
            let ev = det_probs_fixed_k(&det, q, beta, probe.k);
            let sign = if beta == 1 { 1.0 } else { -1.0 };
            for c0 in 0..2 {
                for c1 in 0..2 {
                    m[(r, var_index(c0, c1, beta))] = sign * ev.get(c0, c1);
                }
            }
        }
    }
    Ok(ConstraintSystem { matrix: m })
}

/// Orthonormal nullspace basis of a constraint system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionBasis {
    pub dim: usize,
    pub basis: Vec<[f64; N_VARS]>,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Ratio of the largest to the smallest retained singular value.
    pub condition_number: f64,
    pub ill_conditioned: bool,
}

/// Nullspace via SVD; singular values below `tol · σ_max` count as zero.
pub fn solution_space(sys: &ConstraintSystem, tol: f64) -> Result<SolutionBasis> {
    check_range("tol", tol, "(0, inf)", tol > 0.0)?;
    let m = &sys.matrix;
    if m.ncols() != N_VARS || m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Precondition(
            "constraint matrix must be finite with 8 columns".into(),
        ));
    }
    // pad to square so V is complete even with fewer than 8 rows
    let rows = m.nrows().max(N_VARS);
    let mut a = DMatrix::zeros(rows, N_VARS);
    a.view_mut((0, 0), (m.nrows(), N_VARS)).copy_from(m);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..N_VARS).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv[0];
    let cut = tol * smax;
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let basis: Vec<[f64; N_VARS]> = order[rank..]
        .iter()
        .map(|&i| std::array::from_fn(|j| v_t[(i, j)]))
        .collect();
    let condition_number = if rank == 0 {
        f64::INFINITY
    } else {
        smax / sv[rank - 1]
    };
    Ok(SolutionBasis {
        dim: basis.len(),
        basis,
        singular_values: sv,
        condition_number,
        ill_conditioned: condition_number > ILL_CONDITIONED,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolutionTag {
    /// Only `S = const`.
    Trivial,
    /// `S000 = S001` free, the other six entries equal (equal efficiencies).
    EqualEfficiencyFamily,
    /// `S_{c0c1,0} = S_{c0c1,1}` for `(c0,c1) ≠ (1,1)` (identical bases).
    IdenticalBasesFamily,
    /// Anything else; contradicts the uniqueness result.
    Other,
}

impl SolutionTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Trivial => "trivial",
            Self::EqualEfficiencyFamily => "equal_efficiency",
            Self::IdenticalBasesFamily => "identical_bases",
            Self::Other => "other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionClass {
    pub tag: SolutionTag,
    pub nullspace_dim: usize,
    pub basis_vectors: Vec<[f64; N_VARS]>,
    pub near_degenerate: bool,
    /// Set when the tag is `Other` or disagrees with the parameters.
    pub diagnostic: Option<String>,
}

fn dot(a: &[f64; N_VARS], b: &[f64; N_VARS]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Relative distance of `w` from the span of the orthonormal `basis`.
pub fn span_residual(basis: &[[f64; N_VARS]], w: &[f64; N_VARS]) -> f64 {
    let mut r = *w;
    for b in basis {
        let c = dot(b, w);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= c * bi;
        }
    }
    dot(&r, &r).sqrt() / dot(w, w).sqrt()
}

/// Angle between a vector and the all-ones direction.
pub fn angle_to_ones(v: &[f64; N_VARS]) -> f64 {
    let ones = [1.0 / (N_VARS as f64).sqrt(); N_VARS];
    let c = dot(v, &ones);
    let perp: f64 = v
        .iter()
        .map(|x| (x - c * ones[0]).powi(2))
        .sum::<f64>()
        .sqrt();
    perp.atan2(c.abs())
}

fn unit(idx: &[usize]) -> [f64; N_VARS] {
    let mut v = [0.0; N_VARS];
    for &i in idx {
        v[i] = 1.0;
    }
    v
}

fn spans(basis: &[[f64; N_VARS]], family: &[[f64; N_VARS]]) -> bool {
    basis.len() == family.len() && family.iter().all(|w| span_residual(basis, w) < 1e-8)
}

/// Tag a nullspace by the solution family it spans.
pub fn classify(sol: &SolutionBasis, eta0: f64, eta1: f64, cos2a: f64) -> SolutionClass {
    let b = &sol.basis;
    let ones = [1.0; N_VARS];
    let tag = if b.len() == 1 && angle_to_ones(&b[0]) < ALIGN_TOL {
        SolutionTag::Trivial
    } else if spans(b, &[ones, unit(&[var_index(0, 0, 0), var_index(0, 0, 1)])]) {
        SolutionTag::EqualEfficiencyFamily
    } else {
        let mut family: Vec<[f64; N_VARS]> = [(0, 0), (0, 1), (1, 0)]
            .iter()
            .map(|&(c0, c1)| unit(&[var_index(c0, c1, 0), var_index(c0, c1, 1)]))
            .collect();
        family.push(unit(&[var_index(1, 1, 0)]));
        family.push(unit(&[var_index(1, 1, 1)]));
        if spans(b, &family) {
            SolutionTag::IdenticalBasesFamily
        } else {
            SolutionTag::Other
        }
    };
    let expected = if cos2a == 1.0 {
        SolutionTag::IdenticalBasesFamily
    } else if eta0 == eta1 {
        SolutionTag::EqualEfficiencyFamily
    } else {
        SolutionTag::Trivial
    };
    let gap = (eta0 - eta1).abs();
    let near_degenerate =
        (gap > 0.0 && gap < NEAR_DEGENERATE) || (cos2a < 1.0 && 1.0 - cos2a < NEAR_DEGENERATE);
    let diagnostic = if tag == SolutionTag::Other {
        Some(format!(
            "UNEXPECTED SOLUTION SPACE: dim {} at eta0={eta0}, eta1={eta1}, cos2a={cos2a}; \
             the trivial strategy should be the only solution here",
            b.len()
        ))
    } else if tag != expected {
        Some(format!(
            "tag {} differs from the {} expected at eta0={eta0}, eta1={eta1}, cos2a={cos2a}{}",
            tag.as_str(),
            expected.as_str(),
            if near_degenerate {
                " (near-degenerate input)"
            } else {
                ""
            }
        ))
    } else {
        None
    };
    SolutionClass {
        tag,
        nullspace_dim: b.len(),
        basis_vectors: b.clone(),
        near_degenerate,
        diagnostic,
    }
}

/// Build, solve and classify in one step.
pub fn verify_point(eta0: f64, eta1: f64, cos2a: f64, tol: f64) -> Result<SolutionClass> {
    let sys = build_constraints(eta0, eta1, cos2a)?;
    let sol = solution_space(&sys, tol)?;
    Ok(classify(&sol, eta0, eta1, cos2a))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eta0: f64,
    pub eta1: f64,
    pub cos2a: f64,
    pub dim: usize,
    pub tag: SolutionTag,
    pub diagnostic: Option<String>,
}

/// Classify every point of the grid `eta0s × eta1s × cos2as`, in grid order.
pub fn sweep(eta0s: &[f64], eta1s: &[f64], cos2as: &[f64], tol: f64) -> Result<Vec<SweepRow>> {
    let points: Vec<(f64, f64, f64)> = eta0s
        .iter()
        .flat_map(|&a| {
            eta1s
                .iter()
                .flat_map(move |&b| cos2as.iter().map(move |&c| (a, b, c)))
        })
        .collect();
    points
        .par_iter()
        .map(|&(eta0, eta1, cos2a)| {
            let c = verify_point(eta0, eta1, cos2a, tol)?;
            Ok(SweepRow {
                eta0,
                eta1,
                cos2a,
                dim: c.nullspace_dim,
                tag: c.tag,
                diagnostic: c.diagnostic,
            })
        })
        .collect()
}
