//! Multiphoton attacks on quantum location-oblivious and coin-flipping
//! protocols with imperfect threshold detectors.
//!
//! Alice sends pulses; Bob measures each in a secret basis `β` on a pair
//! (or quad) of threshold detectors and reports `m ∈ {0, 1}`. Any dependence
//! of `P(m = 1)` on `β` leaks the basis to a multiphoton Alice. This crate
//! provides:
//!
//! - [`optics`]: exact detection-event probabilities for Fock and coherent
//!   pulses on two imperfect detectors;
//! - [`reporting`]: reporting strategies and their report probabilities;
//! - [`attacks`]: closed-form attack calculators;
//! - [`bounds`]: caps on the basis dependence and their composition;
//! - [`theorem`]: the constraint system that forces trivial strategies;
//! - [`setup_two`]: the four-detector receiver;
//! - [`montecarlo`]: a photon-level simulator and protocol harness.

pub mod attacks;
pub mod bounds;
pub mod error;
pub mod montecarlo;
pub mod optics;
pub mod reporting;
pub mod setup_two;
pub mod theorem;

pub use error::{Error, Result};
pub use montecarlo::{Estimate, PulseRecord, Transcript};
pub use optics::{BasisPair, BasisStatus, DetectorPair, EventDistribution, PulseSpec, QubitState};
pub use reporting::ReportingStrategy;
pub use setup_two::DetectorQuad;
pub use theorem::{SolutionClass, SolutionTag};
