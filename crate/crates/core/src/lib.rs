//! Simulation of single-photon polarization qubits amplified by phase-covariant
//! cloning through stimulated emission, followed by photon loss and detection by
//! threshold ("human eye") detectors.
//!
//! The analytic path builds photon-number distributions as Taylor coefficients of
//! closed-form generating functions ([`series`], [`amplifier`]) and turns them into
//! two-eye click statistics ([`detection`]), Bell/CHSH estimates ([`bell`]) and a
//! micro-macro separability witness ([`witness`]). Every analytic result has a
//! brute-force counterpart in the truncated Fock-space [`oracle`], and [`verify`]
//! runs the equivalence suites between the two.

pub mod amplifier;
pub mod bell;
pub mod cli;
pub mod detection;
mod error;
pub mod oracle;
pub mod series;
pub mod verify;
pub mod witness;

pub use amplifier::{
    build_bundle, choose_m_max, choose_m_max_capped, mean_photons, photon_distribution,
    GainParams, GeneratingBundle, LossChannel, PhotonNumberDistribution, Seed,
    DEFAULT_M_MAX_CAP,
};
pub use bell::{chsh_value, correlation, simulate_trials, ChshEstimate, ChshSettings};
pub use detection::{
    compose_transmission, joint_stats, prob_no, prob_yes, DetectionStats, ThresholdDetector,
};
pub use error::{Error, Result};
pub use series::{mul_by_linear, poly_power, TruncatedPowerSeries};
pub use witness::{witness_closed_form, WitnessReport};
