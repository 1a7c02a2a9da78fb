//! The eye as an ideal threshold detector behind a lossy channel, and the
//! two-eye statistics of the amplified qubit `|Phi> = |A1>|A0>_perp`.
//!
//! Only `|Phi>` is computed. `|Phi_perp> = |A0>|A1>_perp` gives the mirrored
//! statistics (`p_yn <-> p_ny`, see [`DetectionStats::mirrored`]), so efficiency
//! is the same for both inputs and visibility flips sign.

use serde::Serialize;

use crate::amplifier::{
    choose_m_max, photon_distribution, GainParams, LossChannel, PhotonNumberDistribution, Seed,
};
use crate::error::{Error, Result};

/// Efficiencies below this leave visibility undefined.
pub const MIN_CONCLUSIVE: f64 = 1e-15;

/// Clicks iff at least `theta` photons survive a loss of transmission `eta_eye`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdDetector {
    theta: u32,
    eta_eye: f64,
}

impl Default for ThresholdDetector {
    fn default() -> Self {
        Self { theta: 7, eta_eye: 0.08 }
    }
}

impl ThresholdDetector {
    pub fn new(theta: u32, eta_eye: f64) -> Result<Self> {
        if theta < 1 {
            return Err(Error::invalid("threshold must be at least one photon"));
        }
        LossChannel::new(eta_eye)?;
        Ok(Self { theta, eta_eye })
    }

    pub fn theta(&self) -> u32 {
        self.theta
    }

    pub fn eta_eye(&self) -> f64 {
        self.eta_eye
    }
}

/// `1 - sum_{m < theta} P(m)`, clamped to `[0, 1]`.
pub fn prob_yes(dist: &PhotonNumberDistribution, theta: u32) -> Result<f64> {
    Ok((1.0 - prob_no(dist, theta)?).clamp(0.0, 1.0))
}

/// `sum_{m < theta} P(m)`, clamped to `[0, 1]`.
pub fn prob_no(dist: &PhotonNumberDistribution, theta: u32) -> Result<f64> {
    Ok(dist.head_sum(theta as usize)?.clamp(0.0, 1.0))
}

/// Joint outcome probabilities of the two eyes (mode `a`, mode `a_perp`) for the
/// input `|Phi>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionStats {
    pub p_yn: f64,
    pub p_ny: f64,
    pub p_yy: f64,
    pub p_nn: f64,
    /// `p_yn + p_ny`.
    pub epsilon: f64,
    /// `(p_yn - p_ny) / epsilon`, `None` when `epsilon < 1e-15`.
    pub visibility: Option<f64>,
    /// `<N_a> = 4 sinh²g + 1` before loss.
    pub mean_n: f64,
}

impl DetectionStats {
    pub fn from_joint(p_yn: f64, p_ny: f64, p_yy: f64, p_nn: f64, mean_n: f64) -> Self {
        let epsilon = p_yn + p_ny;
        let visibility = (epsilon >= MIN_CONCLUSIVE).then(|| (p_yn - p_ny) / epsilon);
        Self { p_yn, p_ny, p_yy, p_nn, epsilon, visibility, mean_n }
    }

    /// Product statistics of independent eyes with click probabilities
    /// `yes_a` (mode carrying `|A1>`) and `yes_perp` (mode carrying `|A0>`).
    pub fn from_click_probs(yes_a: f64, yes_perp: f64, mean_n: f64) -> Self {
        let (no_a, no_perp) = (1.0 - yes_a, 1.0 - yes_perp);
        Self::from_joint(yes_a * no_perp, no_a * yes_perp, yes_a * yes_perp, no_a * no_perp, mean_n)
    }

    /// Statistics for `|Phi_perp>`.
    pub fn mirrored(&self) -> Self {
        Self::from_joint(self.p_ny, self.p_yn, self.p_yy, self.p_nn, self.mean_n)
    }

    pub fn total(&self) -> f64 {
        self.p_yn + self.p_ny + self.p_yy + self.p_nn
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &Self, weight: f64) -> Self {
        let w = |a: f64, b: f64| weight * a + (1.0 - weight) * b;
        Self::from_joint(
            w(self.p_yn, other.p_yn),
            w(self.p_ny, other.p_ny),
            w(self.p_yy, other.p_yy),
            w(self.p_nn, other.p_nn),
            w(self.mean_n, other.mean_n),
        )
    }
}

/// Two-eye statistics of `|Phi>` at gain `g`, with an additional transmission
/// `extra_transmission` in front of both eyes.
pub fn joint_stats(
    gain: GainParams,
    detector: &ThresholdDetector,
    extra_transmission: f64,
    tail_tol: f64,
) -> Result<DetectionStats> {
    let eta_total = compose_transmission(&[detector.eta_eye(), extra_transmission])?;
    let loss = LossChannel::new(eta_total)?;
    let m_max = choose_m_max(gain, loss, tail_tol)?.max(detector.theta() as usize);
    let photon = photon_distribution(Seed::Photon, gain, loss, m_max)?;
    let vacuum = photon_distribution(Seed::Vacuum, gain, loss, m_max)?;
    Ok(DetectionStats::from_click_probs(
        prob_yes(&photon, detector.theta())?,
        prob_yes(&vacuum, detector.theta())?,
        gain.total_mean_photons(),
    ))
}

/// Product of transmissions in sequence.
pub fn compose_transmission(etas: &[f64]) -> Result<f64> {
    if etas.is_empty() {
        return Err(Error::invalid("no transmissions to compose"));
    }
    etas.iter().try_fold(1.0, |acc, &eta| Ok(acc * LossChannel::new(eta)?.eta()))
}
