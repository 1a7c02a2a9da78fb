//! Photon statistics of amplified vacuum and amplified single photons after loss.
//!
//! The amplifier `U = exp(g/2 (a†² - a²))` maps the seeds `|0>` and `|1>` to the
//! squeezed vacuum `|A0>` and squeezed photon `|A1>`. After a beamsplitter loss of
//! transmission `eta` the photon-number generating functions are
//!
//! ```text
//! X0(z) = (1 - eta + eta z)^-1
//! X(z)  = X0 cosh²g - sinh²g / X0
//! Y(z)  = X / X0 = cosh²g - sinh²g (1 - eta + eta z)²
//! G0(z) = Y^-1/2                       (seed |0>)
//! G1(z) = Y^-1/2 X^-1 = (1 - eta + eta z) Y^-3/2   (seed |1>)
//! ```
//!
//! and `P(m)` is the coefficient of `z^m`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{compensated_sum, mul_by_linear, poly_power, TruncatedPowerSeries};

/// Default ceiling for [`choose_m_max`].
pub const DEFAULT_M_MAX_CAP: usize = 2_000_000;

/// Round-off below this magnitude is read back as zero probability.
const NEGATIVE_ROUNDOFF: f64 = 1e-14;

/// Tail mass above which the reported mean is flagged as truncated.
const MEAN_TAIL_FLAG: f64 = 1e-9;

/// Amplification gain `g = chi * t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainParams {
    g: f64,
}

impl GainParams {
    pub fn new(g: f64) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::invalid(format!("gain must be finite and >= 0, got {g}")));
        }
        Ok(Self { g })
    }

    /// Gain producing a total mean photon number `<N_a> = 4 sinh²g + 1` summed over
    /// both polarization modes, before loss.
    pub fn from_total_mean_photons(n_a: f64) -> Result<Self> {
        if !(n_a.is_finite() && n_a >= 1.0) {
            return Err(Error::invalid(format!("<N_a> must be >= 1, got {n_a}")));
        }
        Self::new(((n_a - 1.0) / 4.0).sqrt().asinh())
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn sinh2(&self) -> f64 {
        self.g.sinh().powi(2)
    }

    pub fn cosh2(&self) -> f64 {
        self.g.cosh().powi(2)
    }

    pub fn tanh(&self) -> f64 {
        self.g.tanh()
    }

    /// `<N_a> = 4 sinh²g + 1`.
    pub fn total_mean_photons(&self) -> f64 {
        4.0 * self.sinh2() + 1.0
    }
}

/// Beamsplitter loss with transmission `eta = cos²(gamma)` into an empty mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossChannel {
    eta: f64,
}

impl LossChannel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::invalid(format!("transmission must lie in (0, 1], got {eta}")));
        }
        Ok(Self { eta })
    }

    /// From the beamsplitter mixing angle, `eta = cos²(gamma)`.
    pub fn from_angle(gamma: f64) -> Result<Self> {
        Self::new(gamma.cos().powi(2))
    }

    pub fn lossless() -> Self {
        Self { eta: 1.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Two losses in sequence.
    pub fn then(&self, other: &LossChannel) -> LossChannel {
        LossChannel { eta: self.eta * other.eta }
    }
}

/// Photon number fed into the amplifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Seed {
    /// `|0>`, amplified to the squeezed vacuum `|A0>`.
    Vacuum,
    /// `|1>`, amplified to the squeezed photon `|A1>`.
    Photon,
}

impl Seed {
    pub fn from_index(n: u8) -> Result<Self> {
        match n {
            0 => Ok(Seed::Vacuum),
            1 => Ok(Seed::Photon),
            _ => Err(Error::invalid(format!("seed must be 0 or 1, got {n}"))),
        }
    }

    pub fn index(&self) -> u8 {
        match self {
            Seed::Vacuum => 0,
            Seed::Photon => 1,
        }
    }
}

/// Generating functions for one `(g, eta)` pair. Only `Y` is numerically
/// needed; `X0`, `X` and `Z` are kept as symbolic records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratingBundle {
    /// Coefficients of `Y(z)` in increasing powers of `z`.
    pub y_poly: [f64; 3],
    pub g: f64,
    pub eta: f64,
    pub x0_def: &'static str,
    pub x_def: &'static str,
    pub z_def: &'static str,
}

impl GeneratingBundle {
    pub fn y_at(&self, z: f64) -> f64 {
        let [c0, c1, c2] = self.y_poly;
        c0 + z * (c1 + z * c2)
    }
}

pub fn build_bundle(gain: GainParams, loss: LossChannel) -> GeneratingBundle {
    let (s2, eta) = (gain.sinh2(), loss.eta());
    let r = 1.0 - eta;
    GeneratingBundle {
        // cosh²g - sinh²g (r + eta z)², expanded with cosh²g = 1 + sinh²g applied
        // symbolically so the coefficients sum to one up to a single rounding;
        // forming cosh²g - sinh²g numerically leaves an O(eps sinh²g) error in Y(1)
        // that caps how well the distributions can normalize at high gain
        y_poly: [1.0 + eta * s2 * (1.0 + r), -2.0 * eta * r * s2, -eta * eta * s2],
        g: gain.g(),
        eta,
        x0_def: "X0(z) = (1 - eta + eta z)^-1",
        x_def: "X(z) = X0 cosh^2 g - sinh^2 g / X0",
        z_def: "Z(z) = 1/2 dX/dg",
    }
}

/// Taylor coefficients of the seed's generating function up to `z^m_max`.
pub(crate) fn generating_series(
    seed: Seed,
    gain: GainParams,
    loss: LossChannel,
    m_max: usize,
) -> Result<TruncatedPowerSeries> {
    let bundle = build_bundle(gain, loss);
    match seed {
        Seed::Vacuum => poly_power(&bundle.y_poly, -0.5, m_max),
        Seed::Photon => {
            let y = poly_power(&bundle.y_poly, -1.5, m_max)?;
            Ok(mul_by_linear(&y, 1.0 - loss.eta(), loss.eta()))
        }
    }
}

/// `P(0..=m_max)` of a lossy amplified seed, with the omitted tail mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhotonNumberDistribution {
    probs: Vec<f64>,
    tail_bound: f64,
    mean: f64,
    mean_truncated: bool,
    g: f64,
    eta: f64,
    seed: Seed,
}

impl PhotonNumberDistribution {
    pub(crate) fn from_raw(probs: Vec<f64>, g: f64, eta: f64, seed: Seed) -> Self {
        let total = compensated_sum(probs.iter().copied());
        let tail_bound = (1.0 - total).max(0.0);
        let head_mean = compensated_sum(probs.iter().enumerate().map(|(m, p)| m as f64 * p));
        // omitted mass sits at m > m_max, so this correction is a lower bound
        let mean = head_mean + tail_bound * probs.len() as f64;
        Self {
            probs,
            tail_bound,
            mean,
            mean_truncated: tail_bound > MEAN_TAIL_FLAG,
            g,
            eta,
            seed,
        }
    }

    /// Largest stored photon number.
    pub fn m_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// `P(m)`, with sub-`1e-14` negative round-off read as zero. Zero past `m_max`.
    pub fn prob(&self, m: usize) -> f64 {
        match self.probs.get(m) {
            Some(&p) if p < 0.0 && p > -NEGATIVE_ROUNDOFF => 0.0,
            Some(&p) => p,
            None => 0.0,
        }
    }

    /// Stored coefficients without the read-time clamp.
    pub fn raw_probs(&self) -> &[f64] {
        &self.probs
    }

    /// Clamped probabilities for `m = 0..=m_max`.
    pub fn probs(&self) -> Vec<f64> {
        (0..self.probs.len()).map(|m| self.prob(m)).collect()
    }

    /// `1 - sum P(m)`, clamped at zero.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `sum m P(m)` plus `tail_bound * (m_max + 1)`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Set when the tail is heavy enough (> 1e-9) that [`Self::mean`] is unreliable.
    pub fn mean_truncated(&self) -> bool {
        self.mean_truncated
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.probs.iter().copied())
    }

    /// `sum_{m < k} P(m)`.
    pub fn head_sum(&self, k: usize) -> Result<f64> {
        if k > self.probs.len() {
            return Err(Error::DistributionTooShort { needed: k - 1, available: self.m_max() });
        }
        Ok(compensated_sum((0..k).map(|m| self.prob(m))))
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }
}

pub fn photon_distribution(
    seed: Seed,
    gain: GainParams,
    loss: LossChannel,
    m_max: usize,
) -> Result<PhotonNumberDistribution> {
    let series = generating_series(seed, gain, loss, m_max)?;
    Ok(PhotonNumberDistribution::from_raw(series.into_coeffs(), gain.g(), loss.eta(), seed))
}

/// Closed-form mean photon number after loss: `eta sinh²g` for the vacuum seed,
/// `eta (3 sinh²g + 1)` for the photon seed.
pub fn mean_photons(seed: Seed, gain: GainParams, loss: LossChannel) -> f64 {
    let s2 = gain.sinh2();
    match seed {
        Seed::Vacuum => loss.eta() * s2,
        Seed::Photon => loss.eta() * (3.0 * s2 + 1.0),
    }
}

/// [`choose_m_max_capped`] with [`DEFAULT_M_MAX_CAP`].
pub fn choose_m_max(gain: GainParams, loss: LossChannel, tail_tol: f64) -> Result<usize> {
    choose_m_max_capped(gain, loss, tail_tol, DEFAULT_M_MAX_CAP)
}

/// Smallest doubling of `8 (mean + 1) + 64` at which both seed distributions have
/// a trailing window of 32 coefficients below `tail_tol / m_max` and a cumulative
/// sum above `1 - tail_tol`.
pub fn choose_m_max_capped(
    gain: GainParams,
    loss: LossChannel,
    tail_tol: f64,
    cap: usize,
) -> Result<usize> {
    const WINDOW: usize = 32;
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::invalid(format!("tail tolerance must lie in (0, 1), got {tail_tol}")));
    }
    let mean = mean_photons(Seed::Photon, gain, loss);
    let guess = (8.0 * (mean + 1.0)).ceil() + 64.0;
    if !(guess <= cap as f64) {
        let reached = if guess.is_finite() { guess as usize } else { usize::MAX };
        return Err(Error::TruncationCap { reached, cap });
    }
    let mut m_max = guess as usize;
    loop {
        if m_max > cap {
            return Err(Error::TruncationCap { reached: m_max, cap });
        }
        let converged = [Seed::Vacuum, Seed::Photon].into_iter().try_fold(true, |ok, seed| {
            let s = generating_series(seed, gain, loss, m_max)?;
            let c = s.coeffs();
            let window_max = c[c.len() - WINDOW..].iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
            Ok::<_, Error>(ok && window_max < tail_tol / m_max as f64 && s.total() > 1.0 - tail_tol)
        })?;
        if converged {
            return Ok(m_max);
        }
        m_max = m_max.saturating_mul(2);
    }
}
