//! Efficiency/visibility sweeps over the amplifier gain.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use super::output::Format;
use crate::amplifier::GainParams;
use crate::detection::{compose_transmission, joint_stats, DetectionStats, ThresholdDetector};
use crate::error::{Error, Result};

/// Sweep abscissa: explicit gains, or a geometric grid over `<N_a>`.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Gains(Vec<f64>),
    MeanPhotons { min: f64, max: f64, count: usize },
}

impl Default for Grid {
    /// 200 points, geometric in `<N_a>` from 2 to 2e4.
    fn default() -> Self {
        Grid::MeanPhotons { min: 2.0, max: 2e4, count: 200 }
    }
}

impl Grid {
    pub fn gains(&self) -> Result<Vec<GainParams>> {
        match self {
            Grid::Gains(gs) => {
                if gs.is_empty() {
                    return Err(Error::invalid("gain list is empty"));
                }
                gs.iter().map(|&g| GainParams::new(g)).collect()
            }
            &Grid::MeanPhotons { min, max, count } => {
                if count == 0 || !(min >= 1.0) || !(max >= min) || !max.is_finite() {
                    return Err(Error::invalid(format!(
                        "grid needs 1 <= min <= max and count >= 1, got {min}..{max} x {count}"
                    )));
                }
                if count == 1 {
                    return Ok(vec![GainParams::from_total_mean_photons(min)?]);
                }
                let ratio = (max / min).ln() / (count - 1) as f64;
                (0..count)
                    .map(|i| {
                        let n = if i == count - 1 { max } else { min * (ratio * i as f64).exp() };
                        GainParams::from_total_mean_photons(n)
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub grid: Grid,
    pub theta: u32,
    pub eta_eye: f64,
    /// Extra transmission in front of the eye; one curve per entry.
    pub extra_transmissions: Vec<f64>,
    pub tail_tol: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: Grid::default(),
            theta: 7,
            eta_eye: 0.08,
            extra_transmissions: vec![1.0, 0.5, 0.25],
            tail_tol: 1e-12,
            format: Format::Csv,
            output: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.gains()?;
        ThresholdDetector::new(self.theta, self.eta_eye)?;
        if self.extra_transmissions.is_empty() {
            return Err(Error::invalid("no transmissions to sweep"));
        }
        for &t in &self.extra_transmissions {
            compose_transmission(&[t])?;
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::invalid("tail tolerance must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub g: f64,
    pub n_mean: f64,
    pub epsilon: f64,
    pub visibility: Option<f64>,
    pub p_yn: f64,
    pub p_ny: f64,
    pub p_yy: f64,
    pub p_nn: f64,
    pub eta_total: f64,
}

impl SweepRow {
    fn new(gain: GainParams, eta_total: f64, s: &DetectionStats) -> Self {
        Self {
            g: gain.g(),
            n_mean: s.mean_n,
            epsilon: s.epsilon,
            visibility: s.visibility,
            p_yn: s.p_yn,
            p_ny: s.p_ny,
            p_yy: s.p_yy,
            p_nn: s.p_nn,
            eta_total,
        }
    }
}

/// Efficiency maximum of one transmission curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakSummary {
    pub extra_transmission: f64,
    pub eta_total: f64,
    pub epsilon_max: f64,
    pub n_mean_at_max: f64,
    pub g_at_max: f64,
    pub visibility_at_max: Option<f64>,
    /// Smallest defined visibility on the grid.
    pub visibility_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<PeakSummary>,
}

pub const CSV_HEADER: [&str; 9] =
    ["g", "N_mean", "epsilon", "V", "p_yn", "p_ny", "p_yy", "p_nn", "eta_total"];

/// Rows in grid order for each transmission in turn, plus one peak summary per
/// transmission refined by golden-section search around the best grid point.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let gains = config.grid.gains()?;
    let detector = ThresholdDetector::new(config.theta, config.eta_eye)?;

    let jobs: Vec<(f64, GainParams)> = config
        .extra_transmissions
        .iter()
        .flat_map(|&t| gains.iter().map(move |&g| (t, g)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(t, g)| {
            let stats = joint_stats(g, &detector, t, config.tail_tol)?;
            Ok(SweepRow::new(g, config.eta_eye * t, &stats))
        })
        .collect::<Result<Vec<_>>>()?;

    let summary = config
        .extra_transmissions
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let curve = &rows[k * gains.len()..(k + 1) * gains.len()];
            refine_peak(curve, &detector, t, config.tail_tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { rows, summary })
}

fn refine_peak(
    curve: &[SweepRow],
    detector: &ThresholdDetector,
    extra: f64,
    tail_tol: f64,
) -> Result<PeakSummary> {
    let best = curve
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if r.epsilon > curve[b].epsilon { i } else { b });
    let visibility_min = curve.iter().filter_map(|r| r.visibility).reduce(f64::min);
    let row = &curve[best];
    let mut peak = PeakSummary {
        extra_transmission: extra,
        eta_total: row.eta_total,
        epsilon_max: row.epsilon,
        n_mean_at_max: row.n_mean,
        g_at_max: row.g,
        visibility_at_max: row.visibility,
        visibility_min,
    };
    if curve.len() < 2 || row.epsilon == 0.0 {
        return Ok(peak);
    }

    // golden-section search in g over the neighbouring grid interval
    let lo = curve[best.saturating_sub(1)].g;
    let hi = curve[(best + 1).min(curve.len() - 1)].g;
    let eval = |g: f64| -> Result<DetectionStats> {
        joint_stats(GainParams::new(g)?, detector, extra, tail_tol)
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c)?.epsilon, eval(d)?.epsilon);
    while (b - a) > 1e-9 * b.max(1e-9) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?.epsilon;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?.epsilon;
        }
    }
    let g = 0.5 * (a + b);
    let stats = eval(g)?;
    if stats.epsilon > peak.epsilon_max {
        peak.epsilon_max = stats.epsilon;
        peak.n_mean_at_max = stats.mean_n;
        peak.g_at_max = g;
        peak.visibility_at_max = stats.visibility;
    }
    Ok(peak)
}
