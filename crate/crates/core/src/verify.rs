//! Equivalence suites between the generating-function path and the Fock oracle.

use serde::Serialize;

use crate::amplifier::{
    choose_m_max, mean_photons, photon_distribution, GainParams, LossChannel, Seed,
};
use crate::detection::{joint_stats, DetectionStats, ThresholdDetector};
use crate::error::{Error, Result};
use crate::oracle::{
    amplify_equatorial_photon, default_n_trunc, lossy_number_distribution,
    phase_covariance_check, superposition_detection, witness_oracle, DEFAULT_PHASE_N_TRUNC,
};
use crate::witness::witness_closed_form;

pub const EQUIVALENCE_TOL: f64 = 1e-10;
pub const EQUIVALENCE_M: usize = 100;
pub const NORMALIZATION_TOL: f64 = 1e-11;
pub const MEAN_REL_TOL: f64 = 1e-8;
pub const WITNESS_TOL: f64 = 1e-8;
pub const MIXTURE_TOL: f64 = 1e-9;
pub const PHASE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub error: Option<String>,
}

type CheckFn = Box<dyn Fn() -> Result<f64> + Send + Sync>;

struct Check {
    name: String,
    tolerance: f64,
    run: CheckFn,
}

fn check(name: impl Into<String>, tolerance: f64, run: impl Fn() -> Result<f64> + Send + Sync + 'static) -> Check {
    Check { name: name.into(), tolerance, run: Box::new(run) }
}

fn gain(g: f64) -> Result<GainParams> {
    GainParams::new(g)
}

/// Largest `|P_genfunc(m) - P_oracle(m)|` over both seeds and `m <= m_max`.
pub fn distribution_equivalence(g: f64, eta: f64, m_max: usize) -> Result<f64> {
    let (gain, loss) = (gain(g)?, LossChannel::new(eta)?);
    let n_trunc = default_n_trunc(gain).max(m_max);
    let mut worst = 0.0_f64;
    for seed in [Seed::Vacuum, Seed::Photon] {
        let fast = photon_distribution(seed, gain, loss, m_max)?;
        let oracle = lossy_number_distribution(gain, seed, eta, n_trunc)?;
        for (m, o) in oracle.iter().enumerate().take(m_max + 1) {
            worst = worst.max((fast.prob(m) - o).abs());
        }
    }
    Ok(worst)
}

/// Largest probability on the wrong parity at `eta = 1`.
pub fn parity_violation(g: f64, tail_tol: f64) -> Result<f64> {
    let (gain, loss) = (gain(g)?, LossChannel::lossless());
    let m = choose_m_max(gain, loss, tail_tol)?;
    let vac = photon_distribution(Seed::Vacuum, gain, loss, m)?;
    let one = photon_distribution(Seed::Photon, gain, loss, m)?;
    Ok((0..=m)
        .map(|k| if k % 2 == 1 { vac.prob(k).abs() } else { one.prob(k).abs() })
        .fold(0.0, f64::max))
}

/// `max |1 - sum P|` over both seeds at the `choose_m_max` truncation.
pub fn normalization_error(g: f64, eta: f64, tail_tol: f64) -> Result<f64> {
    let (gain, loss) = (gain(g)?, LossChannel::new(eta)?);
    let m = choose_m_max(gain, loss, tail_tol)?;
    [Seed::Vacuum, Seed::Photon].into_iter().try_fold(0.0_f64, |acc, seed| {
        Ok(acc.max((1.0 - photon_distribution(seed, gain, loss, m)?.total()).abs()))
    })
}

/// Largest relative gap between distribution means and the closed forms.
pub fn mean_error(g: f64, eta: f64) -> Result<f64> {
    let (gain, loss) = (gain(g)?, LossChannel::new(eta)?);
    let m = choose_m_max(gain, loss, 1e-12)?;
    [Seed::Vacuum, Seed::Photon].into_iter().try_fold(0.0_f64, |acc, seed| {
        let exact = mean_photons(seed, gain, loss);
        let got = photon_distribution(seed, gain, loss, m)?.mean();
        let rel = if exact == 0.0 { got.abs() } else { ((got - exact) / exact).abs() };
        Ok(acc.max(rel))
    })
}

/// Largest component gap between the closed-form and oracle witness reports.
pub fn witness_deviation(g: f64, eta: f64) -> Result<f64> {
    let (gain, loss) = (gain(g)?, LossChannel::new(eta)?);
    let closed = witness_closed_form(gain, loss);
    let oracle = witness_oracle(gain, loss, default_n_trunc(gain))?;
    Ok([
        closed.jz_sz - oracle.jz_sz,
        closed.jx_sx - oracle.jx_sx,
        closed.jy_sy - oracle.jy_sy,
        closed.n_a - oracle.n_a,
        closed.margin - oracle.margin,
    ]
    .iter()
    .fold(0.0, |a, d| a.max(d.abs())))
}

pub fn stats_gap(a: &DetectionStats, b: &DetectionStats) -> f64 {
    [a.p_yn - b.p_yn, a.p_ny - b.p_ny, a.p_yy - b.p_yy, a.p_nn - b.p_nn]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
}

/// Gap between the explicit superposition at `mix_angle` and the
/// `cos² |Phi> + sin² |Phi_perp>` mixture of generating-function statistics.
pub fn mixture_deviation(mix_angle: f64, g: f64) -> Result<f64> {
    let gain = gain(g)?;
    let det = ThresholdDetector::default();
    let oracle = superposition_detection(mix_angle, gain, &det, default_n_trunc(gain))?;
    let phi = joint_stats(gain, &det, 1.0, 1e-12)?;
    let mixture = phi.mix(&phi.mirrored(), mix_angle.cos().powi(2));
    Ok(stats_gap(&oracle, &mixture))
}

/// Gap between `joint_stats` and a product of single-mode oracle click probabilities.
pub fn joint_stats_deviation(g: f64) -> Result<f64> {
    let gain = gain(g)?;
    let det = ThresholdDetector::default();
    let n_trunc = default_n_trunc(gain);
    let yes = |seed| -> Result<f64> {
        let p = lossy_number_distribution(gain, seed, det.eta_eye(), n_trunc)?;
        Ok(1.0 - p.iter().take(det.theta() as usize).sum::<f64>())
    };
    let oracle =
        DetectionStats::from_click_probs(yes(Seed::Photon)?, yes(Seed::Vacuum)?, gain.total_mean_photons());
    Ok(stats_gap(&joint_stats(gain, &det, 1.0, 1e-12)?, &oracle))
}

/// Gap between the equatorial output distributions at two angles.
pub fn phase_pair_deviation(g: f64, phi_a: f64, phi_b: f64) -> Result<f64> {
    let gain = gain(g)?;
    let a = amplify_equatorial_photon(gain, phi_a, DEFAULT_PHASE_N_TRUNC)?;
    let b = amplify_equatorial_photon(gain, phi_b, DEFAULT_PHASE_N_TRUNC)?;
    Ok(a.max_abs_diff(&b))
}

fn suite(level: Level) -> Vec<Check> {
    let mut checks = Vec::new();
    let quick_points = [(0.25, 0.08), (0.25, 1.0), (0.5, 0.08), (0.5, 1.0)];
    for (g, eta) in quick_points {
        checks.push(check(format!("equivalence/g={g}/eta={eta}"), EQUIVALENCE_TOL, move || {
            distribution_equivalence(g, eta, EQUIVALENCE_M)
        }));
    }
    for g in [0.5, 1.0, 3.0] {
        checks.push(check(format!("parity/g={g}"), 0.0, move || parity_violation(g, 1e-9)));
    }
    for (g, eta) in [(0.0, 0.08), (1.0, 0.08), (2.0, 0.02), (4.0, 0.5), (4.0, 1.0)] {
        checks.push(check(format!("normalization/g={g}/eta={eta}"), NORMALIZATION_TOL, move || {
            normalization_error(g, eta, 1e-12)
        }));
    }
    if level == Level::Full {
        for (g, eta) in [(1.0, 0.08), (1.0, 0.5), (1.0, 1.0)] {
            checks.push(check(format!("equivalence/g={g}/eta={eta}"), EQUIVALENCE_TOL, move || {
                distribution_equivalence(g, eta, EQUIVALENCE_M)
            }));
        }
        for (g, eta) in [(0.5, 0.08), (1.0, 0.5), (2.0, 0.04)] {
            checks.push(check(format!("mean/g={g}/eta={eta}"), MEAN_REL_TOL, move || mean_error(g, eta)));
        }
        for (g, eta) in [(0.0, 1.0), (1.0, 0.08), (1.0, 0.5), (1.25, 0.5)] {
            checks.push(check(format!("witness/g={g}/eta={eta}"), WITNESS_TOL, move || {
                witness_deviation(g, eta)
            }));
        }
        for (label, angle) in [("0", 0.0), ("pi/4", std::f64::consts::FRAC_PI_4), ("pi/2", std::f64::consts::FRAC_PI_2)] {
            checks.push(check(format!("mixture/theta_b={label}/g=0.75"), MIXTURE_TOL, move || {
                mixture_deviation(angle, 0.75)
            }));
        }
        checks.push(check("joint-stats/g=1", EQUIVALENCE_TOL, || joint_stats_deviation(1.0)));
        for phi in [0.0, 1.1] {
            checks.push(check(format!("phase-covariance/g=0.3/phi={phi}"), PHASE_TOL, move || {
                phase_covariance_check(GainParams::new(0.3)?, phi, DEFAULT_PHASE_N_TRUNC)
            }));
        }
        checks.push(check("phase-covariance/g=0.3/phi=0-vs-1.1", PHASE_TOL, || {
            phase_pair_deviation(0.3, 0.0, 1.1)
        }));
    }
    checks
}

/// Names of the checks run at `level`.
pub fn check_names(level: Level) -> Vec<String> {
    suite(level).into_iter().map(|c| c.name).collect()
}

/// Runs every check at `level`. `inject_failure` forces the named check to fail
/// by giving it a negative tolerance; an unknown name is rejected up front.
pub fn run_verify(level: Level, inject_failure: Option<&str>) -> Result<Vec<CheckResult>> {
    use rayon::prelude::*;
    let mut checks = suite(level);
    if let Some(name) = inject_failure {
        let target = checks
            .iter_mut()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::invalid(format!("no check named {name:?} at this level")))?;
        target.tolerance = -1.0;
    }
    Ok(checks
        .par_iter()
        .map(|c| match (c.run)() {
            Ok(deviation) => CheckResult {
                name: c.name.clone(),
                deviation,
                tolerance: c.tolerance,
                passed: deviation <= c.tolerance,
                error: None,
            },
            Err(e) => CheckResult {
                name: c.name.clone(),
                deviation: f64::NAN,
                tolerance: c.tolerance,
                passed: false,
                error: Some(e.to_string()),
            },
        })
        .collect())
}
