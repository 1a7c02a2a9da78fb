//! CHSH analysis of the post-selected micro-macro experiment.
//!
//! Angles are azimuths on the equator of the Bloch sphere. Photon `b` is
//! measured by an ideal detector; the amplified side is read by two eyes and a
//! trial is conclusive when exactly one eye clicks. Because `|A0>` and `|A1>`
//! have disjoint photon-number parity, the heralded macro state acts on the eyes
//! as the classical mixture of `|Phi>` and `|Phi_perp>`, which gives the
//! conclusive-event correlator `E(delta) = -V cos(delta)`.
//!
//! Monte Carlo trials are drawn from [`ChaCha8Rng`] in fixed blocks of
//! [`BLOCK_TRIALS`]; block `k` uses the stream `k` of the generator seeded with
//! `rng_seed`, so results do not depend on how blocks are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::detection::DetectionStats;
use crate::error::{Error, Result};

pub const BLOCK_TRIALS: u64 = 1 << 16;

fn check_visibility(visibility: f64) -> Result<()> {
    if !(visibility.abs() <= 1.0) {
        return Err(Error::invalid(format!("visibility must lie in [-1, 1], got {visibility}")));
    }
    Ok(())
}

/// Conclusive-event correlator at relative equatorial angle `delta`.
pub fn correlation(delta: f64, visibility: f64) -> Result<f64> {
    check_visibility(visibility)?;
    Ok(-visibility * delta.cos())
}

/// CHSH value `2 sqrt(2) V` at the optimal equatorial settings.
pub fn chsh_value(visibility: f64) -> Result<f64> {
    check_visibility(visibility)?;
    Ok(2.0 * std::f64::consts::SQRT_2 * visibility)
}

/// Measurement angles for the two parties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshSettings {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Default for ChshSettings {
    /// `a in {0, pi/2}`, `b in {pi/4, -pi/4}`.
    fn default() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        Self { a: [0.0, FRAC_PI_2], b: [FRAC_PI_4, -FRAC_PI_4] }
    }
}

impl ChshSettings {
    /// `|E(a0,b0) + E(a0,b1) + E(a1,b0) - E(a1,b1)|` from the analytic correlator.
    pub fn analytic_value(&self, visibility: f64) -> Result<f64> {
        let mut e = [[0.0; 2]; 2];
        for (i, a) in self.a.iter().enumerate() {
            for (j, b) in self.b.iter().enumerate() {
                e[i][j] = correlation(a - b, visibility)?;
            }
        }
        Ok(chsh_combination(&e))
    }
}

fn chsh_combination(e: &[[f64; 2]; 2]) -> f64 {
    (e[0][0] + e[0][1] + e[1][0] - e[1][1]).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EyeResult {
    Plus,
    Minus,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhotonResult {
    Plus,
    Minus,
}

/// One simulated trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellOutcome {
    pub trial_id: u64,
    pub basis_a: f64,
    pub basis_b: f64,
    pub result_a: EyeResult,
    pub result_b: PhotonResult,
}

/// Draws one trial: a uniform setting pair, an unbiased `b` outcome, then the
/// eyes' response to the heralded mixture.
pub fn sample_trial<R: Rng>(
    rng: &mut R,
    trial_id: u64,
    stats: &DetectionStats,
    settings: &ChshSettings,
) -> BellOutcome {
    sample_indexed(rng, trial_id, stats, settings).1
}

// Setting pair index `2 i + j` for `(a_i, b_j)` alongside the outcome.
fn sample_indexed<R: Rng>(
    rng: &mut R,
    trial_id: u64,
    stats: &DetectionStats,
    settings: &ChshSettings,
) -> (usize, BellOutcome) {
    let pair = rng.random_range(0..4usize);
    let (basis_a, basis_b) = (settings.a[pair / 2], settings.b[pair % 2]);
    let b_plus = rng.random_bool(0.5);
    let r_b = if b_plus { 1.0 } else { -1.0 };
    // weight of |Phi> (the "+" state of a) in the heralded mixture
    let w = 0.5 * (1.0 - r_b * (basis_a - basis_b).cos());
    let p_plus = w * stats.p_yn + (1.0 - w) * stats.p_ny;
    let p_minus = w * stats.p_ny + (1.0 - w) * stats.p_yn;
    let u: f64 = rng.random();
    let result_a = if u < p_plus {
        EyeResult::Plus
    } else if u < p_plus + p_minus {
        EyeResult::Minus
    } else {
        EyeResult::Inconclusive
    };
    let outcome = BellOutcome {
        trial_id,
        basis_a,
        basis_b,
        result_a,
        result_b: if b_plus { PhotonResult::Plus } else { PhotonResult::Minus },
    };
    (pair, outcome)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Tally {
    // [pair][0 = equal signs, 1 = opposite signs]
    conclusive: [[u64; 2]; 4],
    trials: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for p in 0..4 {
            for s in 0..2 {
                self.conclusive[p][s] += other.conclusive[p][s];
            }
        }
        self.trials += other.trials;
        self
    }
}

/// Post-selected CHSH estimate from simulated trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshEstimate {
    /// `None` when some setting pair saw no conclusive trial.
    pub s: Option<f64>,
    pub std_error: Option<f64>,
    pub conclusive_rate: f64,
    pub n_trials: u64,
    pub n_conclusive: u64,
    /// `E(a_i, b_j)`, `None` for pairs without conclusive trials.
    pub correlators: [[Option<f64>; 2]; 2],
}

pub fn simulate_trials(
    n_trials: u64,
    stats: &DetectionStats,
    settings: &ChshSettings,
    rng_seed: u64,
) -> Result<ChshEstimate> {
    if n_trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let n_blocks = n_trials.div_ceil(BLOCK_TRIALS);
    let tally = (0..n_blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(block);
            let start = block * BLOCK_TRIALS;
            let end = (start + BLOCK_TRIALS).min(n_trials);
            let mut t = Tally { trials: end - start, ..Tally::default() };
            for id in start..end {
                let (pair, o) = sample_indexed(&mut rng, id, stats, settings);
                let r_a = match o.result_a {
                    EyeResult::Plus => true,
                    EyeResult::Minus => false,
                    EyeResult::Inconclusive => continue,
                };
                let r_b = o.result_b == PhotonResult::Plus;
                t.conclusive[pair][usize::from(r_a != r_b)] += 1;
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    Ok(estimate(&tally))
}

fn estimate(t: &Tally) -> ChshEstimate {
    let mut correlators = [[None; 2]; 2];
    let mut variance = 0.0;
    let mut n_conclusive = 0;
    for pair in 0..4 {
        let [same, diff] = t.conclusive[pair];
        let n = same + diff;
        n_conclusive += n;
        if n > 0 {
            let e = (same as f64 - diff as f64) / n as f64;
            variance += (1.0 - e * e) / n as f64;
            correlators[pair / 2][pair % 2] = Some(e);
        }
    }
    let all: Option<[[f64; 2]; 2]> = (|| {
        Some([
            [correlators[0][0]?, correlators[0][1]?],
            [correlators[1][0]?, correlators[1][1]?],
        ])
    })();
    ChshEstimate {
        s: all.as_ref().map(chsh_combination),
        std_error: all.map(|_| variance.sqrt()),
        conclusive_rate: n_conclusive as f64 / t.trials as f64,
        n_trials: t.trials,
        n_conclusive,
        correlators,
    }
}
