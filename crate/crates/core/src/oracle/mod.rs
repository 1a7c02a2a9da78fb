//! Brute-force truncated Fock-space reference computations.
//!
//! Nothing here touches the generating-function path: states are built by
//! applying the normal-ordered amplifier to Fock vectors, loss is an explicit
//! binomial kernel, and two-mode quantities are summed over explicit amplitude
//! arrays. Everything is slow and memory-hungry by design of the method; two-mode
//! routines hold `O(n_trunc²)` amplitudes.

mod phase;
mod two_mode;

use num_complex::Complex64;

use crate::amplifier::{GainParams, PhotonNumberDistribution, Seed};
use crate::error::{Error, Result};
use crate::series::compensated_sum;

pub use phase::{
    amplify_equatorial_photon, phase_covariance_check, JointNumberDistribution,
    DEFAULT_PHASE_N_TRUNC,
};
pub use two_mode::{superposition_detection, witness_oracle};

/// A single-mode state above this truncation loss is rejected.
pub const MAX_TRUNCATION_LOSS: f64 = 1e-9;

/// Truncated single-mode state `sum_n c_n |n>`, `n = 0..=n_trunc`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
    truncation_loss: f64,
}

impl FockVector {
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn n_trunc(&self) -> usize {
        self.amps.len() - 1
    }

    /// Norm missing from the truncated vector, `1 - sum |c_n|²` (the full state is
    /// normalized).
    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    pub fn number_distribution(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn mean_photons(&self) -> f64 {
        compensated_sum(self.amps.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()))
    }
}

/// Truncation large enough for `|A0>` and `|A1>` at this gain: the larger of
/// `max(64, 12 (3 sinh²g + 1))` and the size at which `tanh(g)^n` drops below
/// `1e-16`, plus a margin.
pub fn default_n_trunc(gain: GainParams) -> usize {
    let by_mean = (12.0 * (3.0 * gain.sinh2() + 1.0)).ceil() as usize;
    let t = gain.tanh();
    let by_decay = if t > 0.0 { (1e-16f64.ln() / t.ln()).ceil() as usize + 16 } else { 0 };
    64.max(by_mean).max(by_decay)
}

/// `U |n0>` with `U = exp(tanh g a†²/2) exp(-ln cosh g (a†a + 1/2)) exp(-tanh g a²/2)`,
/// each factor applied as its operator series on the truncated vector.
pub fn squeezed_number_state(gain: GainParams, seed: Seed, n_trunc: usize) -> Result<FockVector> {
    if n_trunc < 1 {
        return Err(Error::invalid("Fock truncation must hold at least |0> and |1>"));
    }
    let t = gain.tanh();
    let ln_cosh = gain.g().cosh().ln();

    let mut v = vec![0.0; n_trunc + 1];
    v[seed.index() as usize] = 1.0;
    v = exp_series(&v, -0.5 * t, lower_twice);
    for (n, c) in v.iter_mut().enumerate() {
        *c *= (-ln_cosh * (n as f64 + 0.5)).exp();
    }
    v = exp_series(&v, 0.5 * t, raise_twice);

    let norm = compensated_sum(v.iter().map(|c| c * c));
    let truncation_loss = (1.0 - norm).max(0.0);
    if truncation_loss > MAX_TRUNCATION_LOSS {
        return Err(Error::TruncationLoss { n_trunc, loss: truncation_loss, limit: MAX_TRUNCATION_LOSS });
    }
    Ok(FockVector { amps: v.into_iter().map(Complex64::from).collect(), truncation_loss })
}

// exp(scale * op) v, summed until the terms vanish (both operators are nilpotent
// on a truncated space).
fn exp_series(v: &[f64], scale: f64, op: fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let mut acc = v.to_vec();
    let mut term = v.to_vec();
    for k in 1.. {
        term = op(&term);
        let f = scale / k as f64;
        term.iter_mut().for_each(|x| *x *= f);
        if term.iter().all(|&x| x == 0.0) {
            break;
        }
        acc.iter_mut().zip(&term).for_each(|(a, t)| *a += t);
    }
    acc
}

// (a² v)(n) = sqrt((n+1)(n+2)) v(n+2)
fn lower_twice(v: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|n| v.get(n + 2).map_or(0.0, |x| (((n + 1) * (n + 2)) as f64).sqrt() * x))
        .collect()
}

// (a†² v)(n) = sqrt(n(n-1)) v(n-2); components pushed past the truncation are dropped
fn raise_twice(v: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|n| if n >= 2 { ((n * (n - 1)) as f64).sqrt() * v[n - 2] } else { 0.0 })
        .collect()
}

/// `ln n!` for `n = 0..=n_max` by compensated cumulative sums of `ln k`.
#[derive(Debug, Clone)]
pub(crate) struct LnFactorial(Vec<f64>);

impl LnFactorial {
    pub(crate) fn new(n_max: usize) -> Self {
        let mut table = Vec::with_capacity(n_max + 1);
        table.push(0.0);
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for k in 1..=n_max {
            let x = (k as f64).ln();
            let t = sum + x;
            carry += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
            sum = t;
            table.push(sum + carry);
        }
        Self(table)
    }

    pub(crate) fn get(&self, n: usize) -> f64 {
        self.0[n]
    }

    pub(crate) fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        self.0[n] - self.0[k] - self.0[n - k]
    }
}

/// Row-stochastic loss kernel: `kernel[n][m] = C(n, m) eta^m (1 - eta)^(n - m)`.
pub(crate) fn loss_kernel(n_max: usize, eta: f64) -> Vec<Vec<f64>> {
    let lf = LnFactorial::new(n_max);
    (0..=n_max)
        .map(|n| {
            (0..=n)
                .map(|m| binomial_term(&lf, n, m, eta))
                .collect()
        })
        .collect()
}

fn binomial_term(lf: &LnFactorial, n: usize, m: usize, eta: f64) -> f64 {
    if eta == 1.0 {
        return if m == n { 1.0 } else { 0.0 };
    }
    let ln = lf.ln_binomial(n, m) + m as f64 * eta.ln() + (n - m) as f64 * (1.0 - eta).ln();
    ln.exp()
}

/// Photon counts after a beamsplitter of transmission `eta` whose other port is
/// traced out: `P_out(m) = sum_{n >= m} P_in(n) C(n, m) eta^m (1 - eta)^(n - m)`.
pub fn binomial_loss(p_in: &[f64], eta: f64) -> Result<Vec<f64>> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::invalid(format!("transmission must lie in (0, 1], got {eta}")));
    }
    if eta == 1.0 {
        return Ok(p_in.to_vec());
    }
    let n_max = p_in.len().saturating_sub(1);
    let lf = LnFactorial::new(n_max);
    let mut out = vec![0.0; p_in.len()];
    let mut row = Vec::with_capacity(p_in.len());
    for (n, &p) in p_in.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        row.clear();
        row.extend((0..=n).map(|m| binomial_term(&lf, n, m, eta)));
        // each row sums to one exactly; renormalizing removes the few-ulp drift
        // of ln n! at large n
        let w = p / compensated_sum(row.iter().copied());
        for (o, b) in out.iter_mut().zip(&row) {
            *o += w * b;
        }
    }
    Ok(out)
}

/// [`binomial_loss`] applied to a distribution, keeping its provenance with the
/// composed transmission.
pub fn apply_loss(dist: &PhotonNumberDistribution, eta: f64) -> Result<PhotonNumberDistribution> {
    let out = binomial_loss(&dist.probs(), eta)?;
    Ok(PhotonNumberDistribution::from_raw(out, dist.g(), dist.eta() * eta, dist.seed()))
}

/// Number distribution of `U |n0>` after loss `eta`, from the oracle path.
pub fn lossy_number_distribution(
    gain: GainParams,
    seed: Seed,
    eta: f64,
    n_trunc: usize,
) -> Result<Vec<f64>> {
    let state = squeezed_number_state(gain, seed, n_trunc)?;
    binomial_loss(&state.number_distribution(), eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn gain(g: f64) -> GainParams {
        GainParams::new(g).unwrap()
    }

    #[test]
    fn no_gain_is_identity() {
        let v = squeezed_number_state(gain(0.0), Seed::Vacuum, 10).unwrap();
        assert_eq!(v.amps()[0], Complex64::new(1.0, 0.0));
        assert!(v.amps()[1..].iter().all(|c| *c == Complex64::new(0.0, 0.0)));
        let v = squeezed_number_state(gain(0.0), Seed::Photon, 10).unwrap();
        assert_eq!(v.number_distribution()[1], 1.0);
    }

    #[test]
    fn amplitudes_match_closed_form() {
        // c_{2n} = tanh^n sqrt((2n)!) / (2^n n!) / sqrt(cosh), odd analogue with cosh^{3/2}
        let g = gain(0.8);
        let (t, ch) = (g.tanh(), g.g().cosh());
        let lf = LnFactorial::new(200);
        let vac = squeezed_number_state(g, Seed::Vacuum, 120).unwrap();
        let one = squeezed_number_state(g, Seed::Photon, 120).unwrap();
        for n in 0..60 {
            let ln_common = n as f64 * t.ln() - n as f64 * 2f64.ln() - lf.get(n);
            let c_even = (ln_common + 0.5 * lf.get(2 * n)).exp() / ch.sqrt();
            let c_odd = (ln_common + 0.5 * lf.get(2 * n + 1)).exp() / ch.powf(1.5);
            assert_abs_diff_eq!(vac.amps()[2 * n].re, c_even, epsilon = 1e-14);
            assert_abs_diff_eq!(one.amps()[2 * n + 1].re, c_odd, epsilon = 1e-14);
            assert_eq!(vac.amps()[2 * n + 1].re, 0.0);
            assert_eq!(one.amps()[2 * n].re, 0.0);
        }
    }

    #[test]
    fn quarter_squeezing_probabilities() {
        let g = gain(0.5f64.atanh());
        let p = squeezed_number_state(g, Seed::Vacuum, 64).unwrap().number_distribution();
        assert_abs_diff_eq!(p[0], 0.86603, epsilon = 1e-5);
        assert_abs_diff_eq!(p[2], 0.10825, epsilon = 1e-5);
    }

    #[test]
    fn oracle_means_match_closed_forms() {
        for i in 0..=15 {
            let g = gain(0.1 * i as f64);
            let n = default_n_trunc(g);
            let one = squeezed_number_state(g, Seed::Photon, n).unwrap();
            let vac = squeezed_number_state(g, Seed::Vacuum, n).unwrap();
            assert!((one.mean_photons() - (3.0 * g.sinh2() + 1.0)).abs() < 1e-9);
            assert!((vac.mean_photons() - g.sinh2()).abs() < 1e-9);
            assert!(one.truncation_loss() < 1e-12);
        }
        let one = squeezed_number_state(gain(1.0), Seed::Photon, 200).unwrap();
        assert_abs_diff_eq!(one.mean_photons(), 5.143_293_5, epsilon = 1e-6);
    }

    #[test]
    fn short_truncation_is_rejected() {
        let err = squeezed_number_state(gain(1.0), Seed::Photon, 20).unwrap_err();
        assert!(matches!(err, Error::TruncationLoss { .. }));
    }

    #[test]
    fn bernoulli_loss_of_one_photon() {
        let out = binomial_loss(&[0.0, 1.0], 0.08).unwrap();
        assert_abs_diff_eq!(out[0], 0.92, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1], 0.08, epsilon = 1e-15);
    }

    #[test]
    fn lossless_channel_is_identity() {
        let p = vec![0.1, 0.2, 0.3, 0.4];
        assert_eq!(binomial_loss(&p, 1.0).unwrap(), p);
        assert!(binomial_loss(&p, 0.0).is_err());
    }

    #[test]
    fn loss_preserves_probability() {
        let p: Vec<f64> = (0..300).map(|n| 0.5f64.powi(n + 1)).collect();
        let total: f64 = compensated_sum(p.iter().copied());
        for &eta in &[0.01, 0.08, 0.5, 0.99] {
            let out = binomial_loss(&p, eta).unwrap();
            assert!((compensated_sum(out.iter().copied()) - total).abs() < 1e-12);
        }
        for row in loss_kernel(150, 0.3) {
            assert!((compensated_sum(row.into_iter()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn large_photon_numbers_stay_finite() {
        let mut p = vec![0.0; 100_001];
        p[100_000] = 1.0;
        let out = binomial_loss(&p, 0.08).unwrap();
        assert!(out.iter().all(|x| x.is_finite()));
        assert!((compensated_sum(out.iter().copied()) - 1.0).abs() < 1e-9);
        let mean: f64 = out.iter().enumerate().map(|(m, x)| m as f64 * x).sum();
        assert!((mean - 8000.0).abs() < 1e-4);
    }
}
