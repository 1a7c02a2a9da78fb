//! Phase covariance of the type-II amplifier.
//!
//! `H = i chi a_H† a_V† + h.c.` is evolved in the horizontal/vertical Fock basis,
//! fed with a single photon in the equatorial mode
//! `a_phi† = (e^{i phi} a_H† + e^{-i phi} a_V†) / sqrt 2`, and the output is
//! rewritten in the `(a_phi, a_phi_perp)` basis through
//! `a_H† = e^{-i phi} (a† - i a_perp†) / sqrt 2`, `a_V† = e^{i phi} (a† + i a_perp†) / sqrt 2`.

use num_complex::Complex64;

use super::{squeezed_number_state, LnFactorial};
use crate::amplifier::{GainParams, Seed};
use crate::error::{Error, Result};

/// Per-mode truncation used when callers have no better choice; ample for `g <= 0.4`.
pub const DEFAULT_PHASE_N_TRUNC: usize = 40;

const MAX_GAIN: f64 = 0.4;
const MAX_EDGE_AMPLITUDE: f64 = 1e-6;

/// Joint photon-number distribution `P(n_a, n_perp)`, row-major over `0..dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointNumberDistribution {
    probs: Vec<f64>,
    dim: usize,
}

impl JointNumberDistribution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        if n < self.dim && m < self.dim {
            self.probs[n * self.dim + m]
        } else {
            0.0
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let dim = self.dim.max(other.dim);
        (0..dim * dim)
            .map(|i| (self.get(i / dim, i % dim) - other.get(i / dim, i % dim)).abs())
            .fold(0.0, f64::max)
    }

    /// `|<n|A1>|² |<m|A0>|²`, the distribution predicted by `U U_perp |1, 0>`.
    pub fn product_prediction(gain: GainParams, dim: usize) -> Result<Self> {
        let a1 = squeezed_number_state(gain, Seed::Photon, dim - 1)?.number_distribution();
        let a0 = squeezed_number_state(gain, Seed::Vacuum, dim - 1)?.number_distribution();
        let probs = a1.iter().flat_map(|x| a0.iter().map(move |y| x * y)).collect();
        Ok(Self { probs, dim })
    }
}

// Generator K = -iHt = g (a_H† a_V† - a_H a_V) on row-major (h, v) amplitudes.
fn apply_generator(psi: &[Complex64], dim: usize, g: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); dim * dim];
    for h in 0..dim {
        for v in 0..dim {
            let mut acc = Complex64::default();
            if h > 0 && v > 0 {
                acc += psi[(h - 1) * dim + (v - 1)] * ((h * v) as f64).sqrt();
            }
            if h + 1 < dim && v + 1 < dim {
                acc -= psi[(h + 1) * dim + (v + 1)] * (((h + 1) * (v + 1)) as f64).sqrt();
            }
            out[h * dim + v] = acc * g;
        }
    }
    out
}

// exp(K) psi by scaled Taylor summation with per-step error control.
fn evolve(psi: &[Complex64], dim: usize, g: f64) -> Vec<Complex64> {
    // ||K|| <= 2 g dim on the truncated space; keep each step's norm below 1/2
    let steps = ((4.0 * g * dim as f64).ceil() as usize).max(1);
    let h = g / steps as f64;
    let mut state = psi.to_vec();
    for _ in 0..steps {
        let mut term = state.clone();
        let mut acc = state.clone();
        for k in 1..200 {
            term = apply_generator(&term, dim, h);
            let f = 1.0 / k as f64;
            term.iter_mut().for_each(|x| *x *= f);
            acc.iter_mut().zip(&term).for_each(|(a, t)| *a += t);
            if term.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() < 1e-18 {
                break;
            }
        }
        state = acc;
    }
    state
}

/// Amplifies a single photon prepared in the equatorial mode at angle `phi` with
/// the two-mode Hamiltonian, and returns its photon-number distribution in the
/// `(a_phi, a_phi_perp)` basis.
pub fn amplify_equatorial_photon(
    gain: GainParams,
    phi: f64,
    n_trunc: usize,
) -> Result<JointNumberDistribution> {
    if gain.g() > MAX_GAIN {
        return Err(Error::invalid(format!(
            "phase-covariance check is limited to g <= {MAX_GAIN}, got {}",
            gain.g()
        )));
    }
    if n_trunc < 2 {
        return Err(Error::invalid("phase-covariance check needs n_trunc >= 2"));
    }
    let dim = n_trunc + 1;
    let mut psi = vec![Complex64::default(); dim * dim];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    psi[dim] = Complex64::from_polar(r, phi); // |1, 0>_HV
    psi[1] = Complex64::from_polar(r, -phi); // |0, 1>_HV

    let out = evolve(&psi, dim, gain.g());

    let edge: f64 = (0..dim * dim)
        .filter(|i| i / dim == n_trunc || i % dim == n_trunc)
        .map(|i| out[i].norm_sqr())
        .sum();
    if edge.sqrt() > MAX_EDGE_AMPLITUDE {
        return Err(Error::TruncationLoss { n_trunc, loss: edge, limit: MAX_EDGE_AMPLITUDE.powi(2) });
    }

    Ok(to_equatorial_basis(&out, dim, phi))
}

fn to_equatorial_basis(psi: &[Complex64], dim: usize, phi: f64) -> JointNumberDistribution {
    let out_dim = 2 * dim - 1;
    let lf = LnFactorial::new(out_dim);
    let powers_of_i = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let mut amps = vec![Complex64::default(); out_dim * out_dim];
    for h in 0..dim {
        for v in 0..dim {
            let c = psi[h * dim + v];
            if c.norm_sqr() == 0.0 {
                continue;
            }
            // (a_H†)^h (a_V†)^v |0> / sqrt(h! v!) expanded binomially
            let phase = c * Complex64::from_polar(1.0, (v as f64 - h as f64) * phi);
            let base = -0.5 * (h + v) as f64 * 2f64.ln() - 0.5 * (lf.get(h) + lf.get(v));
            for j in 0..=h {
                for k in 0..=v {
                    let p = j + k;
                    let q = h + v - p;
                    let magnitude = (base
                        + lf.ln_binomial(h, j)
                        + lf.ln_binomial(v, k)
                        + 0.5 * (lf.get(p) + lf.get(q)))
                    .exp();
                    // (-i)^(h-j) i^(v-k) = i^((v-k) - (h-j))
                    let ipow = (4 * dim + (v - k) - (h - j)) % 4;
                    amps[p * out_dim + q] += phase * powers_of_i[ipow] * magnitude;
                }
            }
        }
    }
    JointNumberDistribution { probs: amps.iter().map(|a| a.norm_sqr()).collect(), dim: out_dim }
}

/// Largest deviation between the equatorial-basis output distribution at angle
/// `phi` and the product form `|A1>|A0>_perp`.
pub fn phase_covariance_check(gain: GainParams, phi: f64, n_trunc: usize) -> Result<f64> {
    let evolved = amplify_equatorial_photon(gain, phi, n_trunc)?;
    let predicted = JointNumberDistribution::product_prediction(gain, evolved.dim())?;
    Ok(evolved.max_abs_diff(&predicted))
}
