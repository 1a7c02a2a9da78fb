use num_complex::Complex64;

use super::{loss_kernel, squeezed_number_state, FockVector};
use crate::amplifier::{GainParams, LossChannel, Seed};
use crate::detection::{DetectionStats, ThresholdDetector};
use crate::error::{Error, Result};
use crate::series::compensated_sum;
use crate::witness::WitnessReport;

const WITNESS_MAX_GAIN: f64 = 1.25;
const WITNESS_MAX_TRUNCATION: f64 = 1e-12;

// Row-major amplitudes over (n, n_perp), both in 0..dim.
struct TwoMode {
    amps: Vec<Complex64>,
    dim: usize,
}

impl TwoMode {
    fn product(a: &FockVector, perp: &FockVector, scale: f64) -> Self {
        let dim = a.amps().len();
        let mut amps = Vec::with_capacity(dim * dim);
        for x in a.amps() {
            for y in perp.amps() {
                amps.push(x * y * scale);
            }
        }
        Self { amps, dim }
    }

    fn add(&mut self, other: &TwoMode) {
        self.amps.iter_mut().zip(&other.amps).for_each(|(x, y)| *x += y);
    }

    fn at(&self, n: usize, m: usize) -> Complex64 {
        self.amps[n * self.dim + m]
    }

    fn map(&self, f: impl Fn(usize, usize) -> Complex64) -> TwoMode {
        let dim = self.dim;
        let amps = (0..dim * dim).map(|i| f(i / dim, i % dim)).collect();
        TwoMode { amps, dim }
    }

    // a† a_perp: (psi)(n, m) <- sqrt(n (m+1)) psi(n-1, m+1)
    fn hop_to_a(&self) -> TwoMode {
        self.map(|n, m| {
            if n == 0 || m + 1 >= self.dim {
                return Complex64::default();
            }
            self.at(n - 1, m + 1) * ((n * (m + 1)) as f64).sqrt()
        })
    }

    // a_perp† a: (psi)(n, m) <- sqrt((n+1) m) psi(n+1, m-1)
    fn hop_to_perp(&self) -> TwoMode {
        self.map(|n, m| {
            if m == 0 || n + 1 >= self.dim {
                return Complex64::default();
            }
            self.at(n + 1, m - 1) * (((n + 1) * m) as f64).sqrt()
        })
    }

    fn inner(&self, other: &TwoMode) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(x, y)| x.conj() * y).sum()
    }
}

/// Two-eye statistics of `cos(theta_b) |A1>|A0>_perp + sin(theta_b) |A0>|A1>_perp`,
/// built as an explicit two-mode state with loss applied to the joint number
/// distribution of both modes.
pub fn superposition_detection(
    mix_angle: f64,
    gain: GainParams,
    detector: &ThresholdDetector,
    n_trunc: usize,
) -> Result<DetectionStats> {
    let a1 = squeezed_number_state(gain, Seed::Photon, n_trunc)?;
    let a0 = squeezed_number_state(gain, Seed::Vacuum, n_trunc)?;
    let mut psi = TwoMode::product(&a1, &a0, mix_angle.cos());
    psi.add(&TwoMode::product(&a0, &a1, mix_angle.sin()));

    let dim = psi.dim;
    let joint: Vec<f64> = psi.amps.iter().map(|c| c.norm_sqr()).collect();
    let kernel = loss_kernel(dim - 1, detector.eta_eye());

    // loss on the perp index, then on the a index
    let mut half = vec![0.0; dim * dim];
    for n in 0..dim {
        for m in 0..dim {
            let p = joint[n * dim + m];
            if p == 0.0 {
                continue;
            }
            for (l, k) in kernel[m].iter().enumerate() {
                half[n * dim + l] += p * k;
            }
        }
    }
    let mut lossy = vec![0.0; dim * dim];
    for n in 0..dim {
        for (k_idx, k) in kernel[n].iter().enumerate() {
            for l in 0..dim {
                lossy[k_idx * dim + l] += half[n * dim + l] * k;
            }
        }
    }

    let theta = detector.theta() as usize;
    let region = |a_yes: bool, perp_yes: bool| {
        compensated_sum((0..dim * dim).filter_map(|i| {
            ((i / dim >= theta) == a_yes && (i % dim >= theta) == perp_yes).then(|| lossy[i])
        }))
    };
    Ok(DetectionStats::from_joint(
        region(true, false),
        region(false, true),
        region(true, true),
        region(false, false),
        gain.total_mean_photons(),
    ))
}

/// Witness correlators of `(|Phi>_a |0,1>_b - |Phi_perp>_a |1,0>_b) / sqrt 2`
/// evaluated on explicit amplitudes. Loss enters by scaling the bilinear
/// expectations by `eta`.
pub fn witness_oracle(gain: GainParams, loss: LossChannel, n_trunc: usize) -> Result<WitnessReport> {
    if gain.g() > WITNESS_MAX_GAIN {
        return Err(Error::invalid(format!(
            "witness oracle is limited to g <= {WITNESS_MAX_GAIN}, got {}",
            gain.g()
        )));
    }
    let a1 = squeezed_number_state(gain, Seed::Photon, n_trunc)?;
    let a0 = squeezed_number_state(gain, Seed::Vacuum, n_trunc)?;
    let loss_mass = a1.truncation_loss().max(a0.truncation_loss());
    if loss_mass > WITNESS_MAX_TRUNCATION {
        return Err(Error::TruncationLoss { n_trunc, loss: loss_mass, limit: WITNESS_MAX_TRUNCATION });
    }

    // b-qubit basis: 0 = |1,0>_b (photon in b), 1 = |0,1>_b (photon in b_perp)
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let chi = [TwoMode::product(&a0, &a1, -r), TwoMode::product(&a1, &a0, r)];

    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    // sigma_x = b†b - b_perp†b_perp, sigma_y = b†b_perp + h.c., sigma_z = i(b†b_perp - h.c.)
    let sigma_x = [[one, zero], [zero, -one]];
    let sigma_y = [[zero, one], [one, zero]];
    let sigma_z = [[zero, i], [-i, zero]];

    let jx = |s: &TwoMode| s.map(|n, m| s.at(n, m) * (n as f64 - m as f64));
    let jy = |s: &TwoMode| {
        let mut out = s.hop_to_a();
        out.add(&s.hop_to_perp());
        out
    };
    let jz = |s: &TwoMode| {
        let up = s.hop_to_a();
        let down = s.hop_to_perp();
        TwoMode { amps: up.amps.iter().zip(&down.amps).map(|(u, d)| i * (u - d)).collect(), dim: s.dim }
    };

    let correlator = |j: &dyn Fn(&TwoMode) -> TwoMode, sigma: &[[Complex64; 2]; 2]| {
        let mut acc = Complex64::default();
        for (beta2, chi2) in chi.iter().enumerate() {
            let applied = j(chi2);
            for (beta1, chi1) in chi.iter().enumerate() {
                acc += sigma[beta1][beta2] * chi1.inner(&applied);
            }
        }
        // anti-aligned orientation, loss scales bilinears by eta
        -acc.re * loss.eta()
    };

    let n_a = loss.eta()
        * chi
            .iter()
            .map(|c| compensated_sum(c.amps.iter().enumerate().map(|(k, x)| {
                ((k / c.dim + k % c.dim) as f64) * x.norm_sqr()
            })))
            .sum::<f64>();

    Ok(WitnessReport::from_components(
        correlator(&jz, &sigma_z),
        correlator(&jx, &sigma_x),
        correlator(&jy, &sigma_y),
        n_a,
    ))
}
