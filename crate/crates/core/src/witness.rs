//! Micro-macro separability witness.
//!
//! For separable states of two spatial modes, `|<J_a . J_b>| <= <N_a N_b>`. With a
//! single photon in mode `b` this reduces to `|<J_a . sigma_b>| <= <N_a>`. Only
//! that single-photon-`b` form is evaluated here.
//!
//! Correlators are reported in the anti-aligned orientation of the singlet,
//! i.e. as `-<J_k sigma_k>`, so that the bare singlet gives `+1` per component.
//! The criterion only involves the absolute value of their sum.

use serde::Serialize;

use crate::amplifier::{GainParams, LossChannel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessReport {
    pub jz_sz: f64,
    pub jx_sx: f64,
    pub jy_sy: f64,
    pub n_a: f64,
    /// `|jz_sz + jx_sx + jy_sy|`.
    pub lhs: f64,
    /// `<N_a>`.
    pub rhs: f64,
    /// `lhs - rhs`; positive values certify micro-macro entanglement.
    pub margin: f64,
}

impl WitnessReport {
    pub fn from_components(jz_sz: f64, jx_sx: f64, jy_sy: f64, n_a: f64) -> Self {
        let lhs = (jz_sz + jx_sx + jy_sy).abs();
        Self { jz_sz, jx_sx, jy_sy, n_a, lhs, rhs: n_a, margin: lhs - n_a }
    }

    pub fn violates_separability(&self) -> bool {
        self.margin > 0.0
    }
}

/// `jz_sz = eta`, `jx_sx = jy_sy = eta (2 sinh²g + 1)`, `<N_a> = eta (4 sinh²g + 1)`,
/// so the margin is `2 eta` at every gain.
pub fn witness_closed_form(gain: GainParams, loss: LossChannel) -> WitnessReport {
    let (eta, s2) = (loss.eta(), gain.sinh2());
    let equatorial = eta * (2.0 * s2 + 1.0);
    let n_a = eta * (4.0 * s2 + 1.0);
    let mut report = WitnessReport::from_components(eta, equatorial, equatorial, n_a);
    // the margin is 2 eta analytically; summing large terms would cost ulps of 4 sinh²g
    report.margin = 2.0 * eta;
    report.lhs = n_a + report.margin;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn report(g: f64, eta: f64) -> WitnessReport {
        witness_closed_form(GainParams::new(g).unwrap(), LossChannel::new(eta).unwrap())
    }

    #[test]
    fn eye_transmission_margin() {
        for g in [0.0, 0.5, 1.0, 3.0] {
            assert_abs_diff_eq!(report(g, 0.08).margin, 0.16, epsilon = 1e-15);
        }
    }

    #[test]
    fn bare_singlet() {
        let r = report(0.0, 1.0);
        assert_eq!((r.jz_sz, r.jx_sx, r.jy_sy, r.n_a), (1.0, 1.0, 1.0, 1.0));
        assert_eq!((r.lhs, r.rhs, r.margin), (3.0, 1.0, 2.0));
    }

    #[test]
    fn equatorial_component_at_unit_gain() {
        let r = report(1.0, 0.08);
        assert_abs_diff_eq!(r.jx_sx, 0.08 * (2.0 * 1f64.sinh().powi(2) + 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(r.jx_sx, 0.300_98, epsilon = 1e-5);
    }

    #[test]
    fn invariants_over_parameters() {
        for g in [0.0, 0.25, 1.0, 2.0, 4.0, 6.0] {
            for eta in [1e-6, 0.02, 0.08, 0.5, 1.0] {
                let r = report(g, eta);
                assert_eq!(r.jx_sx, r.jy_sy);
                assert!((r.margin - (r.lhs - r.rhs)).abs() <= 1e-12 * r.lhs.max(1.0));
                assert!(r.violates_separability());
                assert_eq!(r.margin, 2.0 * eta);
            }
        }
    }
}
