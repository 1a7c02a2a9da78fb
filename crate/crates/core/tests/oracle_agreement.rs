//! Generating-function results against the brute-force Fock-space oracle.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use approx::assert_abs_diff_eq;
use eyeclone::oracle::{
    apply_loss, binomial_loss, default_n_trunc, lossy_number_distribution, phase_covariance_check,
    squeezed_number_state, superposition_detection, witness_oracle, DEFAULT_PHASE_N_TRUNC,
};
use eyeclone::verify::stats_gap;
use eyeclone::{
    build_bundle, choose_m_max, correlation, joint_stats, photon_distribution, poly_power, prob_yes,
    witness_closed_form, GainParams, LossChannel, Seed, ThresholdDetector,
};

fn gain(g: f64) -> GainParams {
    GainParams::new(g).unwrap()
}

fn loss(eta: f64) -> LossChannel {
    LossChannel::new(eta).unwrap()
}

#[test]
fn series_coefficients_match_lossy_squeezed_vacuum() {
    let (g, l) = (gain(0.5), loss(0.08));
    let series = poly_power(&build_bundle(g, l).y_poly, -0.5, 50).unwrap();
    let oracle = lossy_number_distribution(g, Seed::Vacuum, 0.08, default_n_trunc(g)).unwrap();
    for m in 0..=50 {
        assert_abs_diff_eq!(series.get(m), oracle[m], epsilon = 1e-10);
    }
}

#[test]
fn lossy_squeezed_photon_matches_oracle_to_m_200() {
    let (g, l) = (gain(0.5), loss(0.08));
    let dist = photon_distribution(Seed::Photon, g, l, 200).unwrap();
    let oracle = lossy_number_distribution(g, Seed::Photon, 0.08, 200).unwrap();
    for m in 0..=200 {
        assert_abs_diff_eq!(dist.prob(m), oracle[m], epsilon = 1e-10);
    }
}

#[test]
fn oracle_loss_on_lossless_distribution_matches_lossy_series() {
    let g = gain(0.5);
    let lossless = photon_distribution(Seed::Vacuum, g, LossChannel::lossless(), 120).unwrap();
    let lossy = apply_loss(&lossless, 0.08).unwrap();
    let direct = photon_distribution(Seed::Vacuum, g, loss(0.08), 120).unwrap();
    assert_eq!(lossy.eta(), 0.08);
    for m in 0..=120 {
        assert_abs_diff_eq!(lossy.prob(m), direct.prob(m), epsilon = 1e-10);
    }
}

#[test]
fn sequential_losses_compose() {
    let g = gain(1.0);
    let p = squeezed_number_state(g, Seed::Photon, default_n_trunc(g)).unwrap().number_distribution();
    let twice = binomial_loss(&binomial_loss(&p, 0.5).unwrap(), 0.16).unwrap();
    let once = binomial_loss(&p, 0.08).unwrap();
    for (a, b) in twice.iter().zip(&once) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-13);
    }
    let series = photon_distribution(Seed::Photon, g, loss(0.5).then(&loss(0.16)), 80).unwrap();
    for m in 0..=80 {
        assert_abs_diff_eq!(series.prob(m), once[m], epsilon = 1e-10);
    }
}

#[test]
fn click_probability_at_gain_two() {
    let g = gain(2.0);
    let m = choose_m_max(g, loss(0.08), 1e-12).unwrap();
    let dist = photon_distribution(Seed::Photon, g, loss(0.08), m).unwrap();
    let fast = prob_yes(&dist, 7).unwrap();
    let oracle = lossy_number_distribution(g, Seed::Photon, 0.08, default_n_trunc(g)).unwrap();
    let slow = 1.0 - oracle[..7].iter().sum::<f64>();
    assert!(fast > 0.0 && fast < 1.0);
    assert_abs_diff_eq!(fast, slow, epsilon = 1e-10);
}

#[test]
fn certified_truncation_at_the_efficiency_peak() {
    let g = GainParams::from_total_mean_photons(288.0).unwrap();
    let m = choose_m_max(g, loss(0.08), 1e-12).unwrap();
    for seed in [Seed::Vacuum, Seed::Photon] {
        let dist = photon_distribution(seed, g, loss(0.08), m).unwrap();
        assert!(dist.total() >= 1.0 - 1e-12);
        assert!(dist.tail_bound() <= 1e-12);
    }
}

#[test]
fn high_gain_distributions_normalize() {
    // <N_a> up to 2e4 with the heaviest and lightest sweep losses
    for n in [5e3, 8694.0, 9989.0, 2e4] {
        let g = GainParams::from_total_mean_photons(n).unwrap();
        for eta in [0.08, 0.02] {
            let m = choose_m_max(g, loss(eta), 1e-12).unwrap();
            for seed in [Seed::Vacuum, Seed::Photon] {
                let total = photon_distribution(seed, g, loss(eta), m).unwrap().total();
                assert!((total - 1.0).abs() < 1e-12, "<N_a>={n} eta={eta} total={total}");
            }
        }
    }
}

#[test]
fn joint_stats_is_a_product_of_single_mode_oracles() {
    let g = gain(1.0);
    let det = ThresholdDetector::default();
    let n = default_n_trunc(g);
    let yes = |seed| {
        let p = lossy_number_distribution(g, seed, 0.08, n).unwrap();
        1.0 - p[..7].iter().sum::<f64>()
    };
    let (y1, y0) = (yes(Seed::Photon), yes(Seed::Vacuum));
    let s = joint_stats(g, &det, 1.0, 1e-12).unwrap();
    assert_abs_diff_eq!(s.p_yn, y1 * (1.0 - y0), epsilon = 1e-10);
    assert_abs_diff_eq!(s.p_ny, (1.0 - y1) * y0, epsilon = 1e-10);
    assert_abs_diff_eq!(s.p_yy, y1 * y0, epsilon = 1e-10);
    assert_abs_diff_eq!(s.p_nn, (1.0 - y1) * (1.0 - y0), epsilon = 1e-10);
}

#[test]
fn superposition_endpoints_and_midpoint() {
    let g = gain(0.75);
    let det = ThresholdDetector::default();
    let n = default_n_trunc(g);
    let pure = joint_stats(g, &det, 1.0, 1e-12).unwrap();
    let at = |angle| superposition_detection(angle, g, &det, n).unwrap();
    assert!(stats_gap(&at(0.0), &pure) <= 1e-9);
    assert!(stats_gap(&at(FRAC_PI_2), &pure.mirrored()) <= 1e-9);
    assert!(stats_gap(&at(FRAC_PI_4), &pure.mix(&pure.mirrored(), 0.5)) <= 1e-9);
}

#[test]
fn aligned_correlator_from_superposition() {
    let g = gain(0.75);
    let det = ThresholdDetector::default();
    let aligned = superposition_detection(0.0, g, &det, default_n_trunc(g)).unwrap();
    let oracle_v = (aligned.p_yn - aligned.p_ny) / aligned.epsilon;
    let v = joint_stats(g, &det, 1.0, 1e-12).unwrap().visibility.unwrap();
    assert_abs_diff_eq!(correlation(0.0, v).unwrap(), -oracle_v, epsilon = 1e-6);
}

#[test]
fn witness_matches_oracle() {
    for (g, eta) in [(0.0, 1.0), (1.0, 0.5), (1.25, 0.5), (1.0, 0.08)] {
        let (g, l) = (gain(g), loss(eta));
        let closed = witness_closed_form(g, l);
        let oracle = witness_oracle(g, l, default_n_trunc(g)).unwrap();
        for (a, b) in [
            (closed.jz_sz, oracle.jz_sz),
            (closed.jx_sx, oracle.jx_sx),
            (closed.jy_sy, oracle.jy_sy),
            (closed.n_a, oracle.n_a),
            (closed.margin, oracle.margin),
        ] {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
        assert_abs_diff_eq!(oracle.margin, 2.0 * eta, epsilon = 1e-8);
    }
}

#[test]
fn equatorial_output_factorizes() {
    assert!(phase_covariance_check(gain(0.0), 0.7, 12).unwrap() <= 1e-12);
    assert!(phase_covariance_check(gain(0.3), 0.0, DEFAULT_PHASE_N_TRUNC).unwrap() <= 1e-6);
    assert!(phase_covariance_check(gain(0.3), 1.1, DEFAULT_PHASE_N_TRUNC).unwrap() <= 1e-6);
}
