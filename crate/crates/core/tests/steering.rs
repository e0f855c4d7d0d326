use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use squint_core::array::{ArrayConfig, ElementModel};
use squint_core::beampattern::{phased_pattern, Mechanism, PatternOptions};
use squint_core::metrics::{angle_distortion, hpbw, power_difference};
use squint_core::EvalModel;

fn single_freq(f_ghz: f64) -> ArrayConfig {
    let band = if f_ghz < 28.5 {
        vec![f_ghz, 28.5]
    } else {
        vec![28.5, f_ghz]
    };
    ArrayConfig::new(28, 0.5, 28.5, band, ElementModel::Ideal).unwrap()
}

fn grating_ad(aod: f64, f: f64) -> f64 {
    ((28.5 / f) * aod.to_radians().sin()).asin().to_degrees() - aod
}

/// Half-power half-angle of an N-element broadside ULA at half-wave
/// spacing, by bisection on the closed-form array factor.
fn ula_half_power_deg(n: usize) -> f64 {
    let af = |theta_deg: f64| {
        let psi = std::f64::consts::PI * theta_deg.to_radians().sin();
        if psi.abs() < 1e-15 {
            return 1.0;
        }
        let v = (n as f64 * psi / 2.0).sin() / (n as f64 * (psi / 2.0).sin());
        v * v
    };
    let (mut lo, mut hi) = (0.0, 180.0 / n as f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if af(mid) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phase_steering_follows_the_grating_equation(aod in 2.0f64..40.0, f in 27.0f64..30.0) {
        let cfg = single_freq(f);
        let p = phased_pattern(&cfg, Mechanism::Phase, aod, EvalModel::Em2, &PatternOptions::default()).unwrap();
        let ad = angle_distortion(&p, f).unwrap();
        prop_assert!((ad.abs() - grating_ad(aod, f).abs()).abs() < 0.05, "ad {ad} oracle {}", grating_ad(aod, f));
        prop_assert!(power_difference(&p, f).unwrap().abs() < 0.05);
    }

    #[test]
    fn squint_is_odd_in_the_steering_angle(aod in 3.0f64..35.0, f in 27.0f64..30.0) {
        let cfg = single_freq(f);
        let o = PatternOptions::default();
        let a = angle_distortion(&phased_pattern(&cfg, Mechanism::Phase, aod, EvalModel::Em1, &o).unwrap(), f).unwrap();
        let b = angle_distortion(&phased_pattern(&cfg, Mechanism::Phase, -aod, EvalModel::Em1, &o).unwrap(), f).unwrap();
        prop_assert!((a + b).abs() < 0.011);
    }

    #[test]
    fn true_time_delay_does_not_squint(aod in -40.0f64..40.0, f in 27.0f64..30.0) {
        let cfg = single_freq(f);
        let p = phased_pattern(&cfg, Mechanism::Ttd, aod, EvalModel::Em2, &PatternOptions::default()).unwrap();
        prop_assert!(angle_distortion(&p, f).unwrap().abs() <= 0.01);
    }
}

#[test]
fn broadside_hpbw_matches_closed_form() {
    let cfg = ArrayConfig::reference(ElementModel::Ideal);
    let p = phased_pattern(&cfg, Mechanism::Phase, 0.0, EvalModel::Em2, &PatternOptions::default()).unwrap();
    let oracle = 2.0 * ula_half_power_deg(28);
    assert_abs_diff_eq!(oracle, 3.62, epsilon = 0.01);
    assert_abs_diff_eq!(hpbw(&p, 28.5).unwrap(), oracle, epsilon = 0.01);
}

#[test]
fn scanned_beam_is_wider() {
    let cfg = ArrayConfig::reference(ElementModel::Ideal);
    let o = PatternOptions::default();
    let b0 = hpbw(
        &phased_pattern(&cfg, Mechanism::Phase, 0.0, EvalModel::Em2, &o).unwrap(),
        28.5,
    )
    .unwrap();
    let b30 = hpbw(
        &phased_pattern(&cfg, Mechanism::Phase, 30.0, EvalModel::Em2, &o).unwrap(),
        28.5,
    )
    .unwrap();
    // Beam broadening goes roughly as 1/cos(scan).
    assert!(b30 > b0);
    assert_abs_diff_eq!(b30 / b0, 1.0 / 30f64.to_radians().cos(), epsilon = 0.02);
}

#[test]
fn element_pattern_only_moves_peak_power_under_em1() {
    let cfg = ArrayConfig::reference(ElementModel::default_patch());
    let o = PatternOptions::default();
    let em1 = phased_pattern(&cfg, Mechanism::Phase, 24.0, EvalModel::Em1, &o).unwrap();
    let em2 = phased_pattern(&cfg, Mechanism::Phase, 24.0, EvalModel::Em2, &o).unwrap();
    for f in [27.0, 30.0] {
        assert!(power_difference(&em1, f).unwrap().abs() > 0.1);
        assert!(power_difference(&em2, f).unwrap().abs() < 0.05);
    }
}
