//! Fitting checked against the synthetic generator.

use collapse_bounds::heatleak::{
    bootstrap_uncertainty, bound_from_series, fit_relaxation, generate_synthetic, BackgroundBudget,
    RelaxationSpec, SyntheticConfig,
};
use collapse_bounds::{Error, HeatingModel, Quantity};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn recovers_constant_at_five_percent_noise() {
    let spec = RelaxationSpec::default();
    let amp = 100e-12;
    let constant = 170e-12;
    let s = generate_synthetic(&spec, &[amp], constant, 0.05, 200, (1.0, 1e4), 42).unwrap();
    let fit = fit_relaxation(&s, &spec).unwrap();
    assert!((fit.constant - constant).abs() < 3.0 * fit.constant_sd());
    assert!((fit.amplitudes[0] - amp).abs() < 3.0 * fit.amplitude_sd(0));
}

#[test]
fn cryostat_scenario_recovers_all_parameters_within_three_sd() {
    let config = SyntheticConfig::cryostat_scenario();
    let s = config.generate().unwrap();
    let fit = fit_relaxation(&s, &config.spec).unwrap();
    assert!((fit.constant - config.constant).abs() < 3.0 * fit.constant_sd());
    assert!((fit.amplitudes[0] - config.amplitudes[0]).abs() < 3.0 * fit.amplitude_sd(0));
    assert!(fit.reduced_chi2() > 0.5 && fit.reduced_chi2() < 1.5);
}

#[test]
fn two_term_noiseless_fit_is_exact() {
    let spec = RelaxationSpec::fixed(vec![0.75, 0.375]);
    let s = generate_synthetic(&spec, &[4e-6, 2e-8], 2e-10, 0.0, 150, (1e4, 1e7), 0).unwrap();
    let fit = fit_relaxation(&s, &spec).unwrap();
    assert!(rel(fit.amplitudes[0], 4e-6) < 1e-9);
    assert!(rel(fit.amplitudes[1], 2e-8) < 1e-9);
    assert!(rel(fit.constant, 2e-10) < 1e-9);
}

#[test]
fn constant_lies_inside_two_sd_in_most_seeds() {
    let spec = RelaxationSpec::default();
    let constant = 170e-12;
    let covered = (0..100u64)
        .filter(|&seed| {
            let s =
                generate_synthetic(&spec, &[1e-6], constant, 0.05, 200, (1e3, 1e6), seed).unwrap();
            let fit = fit_relaxation(&s, &spec).unwrap();
            (fit.constant - constant).abs() <= 2.0 * fit.constant_sd()
        })
        .count();
    assert!(covered >= 90, "covered {covered}/100");
}

#[test]
fn bootstrap_of_noiseless_series_has_negligible_spread() {
    let spec = RelaxationSpec::default();
    let s = generate_synthetic(&spec, &[1e-6], 170e-12, 0.0, 100, (1e3, 1e6), 1).unwrap();
    let boot = bootstrap_uncertainty(&s, &spec, 100, 5).unwrap();
    assert!(
        boot.sd < 1e-9 * boot.mean.abs(),
        "{} vs {}",
        boot.sd,
        boot.mean
    );
}

#[test]
fn bootstrap_sd_agrees_with_analytic_covariance() {
    let spec = RelaxationSpec::default();
    let s = generate_synthetic(&spec, &[1e-6], 170e-12, 0.05, 200, (1e3, 1e6), 77).unwrap();
    let fit = fit_relaxation(&s, &spec).unwrap();
    let boot = bootstrap_uncertainty(&s, &spec, 400, 2024).unwrap();
    let ratio = boot.sd / fit.constant_sd();
    assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn bound_shrinks_when_the_limit_grows() {
    let spec = RelaxationSpec::default();
    let mass = Quantity::kilograms(17.0).unwrap();
    let bound_for = |constant: f64| {
        let s = generate_synthetic(&spec, &[1e-6], constant, 0.0, 50, (1e3, 1e6), 3)
            .unwrap()
            .with_stage(mass, None)
            .unwrap();
        bound_from_series(
            &s,
            &spec,
            &BackgroundBudget::none(),
            None,
            &HeatingModel::dp(),
            0.95,
        )
        .unwrap()
        .meters()
    };
    let one = bound_for(170e-12);
    let two = bound_for(340e-12);
    assert!(two < one);
    assert!(rel(one / two, 2f64.cbrt()) < 1e-6);
    // 170 pW on 17 kg is 10 pW/kg
    assert!(rel(one, 4.63e-12) < 2e-3);
    let ccg = {
        let s = generate_synthetic(&spec, &[1e-6], 170e-12, 0.0, 50, (1e3, 1e6), 3)
            .unwrap()
            .with_stage(mass, None)
            .unwrap();
        bound_from_series(
            &s,
            &spec,
            &BackgroundBudget::none(),
            None,
            &HeatingModel::classical_channel(),
            0.95,
        )
        .unwrap()
    };
    assert!(rel(ccg.meters(), 8.90e-12) < 2e-3);
    assert!(ccg.source.contains("background"));
}

#[test]
fn singular_fit_surfaces_as_error() {
    let spec = RelaxationSpec::fixed(vec![0.5, 0.5 + 1e-10]);
    let s = generate_synthetic(&spec, &[1.0, 1.0], 0.0, 0.0, 20, (1.0, 10.0), 0).unwrap();
    assert!(matches!(fit_relaxation(&s, &spec), Err(Error::Singular(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noiseless_fits_are_exact(
        alpha in 0.2f64..1.5,
        log_ratio in -2.0f64..2.0,
        log_c in -13.0f64..-9.0,
        n in 10usize..150,
        log_t0 in 0.0f64..4.0,
        decades in 1.0f64..4.0,
    ) {
        let spec = RelaxationSpec::fixed(vec![alpha]);
        let c = 10f64.powf(log_c);
        let t0 = 10f64.powf(log_t0);
        let t1 = t0 * 10f64.powf(decades);
        // decaying term and constant comparable at the last sample
        let amp = c * 10f64.powf(log_ratio) * t1.powf(alpha);
        let s = generate_synthetic(&spec, &[amp], c, 0.0, n, (t0, t1), 0).unwrap();
        let fit = fit_relaxation(&s, &spec).unwrap();
        prop_assert!(rel(fit.amplitudes[0], amp) <= 1e-9, "amp {} vs {}", fit.amplitudes[0], amp);
        prop_assert!(rel(fit.constant, c) <= 1e-9, "c {} vs {}", fit.constant, c);
    }

    #[test]
    fn generation_is_a_pure_function_of_seed(seed in any::<u64>()) {
        let spec = RelaxationSpec::default();
        let a = generate_synthetic(&spec, &[1e-6], 1e-10, 0.05, 20, (1.0, 1e3), seed).unwrap();
        let b = generate_synthetic(&spec, &[1e-6], 1e-10, 0.05, 20, (1.0, 1e3), seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
