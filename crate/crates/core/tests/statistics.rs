//! Statistical checks on the √dB simulator and the Monte Carlo oracles.

use optprice_core::oracles::{mc_gbm_price, mc_perturbed_price, McConfig};
use optprice_core::sqrtbm::{folded_normal_mean, increment_stats, sqrtbm_increments, sqrtbm_paths, SqrtBmConfig};
use optprice_core::stats::mean_estimate;
use optprice_core::{bs_call, MarketState, OmegaSpec, OptionContract, OptionKind, StochVolParams, Volatility};

#[test]
fn increment_moments_at_one_million() {
    let n = 1_000_000;
    let config = SqrtBmConfig::new(0.01, n, 2024).unwrap();
    let s = increment_stats(&sqrtbm_increments(&config).unwrap(), config.dt);
    let sqrt_n = (n as f64).sqrt();
    assert!(s.mean.abs() <= 3.0 * s.mean_std_error, "{s:?}");
    assert!((s.second_moment - folded_normal_mean(0.01)).abs() <= 3.0 * s.second_moment_std_error, "{s:?}");
    assert!((s.positive_fraction - 0.5).abs() <= 3.0 / (2.0 * sqrt_n), "{s:?}");
    assert!(s.lag1_autocorrelation.abs() <= 3.0 / sqrt_n, "{s:?}");
}

#[test]
fn path_variance_is_linear_in_steps() {
    let steps = 50;
    let dt = 0.01;
    let config = SqrtBmConfig::new(dt, steps, 99).unwrap();
    let paths = sqrtbm_paths(&config, 10_000).unwrap();
    let ends: Vec<f64> = paths.iter().map(|p| p[steps]).collect();
    let m = mean_estimate(&ends).mean;
    let dev2: Vec<f64> = ends.iter().map(|x| (x - m) * (x - m)).collect();
    let var = mean_estimate(&dev2);
    let dev4: Vec<f64> = dev2.iter().map(|d| d * d).collect();
    let m4 = mean_estimate(&dev4).mean;
    let se = ((m4 - var.mean * var.mean) / ends.len() as f64).sqrt();
    let expected = steps as f64 * folded_normal_mean(dt);
    assert!((var.mean - expected).abs() <= 3.0 * se, "var {} expected {expected} se {se}", var.mean);
}

#[test]
fn thread_count_does_not_change_paths() {
    let config = SqrtBmConfig::new(0.02, 100, 5).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| sqrtbm_paths(&config, 300).unwrap());
    let b = four.install(|| sqrtbm_paths(&config, 300).unwrap());
    assert_eq!(a, b);

    let m = MarketState::new(100.0, 0.05, 0.0).unwrap();
    let c = OptionContract::european(OptionKind::Call, 100.0, 1.0).unwrap();
    let mc = McConfig { n_paths: 20_000, n_steps: 1, seed: 3, antithetic: true };
    let v = Volatility::new(0.2).unwrap();
    let a = one.install(|| mc_gbm_price(&m, &c, v, &mc).unwrap());
    let b = four.install(|| mc_gbm_price(&m, &c, v, &mc).unwrap());
    assert_eq!(a, b);
}

#[test]
fn antithetic_does_not_increase_error() {
    let m = MarketState::new(100.0, 0.05, 0.0).unwrap();
    let v = Volatility::new(0.25).unwrap();
    for (kind, k) in [(OptionKind::Call, 90.0), (OptionKind::Call, 110.0), (OptionKind::Put, 100.0)] {
        let c = OptionContract::european(kind, k, 1.0).unwrap();
        let plain =
            mc_gbm_price(&m, &c, v, &McConfig { n_paths: 100_000, n_steps: 1, seed: 1, antithetic: false }).unwrap();
        let anti =
            mc_gbm_price(&m, &c, v, &McConfig { n_paths: 100_000, n_steps: 1, seed: 1, antithetic: true }).unwrap();
        assert!(anti.std_error <= plain.std_error, "{kind:?} {k}: {anti:?} vs {plain:?}");
    }
}

#[test]
fn perturbation_has_zero_mean() {
    let m = MarketState::new(100.0, 0.05, 0.0).unwrap();
    let c = OptionContract::european(OptionKind::Call, 100.0, 1.0).unwrap();
    for omega in [OmegaSpec::Rademacher, OmegaSpec::Uniform { half_width: 0.5 }] {
        let p = StochVolParams::new(0.2, 0.0, 0.1, omega).unwrap();
        let e =
            mc_perturbed_price(&m, &c, &p, &McConfig { n_paths: 20_000, n_steps: 100, seed: 17, antithetic: false })
                .unwrap();
        assert!(e.perturbation.mean.abs() <= 3.0 * e.perturbation.std_error, "{:?}", e.perturbation);
        assert_eq!(e.rejected_steps, 0);
        // Loose sanity: the price stays in the neighbourhood of the β-only closed form.
        let closed = bs_call(&m, &c, Volatility::new(0.2).unwrap()).unwrap().price;
        assert!((e.estimate.mean - closed).abs() < 1.0);
    }
}
