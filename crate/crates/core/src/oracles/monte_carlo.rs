//! Monte Carlo reference pricers.
//!
//! Path `i` draws its Brownian increments from substream `2i` and its
//! √dB / ω perturbation draws from substream `2i + 1`. Keeping the two drivers
//! apart means a zero-`λ` run of the perturbed dynamics reproduces the plain
//! Euler GBM run path for path.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{OmegaSpec, StochVolParams};
use crate::error::{PricingError, Result};
use crate::numerics::intrinsic;
use crate::rng::{substream, StreamRng};
use crate::sqrtbm::draw_increment;
use crate::stats::{compensated_sum, mean_estimate};
use crate::types::{ExerciseStyle, MarketState, OptionContract, Volatility};

/// Perturbation draws with `|1 − λωX|` below this are rejected and redrawn.
pub const DENOMINATOR_GUARD: f64 = 1e-6;
/// Rejection rate above which the estimate carries a warning.
pub const REJECTION_WARNING_RATE: f64 = 0.01;
const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    /// Pair each path with its mirror image. `n_paths` counts both halves.
    pub antithetic: bool,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || self.n_steps == 0 {
            return Err(PricingError::Config("n_paths and n_steps must be at least 1".into()));
        }
        if self.antithetic && !self.n_paths.is_multiple_of(2) {
            return Err(PricingError::Config(format!(
                "antithetic sampling needs an even path count, got {}",
                self.n_paths
            )));
        }
        Ok(())
    }

    /// Number of independent samples: pairs when antithetic, paths otherwise.
    pub fn n_samples(&self) -> usize {
        if self.antithetic {
            self.n_paths / 2
        } else {
            self.n_paths
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Independent samples behind the estimate.
    pub n_effective: usize,
}

fn brownian_stream(seed: u64, path: u64) -> StreamRng {
    substream(seed, 2 * path)
}

fn perturbation_stream(seed: u64, path: u64) -> StreamRng {
    substream(seed, 2 * path + 1)
}

fn require_european(contract: &OptionContract) -> Result<()> {
    if contract.style() != ExerciseStyle::European {
        return Err(PricingError::Contract("Monte Carlo oracles price European payoffs only".into()));
    }
    Ok(())
}

fn discounted(samples: &[f64], df: f64) -> McEstimate {
    let e = mean_estimate(samples);
    McEstimate { mean: df * e.mean, std_error: df * e.std_error, n_effective: e.count }
}

/// Risk-neutral GBM price of a European payoff by exact terminal sampling
/// `S_T = S·exp((r − σ²/2)τ + σ√τ·Z)`.
pub fn mc_gbm_price(
    market: &MarketState,
    contract: &OptionContract,
    vol: Volatility,
    mc: &McConfig,
) -> Result<McEstimate> {
    mc.validate()?;
    require_european(contract)?;
    let tau = market.time_to_maturity(contract)?;
    let (kind, strike, spot, r) = (contract.kind(), contract.strike(), market.spot(), market.rate());
    let sigma = vol.sigma();
    let df = (-r * tau).exp();
    if sigma == 0.0 || tau == 0.0 {
        let value = df * intrinsic(kind, spot * (r * tau).exp(), strike);
        return Ok(McEstimate { mean: value, std_error: 0.0, n_effective: mc.n_samples() });
    }
    let drift = (r - 0.5 * sigma * sigma) * tau;
    let vol_t = sigma * tau.sqrt();
    let terminal_payoff = |z: f64| intrinsic(kind, spot * (drift + vol_t * z).exp(), strike);
    let antithetic = mc.antithetic;
    let samples: Vec<f64> = (0..mc.n_samples() as u64)
        .into_par_iter()
        .map(|i| {
            let z: f64 = brownian_stream(mc.seed, i).sample(StandardNormal);
            if antithetic {
                0.5 * (terminal_payoff(z) + terminal_payoff(-z))
            } else {
                terminal_payoff(z)
            }
        })
        .collect();
    Ok(discounted(&samples, df))
}

/// Which drift to simulate under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Drift {
    /// The risk-free rate (pricing).
    RiskNeutral,
    /// The model drift μ (pure path simulation).
    Physical,
}

/// Euler path `S_{k+1} = S_k + S_k(aΔt + σΔW_k)` of length `n_steps + 1`.
/// `mirror` flips the sign of every Brownian increment.
#[allow(clippy::too_many_arguments)]
pub fn simulate_gbm_euler_path(
    spot: f64,
    drift: f64,
    sigma: f64,
    horizon: f64,
    n_steps: usize,
    seed: u64,
    path: u64,
    mirror: bool,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_steps + 1);
    gbm_euler_walk(spot, drift, sigma, horizon, n_steps, seed, path, mirror, Some(&mut out));
    out
}

#[allow(clippy::too_many_arguments)]
fn gbm_euler_walk(
    spot: f64,
    drift: f64,
    sigma: f64,
    horizon: f64,
    n_steps: usize,
    seed: u64,
    path: u64,
    mirror: bool,
    mut record: Option<&mut Vec<f64>>,
) -> f64 {
    let dt = horizon / n_steps as f64;
    let sqrt_dt = dt.sqrt();
    let mut w = brownian_stream(seed, path);
    let mut s = spot;
    if let Some(r) = record.as_deref_mut() {
        r.push(s);
    }
    for _ in 0..n_steps {
        let z: f64 = w.sample(StandardNormal);
        let dw = if mirror { -sqrt_dt * z } else { sqrt_dt * z };
        s += s * (drift * dt + sigma * dw);
        if let Some(r) = record.as_deref_mut() {
            r.push(s);
        }
    }
    s
}

/// Time-stepped (Euler) risk-neutral GBM price of a European payoff.
pub fn mc_gbm_euler_price(
    market: &MarketState,
    contract: &OptionContract,
    vol: Volatility,
    mc: &McConfig,
) -> Result<McEstimate> {
    mc.validate()?;
    require_european(contract)?;
    let tau = market.time_to_maturity(contract)?;
    let (kind, strike, spot, r) = (contract.kind(), contract.strike(), market.spot(), market.rate());
    let sigma = vol.sigma();
    let antithetic = mc.antithetic;
    let samples: Vec<f64> = (0..mc.n_samples() as u64)
        .into_par_iter()
        .map(|i| {
            let leg = |mirror| {
                intrinsic(kind, gbm_euler_walk(spot, r, sigma, tau, mc.n_steps, mc.seed, i, mirror, None), strike)
            };
            if antithetic {
                0.5 * (leg(false) + leg(true))
            } else {
                leg(false)
            }
        })
        .collect();
    Ok(discounted(&samples, (-r * tau).exp()))
}

fn draw_omega(rng: &mut StreamRng, spec: OmegaSpec) -> f64 {
    match spec {
        OmegaSpec::Rademacher => {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
        OmegaSpec::Uniform { half_width } => rng.random_range(-half_width..=half_width),
    }
}

/// Summary of the perturbation terms `λ·ω_k·X_k` actually applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationStats {
    pub mean: f64,
    pub std_error: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbedPath {
    pub values: Vec<f64>,
    pub rejected_steps: u64,
    pub perturbations: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct WalkTally {
    rejected: u64,
    sum: f64,
    sum_sq: f64,
    count: u64,
}

/// One path of the perturbed dynamics. Each step solves
/// `ΔS·(1 − λωX) = S(aΔt + βΔW)` for `ΔS`.
#[allow(clippy::too_many_arguments)]
fn perturbed_walk(
    spot: f64,
    drift: f64,
    params: &StochVolParams,
    horizon: f64,
    n_steps: usize,
    seed: u64,
    path: u64,
    mirror: bool,
    mut record: Option<(&mut Vec<f64>, &mut Vec<f64>)>,
) -> Result<(f64, WalkTally)> {
    let dt = horizon / n_steps as f64;
    let sqrt_dt = dt.sqrt();
    let (beta, lambda, omega) = (params.beta(), params.lambda(), params.omega());
    let mut w = brownian_stream(seed, path);
    let mut b = perturbation_stream(seed, path);
    let mut tally = WalkTally::default();
    let mut s = spot;
    if let Some((values, _)) = record.as_mut() {
        values.push(s);
    }
    for _ in 0..n_steps {
        let z: f64 = w.sample(StandardNormal);
        let dw = if mirror { -sqrt_dt * z } else { sqrt_dt * z };
        let mut redraws = 0;
        let (term, denom) = loop {
            let (x, _) = draw_increment(&mut b, sqrt_dt);
            let x = if mirror { -x } else { x };
            let term = lambda * draw_omega(&mut b, omega) * x;
            let denom = 1.0 - term;
            if denom.abs() >= DENOMINATOR_GUARD {
                break (term, denom);
            }
            tally.rejected += 1;
            redraws += 1;
            if redraws >= MAX_REDRAWS {
                return Err(PricingError::Parameter(format!(
                    "perturbation denominator stayed below {DENOMINATOR_GUARD} for {MAX_REDRAWS} draws; lambda = {lambda} is too large"
                )));
            }
        };
        s += s * (drift * dt + beta * dw) / denom;
        tally.sum += term;
        tally.sum_sq += term * term;
        tally.count += 1;
        if let Some((values, terms)) = record.as_mut() {
            values.push(s);
            terms.push(term);
        }
    }
    Ok((s, tally))
}

/// A single recorded path of the perturbed dynamics (for dumps and path-level checks).
#[allow(clippy::too_many_arguments)]
pub fn simulate_perturbed_path(
    market: &MarketState,
    horizon: f64,
    params: &StochVolParams,
    drift: Drift,
    n_steps: usize,
    seed: u64,
    path: u64,
    mirror: bool,
) -> Result<PerturbedPath> {
    if n_steps == 0 || !(horizon.is_finite() && horizon > 0.0) {
        return Err(PricingError::Config("need n_steps ≥ 1 and a positive horizon".into()));
    }
    let a = match drift {
        Drift::RiskNeutral => market.rate(),
        Drift::Physical => params.mu(),
    };
    let mut values = Vec::with_capacity(n_steps + 1);
    let mut perturbations = Vec::with_capacity(n_steps);
    let (_, tally) = perturbed_walk(
        market.spot(),
        a,
        params,
        horizon,
        n_steps,
        seed,
        path,
        mirror,
        Some((&mut values, &mut perturbations)),
    )?;
    Ok(PerturbedPath { values, rejected_steps: tally.rejected, perturbations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbedEstimate {
    pub estimate: McEstimate,
    pub rejected_steps: u64,
    pub total_steps: u64,
    pub rejection_rate: f64,
    pub warning: Option<String>,
    pub perturbation: PerturbationStats,
}

/// Monte Carlo price under `dS = S(r du + β dW) + dS·λ·ω·√dB`, simulated with
/// the risk-free drift in place of μ.
pub fn mc_perturbed_price(
    market: &MarketState,
    contract: &OptionContract,
    params: &StochVolParams,
    mc: &McConfig,
) -> Result<PerturbedEstimate> {
    mc.validate()?;
    require_european(contract)?;
    let tau = market.time_to_maturity(contract)?;
    if tau == 0.0 {
        return Err(PricingError::Degenerate("no time left to simulate".into()));
    }
    let (kind, strike, spot, r) = (contract.kind(), contract.strike(), market.spot(), market.rate());
    let antithetic = mc.antithetic;
    let results = (0..mc.n_samples() as u64)
        .into_par_iter()
        .map(|i| {
            let (s_a, t_a) = perturbed_walk(spot, r, params, tau, mc.n_steps, mc.seed, i, false, None)?;
            if antithetic {
                let (s_b, t_b) = perturbed_walk(spot, r, params, tau, mc.n_steps, mc.seed, i, true, None)?;
                let tally = WalkTally {
                    rejected: t_a.rejected + t_b.rejected,
                    sum: t_a.sum + t_b.sum,
                    sum_sq: t_a.sum_sq + t_b.sum_sq,
                    count: t_a.count + t_b.count,
                };
                Ok((0.5 * (intrinsic(kind, s_a, strike) + intrinsic(kind, s_b, strike)), tally))
            } else {
                Ok((intrinsic(kind, s_a, strike), t_a))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let samples: Vec<f64> = results.iter().map(|(v, _)| *v).collect();
    let estimate = discounted(&samples, (-r * tau).exp());
    let rejected: u64 = results.iter().map(|(_, t)| t.rejected).sum();
    let count: u64 = results.iter().map(|(_, t)| t.count).sum();
    let sums: Vec<f64> = results.iter().map(|(_, t)| t.sum).collect();
    let sums_sq: Vec<f64> = results.iter().map(|(_, t)| t.sum_sq).collect();
    let n = count as f64;
    let mean = compensated_sum(&sums) / n;
    let var = ((compensated_sum(&sums_sq) - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
    let rejection_rate = rejected as f64 / count as f64;
    let warning = (rejection_rate > REJECTION_WARNING_RATE).then(|| {
        format!(
            "{:.3}% of perturbation draws hit |1 − λωX| < {DENOMINATOR_GUARD}; λ = {} is large for this step size",
            100.0 * rejection_rate,
            params.lambda()
        )
    });
    Ok(PerturbedEstimate {
        estimate,
        rejected_steps: rejected,
        total_steps: count,
        rejection_rate,
        warning,
        perturbation: PerturbationStats { mean, std_error: (var / n).sqrt(), count },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::bs_call;
    use crate::types::OptionKind;

    fn setup() -> (MarketState, OptionContract) {
        (MarketState::new(100.0, 0.05, 0.0).unwrap(), OptionContract::european(OptionKind::Call, 100.0, 1.0).unwrap())
    }

    #[test]
    fn zero_vol_is_deterministic() {
        let (m, c) = setup();
        let mc = McConfig { n_paths: 1000, n_steps: 1, seed: 1, antithetic: true };
        let e = mc_gbm_price(&m, &c, Volatility::new(0.0).unwrap(), &mc).unwrap();
        assert_eq!(e.std_error, 0.0);
        assert!((e.mean - (100.0 - 100.0 * (-0.05f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn gbm_estimate_is_reproducible_and_close() {
        let (m, c) = setup();
        let mc = McConfig { n_paths: 200_000, n_steps: 1, seed: 11, antithetic: true };
        let v = Volatility::new(0.2).unwrap();
        let a = mc_gbm_price(&m, &c, v, &mc).unwrap();
        let b = mc_gbm_price(&m, &c, v, &mc).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_effective, 100_000);
        let bs = bs_call(&m, &c, v).unwrap().price;
        assert!((a.mean - bs).abs() <= 4.0 * a.std_error, "{a:?} vs {bs}");
    }

    #[test]
    fn config_validation() {
        let (m, c) = setup();
        let v = Volatility::new(0.2).unwrap();
        assert!(mc_gbm_price(&m, &c, v, &McConfig { n_paths: 0, n_steps: 1, seed: 0, antithetic: false }).is_err());
        assert!(mc_gbm_price(&m, &c, v, &McConfig { n_paths: 3, n_steps: 1, seed: 0, antithetic: true }).is_err());
        let am = OptionContract::american(OptionKind::Call, 100.0, 1.0).unwrap();
        assert!(mc_gbm_price(&m, &am, v, &McConfig { n_paths: 2, n_steps: 1, seed: 0, antithetic: true }).is_err());
    }

    #[test]
    fn zero_lambda_matches_euler_paths() {
        let (m, _) = setup();
        let p = StochVolParams::new(0.2, 0.08, 0.0, OmegaSpec::Rademacher).unwrap();
        for path in 0..20 {
            let perturbed = simulate_perturbed_path(&m, 1.0, &p, Drift::RiskNeutral, 50, 5, path, false).unwrap();
            let gbm = simulate_gbm_euler_path(100.0, 0.05, 0.2, 1.0, 50, 5, path, false);
            assert_eq!(perturbed.values, gbm);
        }
    }

    #[test]
    fn zero_lambda_price_matches_euler_price() {
        let (m, c) = setup();
        let p = StochVolParams::new(0.2, 0.0, 0.0, OmegaSpec::Rademacher).unwrap();
        let mc = McConfig { n_paths: 2000, n_steps: 20, seed: 8, antithetic: true };
        let a = mc_perturbed_price(&m, &c, &p, &mc).unwrap();
        let b = mc_gbm_euler_price(&m, &c, Volatility::new(0.2).unwrap(), &mc).unwrap();
        assert_eq!(a.estimate, b);
        assert_eq!(a.rejected_steps, 0);
        assert!(a.warning.is_none());
    }

    #[test]
    fn large_lambda_warns() {
        let (m, c) = setup();
        // |X| ≈ 0.2 at dt = 1/250, so λ = 5 puts λωX near 1 regularly.
        let p = StochVolParams::new(0.2, 0.0, 5.0, OmegaSpec::Uniform { half_width: 1.0 }).unwrap();
        let mc = McConfig { n_paths: 200, n_steps: 250, seed: 2, antithetic: false };
        let e = mc_perturbed_price(&m, &c, &p, &mc).unwrap();
        assert_eq!(e.total_steps, 200 * 250);
        // Exact hits of the guard band are rare even here; just check the bookkeeping.
        assert_eq!(e.warning.is_some(), e.rejection_rate > REJECTION_WARNING_RATE);
    }

    #[test]
    fn physical_drift_uses_mu() {
        let (m, _) = setup();
        let p = StochVolParams::new(0.2, 0.3, 0.0, OmegaSpec::Rademacher).unwrap();
        let perturbed = simulate_perturbed_path(&m, 1.0, &p, Drift::Physical, 10, 1, 0, false).unwrap();
        assert_eq!(perturbed.values, simulate_gbm_euler_path(100.0, 0.3, 0.2, 1.0, 10, 1, 0, false));
    }
}
