//! Increments of the square root of Brownian motion.
//!
//! Each increment is built pathwise from a Gaussian increment
//! `ΔB ~ N(0, dt)` and an independent random sign `ζ`:
//!
//! ```text
//! X = ζ · |ΔB|^{1/2}
//! ```
//!
//! so `E[X] = 0`, `E[X²] = E|ΔB| = √(2dt/π)` and the amplitude scales as
//! `dt^{1/4}`. This is one construction with those properties; it is not
//! claimed to coincide in law with other constructions of the process.
//!
//! The recorded Gaussian increment is stored as `sign(ΔB)·X²`, which makes
//! `X² == |ΔB|` hold bit-for-bit (it moves `ΔB` by at most one ulp).

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PricingError, Result};
use crate::rng::substream;
use crate::stats::{lag1_autocorrelation, mean_estimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignRule {
    /// ±1 with equal probability.
    #[default]
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqrtBmConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub seed: u64,
    pub sign_rule: SignRule,
}

impl SqrtBmConfig {
    pub fn new(dt: f64, n_steps: usize, seed: u64) -> Result<Self> {
        let c = Self { dt, n_steps, seed, sign_rule: SignRule::Rademacher };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(PricingError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.n_steps == 0 {
            return Err(PricingError::Config("n_steps must be at least 1".into()));
        }
        Ok(())
    }

    /// `E[X²] = √(2dt/π)`.
    pub fn expected_second_moment(&self) -> f64 {
        folded_normal_mean(self.dt)
    }
}

/// `E|N(0, dt)|`.
pub fn folded_normal_mean(dt: f64) -> f64 {
    (2.0 * dt / std::f64::consts::PI).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementSample {
    /// The √dB increments `X_k`.
    pub values: Vec<f64>,
    /// Underlying Gaussian increments `ΔB_k`.
    pub gaussian: Vec<f64>,
}

/// One increment `(X, ΔB)` from `rng`, with `sqrt_dt = √dt`.
#[inline]
pub fn draw_increment<R: Rng + ?Sized>(rng: &mut R, sqrt_dt: f64) -> (f64, f64) {
    let z: f64 = rng.sample(StandardNormal);
    let db = sqrt_dt * z;
    let positive: bool = rng.random();
    let root = db.abs().sqrt();
    let x = if positive { root } else { -root };
    let db = (x * x).copysign(db);
    (x, db)
}

/// Increments on substream 0 of the configured seed.
pub fn sqrtbm_increments(config: &SqrtBmConfig) -> Result<IncrementSample> {
    sqrtbm_increments_on_stream(config, 0)
}

pub fn sqrtbm_increments_on_stream(config: &SqrtBmConfig, stream: u64) -> Result<IncrementSample> {
    config.validate()?;
    let mut rng = substream(config.seed, stream);
    let sqrt_dt = config.dt.sqrt();
    let (values, gaussian) = (0..config.n_steps).map(|_| draw_increment(&mut rng, sqrt_dt)).unzip();
    Ok(IncrementSample { values, gaussian })
}

/// Partial sums `[0, X_1, X_1 + X_2, ...]` (length `n_steps + 1`).
pub fn sqrtbm_path(config: &SqrtBmConfig) -> Result<Vec<f64>> {
    Ok(partial_sums(&sqrtbm_increments(config)?.values))
}

/// `n_paths` independent paths, path `i` on substream `i`.
pub fn sqrtbm_paths(config: &SqrtBmConfig, n_paths: usize) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    (0..n_paths as u64)
        .into_par_iter()
        .map(|i| sqrtbm_increments_on_stream(config, i).map(|s| partial_sums(&s.values)))
        .collect()
}

pub fn partial_sums(increments: &[f64]) -> Vec<f64> {
    let mut path = Vec::with_capacity(increments.len() + 1);
    let mut acc = 0.0;
    path.push(acc);
    for x in increments {
        acc += x;
        path.push(acc);
    }
    path
}

/// Moment, sign and dependence diagnostics of an increment sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncrementStats {
    pub n: usize,
    pub dt: f64,
    pub mean: f64,
    pub mean_std_error: f64,
    pub second_moment: f64,
    pub second_moment_std_error: f64,
    pub expected_second_moment: f64,
    pub positive_fraction: f64,
    pub lag1_autocorrelation: f64,
}

pub fn increment_stats(sample: &IncrementSample, dt: f64) -> IncrementStats {
    let first = mean_estimate(&sample.values);
    let squares: Vec<f64> = sample.values.iter().map(|x| x * x).collect();
    let second = mean_estimate(&squares);
    let positive = sample.values.iter().filter(|&&x| x > 0.0).count();
    IncrementStats {
        n: sample.values.len(),
        dt,
        mean: first.mean,
        mean_std_error: first.std_error,
        second_moment: second.mean,
        second_moment_std_error: second.std_error,
        expected_second_moment: folded_normal_mean(dt),
        positive_fraction: positive as f64 / sample.values.len() as f64,
        lag1_autocorrelation: lag1_autocorrelation(&sample.values),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub dt: f64,
    pub second_moment: f64,
    pub std_error: f64,
    pub expected: f64,
}

/// Estimate `E[X²]` at each step size in `dt_list`, using `config.n_steps`
/// draws per entry. Entry `i` runs on substream `i`.
pub fn scaling_diagnostic(config: &SqrtBmConfig, dt_list: &[f64]) -> Result<Vec<ScalingRow>> {
    if dt_list.is_empty() {
        return Err(PricingError::Config("dt list is empty".into()));
    }
    dt_list
        .par_iter()
        .enumerate()
        .map(|(i, &dt)| {
            let cfg = SqrtBmConfig { dt, ..*config };
            let sample = sqrtbm_increments_on_stream(&cfg, i as u64)?;
            let squares: Vec<f64> = sample.values.iter().map(|x| x * x).collect();
            let est = mean_estimate(&squares);
            Ok(ScalingRow { dt, second_moment: est.mean, std_error: est.std_error, expected: folded_normal_mean(dt) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_identity_is_exact() {
        let s = sqrtbm_increments(&SqrtBmConfig::new(0.01, 100_000, 3).unwrap()).unwrap();
        for (x, db) in s.values.iter().zip(&s.gaussian) {
            assert_eq!(x * x, db.abs());
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let c = SqrtBmConfig::new(0.01, 1000, 42).unwrap();
        assert_eq!(sqrtbm_increments(&c).unwrap(), sqrtbm_increments(&c).unwrap());
        let other = SqrtBmConfig { seed: 43, ..c };
        assert_ne!(sqrtbm_increments(&c).unwrap(), sqrtbm_increments(&other).unwrap());
    }

    #[test]
    fn config_errors() {
        assert!(SqrtBmConfig::new(0.0, 10, 1).is_err());
        assert!(SqrtBmConfig::new(-0.1, 10, 1).is_err());
        assert!(SqrtBmConfig::new(0.1, 0, 1).is_err());
        let c = SqrtBmConfig::new(0.1, 10, 1).unwrap();
        assert!(scaling_diagnostic(&c, &[]).is_err());
        assert!(scaling_diagnostic(&c, &[0.1, -1.0]).is_err());
    }

    #[test]
    fn path_is_partial_sum() {
        let c = SqrtBmConfig::new(0.01, 1, 9).unwrap();
        let inc = sqrtbm_increments(&c).unwrap();
        assert_eq!(sqrtbm_path(&c).unwrap(), vec![0.0, inc.values[0]]);
        let c = SqrtBmConfig::new(0.01, 50, 9).unwrap();
        let inc = sqrtbm_increments(&c).unwrap();
        let p = sqrtbm_path(&c).unwrap();
        assert_eq!(p.len(), 51);
        assert_eq!(p[50], p[49] + inc.values[49]);
        assert!((p[50] - p[49] - inc.values[49]).abs() <= 1e-15);
    }

    #[test]
    fn scaling_rows_track_folded_mean() {
        let c = SqrtBmConfig::new(0.01, 200_000, 5).unwrap();
        let rows = scaling_diagnostic(&c, &[0.01, 0.04]).unwrap();
        for r in &rows {
            assert!((r.second_moment - r.expected).abs() <= 3.0 * r.std_error, "{r:?}");
        }
        let ratio = rows[1].second_moment / rows[0].second_moment;
        assert!((ratio - 2.0).abs() < 0.02, "ratio {ratio}");
        assert!((rows[0].expected - 0.079_788_456_080_286_54).abs() < 1e-15);
        assert_eq!(rows, scaling_diagnostic(&c, &[0.01, 0.04]).unwrap());
    }
}
